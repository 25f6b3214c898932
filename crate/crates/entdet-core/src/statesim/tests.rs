use num_traits::Float;

use super::*;
use crate::qlin::{partial_trace, Subsystem};
use crate::tomo::i_concurrence;

/// Concurrence oracle independent of the tomo module: marginal purity
/// straight from the partial trace.
fn concurrence_oracle(state: &PureState) -> f64 {
    let rho_a = partial_trace(&state.density(), Subsystem::A);
    let purity = rho_a.trace_product(&rho_a).re;
    2.0 * (1.0 - purity)
}

#[test]
fn uniform_open_aperture_is_product_plus_plus() {
    let state = generate_state(&BeamProfile::Uniform, &ModulationPattern::open()).unwrap();
    for amp in state.amplitudes() {
        assert!((amp.re - 1.0 / 3.0).abs() < 1e-15);
        assert!(amp.im == 0.0);
    }
    assert!(concurrence_oracle(&state).abs() < 1e-12);
    assert!(i_concurrence(&state).abs() < 1e-12);
}

#[test]
fn schmidt_slits_give_maximal_entanglement() {
    let mut t = [0.0; 9];
    t[0] = 1.0;
    t[4] = 1.0;
    t[8] = 1.0;
    let state =
        generate_state(&BeamProfile::Uniform, &ModulationPattern::new(t).unwrap()).unwrap();
    let phi = PureState::maximally_entangled();
    assert!(state.max_abs_diff(&phi) < 1e-15);
    assert!((concurrence_oracle(&state) - 4.0 / 3.0).abs() < 1e-12);
}

#[test]
fn gaussian_beam_amplitudes_follow_closed_form() {
    // Oracle: amplitude at slit l proportional to exp(-(l/4)^2), then
    // renormalized.
    let beam = BeamProfile::Gaussian { waist_periods: 4.0, center_offset: 0.0 };
    let state = generate_state(&beam, &ModulationPattern::open()).unwrap();
    let raw: Vec<f64> = (-4..=4).map(|l| (-(l as f64 / 4.0).powi(2)).exp()).collect();
    let norm: f64 = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
    for (l, expect) in (-4..=4).zip(raw.iter().map(|a| a / norm)) {
        assert!((state.amp_slit(l).re - expect).abs() < 1e-14, "slit {l}");
    }
}

#[test]
fn monotone_pruning_zeroes_amplitudes() {
    let mut t = [0.6; 9];
    t[3] = 0.0;
    let state =
        generate_state(&BeamProfile::Uniform, &ModulationPattern::new(t).unwrap()).unwrap();
    assert!(state.amp_slit(-1).norm() == 0.0);
    assert!(state.amp_slit(0).norm() > 0.0);
}

#[test]
fn transmission_scaling_leaves_state_unchanged() {
    let mut t = [0.0; 9];
    t[0] = 0.9;
    t[2] = 0.5;
    t[4] = 0.3;
    t[8] = 0.1;
    let beam = BeamProfile::Gaussian { waist_periods: 3.0, center_offset: 0.5 };
    let a = generate_state(&beam, &ModulationPattern::new(t).unwrap()).unwrap();
    let scaled: [f64; 9] = t.map(|v| v * 0.37);
    let b = generate_state(&beam, &ModulationPattern::new(scaled).unwrap()).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-12);
}

#[test]
fn invalid_patterns_rejected() {
    assert!(matches!(
        ModulationPattern::new([0.0; 9]),
        Err(StateSimError::AllSlitsClosed)
    ));
    let mut t = [0.5; 9];
    t[2] = 1.5;
    assert!(matches!(
        ModulationPattern::new(t),
        Err(StateSimError::TransmissionOutOfRange { slit: -2, .. })
    ));
    assert!(matches!(
        generate_state(
            &BeamProfile::Gaussian { waist_periods: 0.0, center_offset: 0.0 },
            &ModulationPattern::open()
        ),
        Err(StateSimError::InvalidBeam { .. })
    ));
}

#[test]
fn degenerate_beam_slit_overlap_is_an_error() {
    // A beam parked far off-axis underflows to zero at every slit.
    let beam = BeamProfile::Gaussian { waist_periods: 0.01, center_offset: 1e4 };
    assert!(matches!(
        generate_state(&beam, &ModulationPattern::open()),
        Err(StateSimError::DegenerateState)
    ));
}

#[test]
fn tiny_transmission_still_normalizes() {
    let mut t = [0.0; 9];
    t[0] = 1e-300;
    let state =
        generate_state(&BeamProfile::Uniform, &ModulationPattern::new(t).unwrap()).unwrap();
    assert!((state.amp_slit(-4).re - 1.0).abs() < 1e-12);
}

#[test]
fn presets_hit_their_concurrence_windows() {
    let [s1, s2, s3] = canonical_states();
    let c1 = i_concurrence(&s1);
    let c2 = i_concurrence(&s2);
    let c3 = i_concurrence(&s3);
    assert!((1.15..=1.25).contains(&c1), "preset 1: {c1}");
    assert!((0.40..=0.50).contains(&c2), "preset 2: {c2}");
    assert!((0.22..=0.32).contains(&c3), "preset 3: {c3}");
    // Ordering from most to least entangled, and the oracle agrees.
    assert!(c1 > c2 && c2 > c3);
    for s in [&s1, &s2, &s3] {
        assert!((i_concurrence(s) - concurrence_oracle(s)).abs() < 1e-12);
    }
}
