//! Synthesis of slit-encoded two-qutrit states.
//!
//! A collimated beam illuminating a 9-slit aperture prepares the pure
//! state whose amplitude at slit `l` is the (real, non-negative) beam
//! amplitude there; programming the slit transmissions `t_ij` rescales
//! each amplitude by `sqrt(t_ij)`. Phases are introduced later, at the
//! measurement stage, never during preparation.

use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::qlin::{PureState, QlinError, DIM};

/// Geometry of the 9-slit aperture. Carried as metadata; the synthesis
/// itself only needs slit labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitAperture {
    pub slit_count: usize,
    /// Slit half-width `a` in micrometers.
    pub half_width_um: f64,
    /// Center-to-center slit distance `d` in micrometers.
    pub period_um: f64,
}

impl Default for SlitAperture {
    fn default() -> Self {
        Self { slit_count: DIM, half_width_um: 52.0, period_um: 208.0 }
    }
}

/// Transverse beam profile evaluated at the slit positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamProfile {
    /// Equal illumination of every slit.
    Uniform,
    /// Gaussian amplitude `exp(-((l - offset)/waist)^2)` with the waist
    /// and center offset measured in slit periods.
    Gaussian { waist_periods: f64, center_offset: f64 },
}

impl BeamProfile {
    /// Real non-negative amplitude at slit `l` in -4..=4.
    pub fn amplitude(&self, l: i32) -> f64 {
        debug_assert!((-4..=4).contains(&l));
        match *self {
            BeamProfile::Uniform => 1.0,
            BeamProfile::Gaussian { waist_periods, center_offset } => {
                let u = (l as f64 - center_offset) / waist_periods;
                (-u * u).exp()
            }
        }
    }
}

/// Per-slit transmissions `t_ij`, stored in slit order `l = -4..=4`
/// (equivalently logical order `|00>, |01>, ..., |22>`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationPattern {
    t: [f64; DIM],
}

impl ModulationPattern {
    pub fn new(t: [f64; DIM]) -> Result<Self, StateSimError> {
        for (idx, &v) in t.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(StateSimError::TransmissionOutOfRange { slit: idx as i32 - 4, value: v });
            }
        }
        if t.iter().all(|&v| v == 0.0) {
            return Err(StateSimError::AllSlitsClosed);
        }
        Ok(Self { t })
    }

    /// Fully open aperture.
    pub fn open() -> Self {
        Self { t: [1.0; DIM] }
    }

    pub fn transmissions(&self) -> &[f64; DIM] {
        &self.t
    }

    pub fn transmission(&self, l: i32) -> f64 {
        assert!((-4..=4).contains(&l));
        self.t[(l + 4) as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSimError {
    TransmissionOutOfRange { slit: i32, value: f64 },
    AllSlitsClosed,
    InvalidBeam { reason: &'static str },
    /// Beam and transmissions annihilate every amplitude.
    DegenerateState,
    State(QlinError),
}

impl fmt::Display for StateSimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSimError::TransmissionOutOfRange { slit, value } => {
                write!(f, "transmission at slit {slit} is {value}, outside [0, 1]")
            }
            StateSimError::AllSlitsClosed => write!(f, "every slit transmission is zero"),
            StateSimError::InvalidBeam { reason } => write!(f, "invalid beam profile: {reason}"),
            StateSimError::DegenerateState => {
                write!(f, "beam and transmissions produce the zero state")
            }
            StateSimError::State(e) => write!(f, "state construction failed: {e}"),
        }
    }
}

impl core::error::Error for StateSimError {}

impl From<QlinError> for StateSimError {
    fn from(e: QlinError) -> Self {
        StateSimError::State(e)
    }
}

fn validate_beam(beam: &BeamProfile) -> Result<(), StateSimError> {
    if let BeamProfile::Gaussian { waist_periods, center_offset } = beam {
        if !(*waist_periods > 0.0) || !waist_periods.is_finite() {
            return Err(StateSimError::InvalidBeam { reason: "waist must be positive" });
        }
        if !center_offset.is_finite() {
            return Err(StateSimError::InvalidBeam { reason: "offset must be finite" });
        }
    }
    Ok(())
}

/// Prepared state: amplitude at slit `l(i,j)` proportional to
/// `sqrt(t_ij)` times the beam amplitude there, then normalized.
pub fn generate_state(
    beam: &BeamProfile,
    pattern: &ModulationPattern,
) -> Result<PureState, StateSimError> {
    validate_beam(beam)?;
    let mut amps = [Complex64::ZERO; DIM];
    for l in -4..=4i32 {
        let a = beam.amplitude(l) * pattern.transmission(l).sqrt();
        amps[(l + 4) as usize] = Complex64::new(a, 0.0);
    }
    if amps.iter().all(|a| a.re == 0.0) {
        return Err(StateSimError::DegenerateState);
    }
    Ok(PureState::from_unnormalized(amps)?)
}

/// Preset configurations mimicking three generated states with strongly,
/// moderately and weakly entangled Schmidt spectra. The transmissions
/// put weight (p1, p2, p3) on the Schmidt slits l = -4, 0, 4, giving
/// squared I-concurrence 2(1 - p1^2 - p2^2 - p3^2):
/// preset 1 -> 1.1952, preset 2 -> 0.4500, preset 3 -> 0.2700.
const PRESET_WEIGHTS: [[f64; 3]; 3] = [
    [0.54, 0.28, 0.18],
    [0.87596, 0.06202, 0.06202],
    [0.92868, 0.03566, 0.03566],
];

/// Beam and transmissions for preset `k` in 1..=3.
pub fn canonical_preset(k: usize) -> (BeamProfile, ModulationPattern) {
    assert!((1..=3).contains(&k), "presets are numbered 1..=3");
    let w = PRESET_WEIGHTS[k - 1];
    let mut t = [0.0f64; DIM];
    t[0] = w[0];
    t[4] = w[1];
    t[8] = w[2];
    (BeamProfile::Uniform, ModulationPattern::new(t).expect("preset weights are valid"))
}

/// The three preset states, ordered from most to least entangled.
pub fn canonical_states() -> [PureState; 3] {
    core::array::from_fn(|idx| {
        let (beam, pattern) = canonical_preset(idx + 1);
        generate_state(&beam, &pattern).expect("presets are non-degenerate")
    })
}

#[cfg(test)]
mod tests;
