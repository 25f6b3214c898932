use num_traits::Float;

use super::*;
use crate::mub::build_mub_family;
use crate::qlin::PureState;

#[test]
fn plan_validation() {
    assert!(MeasurementPlan::new(vec![10, 1, 2], Shots::Exact).is_ok());
    assert!(matches!(
        MeasurementPlan::new(vec![0], Shots::Exact),
        Err(MeasureError::BasisOutOfRange { alpha: 0 })
    ));
    assert!(matches!(
        MeasurementPlan::new(vec![11], Shots::Exact),
        Err(MeasureError::BasisOutOfRange { alpha: 11 })
    ));
    assert!(matches!(
        MeasurementPlan::new(vec![3, 3], Shots::Exact),
        Err(MeasureError::DuplicateBasis { alpha: 3 })
    ));
    assert!(matches!(
        MeasurementPlan::new(vec![1], Shots::Count(0)),
        Err(MeasureError::ZeroShots)
    ));
    let canonical = MeasurementPlan::canonical(Shots::Exact);
    assert_eq!(canonical.order(), &[10, 1, 2, 3, 4, 5, 6, 7, 8, 9]);
    assert_eq!(canonical.projector_count(), 90);
}

#[test]
fn maximally_mixed_gives_uniform_probabilities() {
    let mubs = build_mub_family();
    let rho = DensityMatrix::maximally_mixed();
    let plan = MeasurementPlan::canonical(Shots::Exact);
    let records = exact_probabilities(&rho, &plan, &mubs);
    assert_eq!(records.len(), 90);
    for r in &records {
        assert!((r.p_hat - 1.0 / 9.0).abs() < 1e-13);
        assert_eq!(r.shots, Shots::Exact);
        assert_eq!(r.raw_count, None);
    }
}

#[test]
fn maximally_entangled_computational_probabilities() {
    let mubs = build_mub_family();
    let rho = PureState::maximally_entangled().density();
    let plan = MeasurementPlan::new(vec![10], Shots::Exact).unwrap();
    let records = exact_probabilities(&rho, &plan, &mubs);
    let expect = [1.0 / 3.0, 0.0, 0.0, 0.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 1.0 / 3.0];
    for (r, e) in records.iter().zip(expect) {
        assert!((r.p_hat - e).abs() < 1e-14, "({},{}) -> {}", r.alpha, r.m, r.p_hat);
    }
}

#[test]
fn full_basis_records_sum_to_one() {
    let mubs = build_mub_family();
    let mut rng = crate::rng::SplitMix64::new(5);
    let rho = crate::sampling::random_density_matrix(&mut rng, 6);
    let plan = MeasurementPlan::canonical(Shots::Exact);
    let records = exact_probabilities(&rho, &plan, &mubs);
    for chunk in records.chunks(9) {
        let total: f64 = chunk.iter().map(|r| r.p_hat).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn plan_reordering_reorders_records() {
    let mubs = build_mub_family();
    let mut rng = crate::rng::SplitMix64::new(6);
    let rho = crate::sampling::random_density_matrix(&mut rng, 3);
    let fwd = MeasurementPlan::new(vec![2, 7, 10], Shots::Exact).unwrap();
    let rev = MeasurementPlan::new(vec![10, 7, 2], Shots::Exact).unwrap();
    let a = exact_probabilities(&rho, &fwd, &mubs);
    let b = exact_probabilities(&rho, &rev, &mubs);
    // Chunk 0 of the forward plan is chunk 2 of the reversed plan, etc.
    for (fwd_chunk, rev_chunk) in a.chunks(9).zip(b.chunks(9).rev()) {
        assert_eq!(fwd_chunk, rev_chunk);
    }
}

#[test]
fn sampling_requires_finite_shots() {
    let mubs = build_mub_family();
    let rho = DensityMatrix::maximally_mixed();
    let plan = MeasurementPlan::canonical(Shots::Exact);
    assert!(matches!(
        sample_counts(&rho, &plan, &mubs, 1),
        Err(MeasureError::ExactPlanNotSampleable)
    ));
}

#[test]
fn deterministic_and_order_independent_sampling() {
    let mubs = build_mub_family();
    let rho = PureState::maximally_entangled().density();
    let plan_a = MeasurementPlan::new(vec![10, 1], Shots::Count(1000)).unwrap();
    let plan_b = MeasurementPlan::new(vec![1, 10], Shots::Count(1000)).unwrap();
    let a = sample_counts(&rho, &plan_a, &mubs, 99).unwrap();
    let b = sample_counts(&rho, &plan_b, &mubs, 99).unwrap();
    let again = sample_counts(&rho, &plan_a, &mubs, 99).unwrap();
    for (x, y) in a.iter().zip(&again) {
        assert_eq!(x, y);
    }
    // Same (alpha, m) yields the same count regardless of plan order.
    for x in &a {
        let y = b.iter().find(|r| r.alpha == x.alpha && r.m == x.m).unwrap();
        assert_eq!(x.raw_count, y.raw_count);
    }
    let other_seed = sample_counts(&rho, &plan_a, &mubs, 100).unwrap();
    assert!(a.iter().zip(&other_seed).any(|(x, y)| x.raw_count != y.raw_count));
}

#[test]
fn degenerate_probabilities_sample_exactly() {
    let mubs = build_mub_family();
    // |00> measured in the computational basis: p = 1 for m = 1, 0 else.
    let rho = PureState::basis(0, 0).density();
    let plan = MeasurementPlan::new(vec![10], Shots::Count(5000)).unwrap();
    for seed in 0..20 {
        let records = sample_counts(&rho, &plan, &mubs, seed).unwrap();
        assert_eq!(records[0].raw_count, Some(5000));
        for r in &records[1..] {
            assert_eq!(r.raw_count, Some(0));
        }
    }
}

#[test]
fn sampled_mean_tracks_exact_probability() {
    // p = 1/3 with 10^4 shots over 100 seeds: sample mean within
    // 3 sigma / sqrt(100) of p (binomial statistics oracle).
    let mubs = build_mub_family();
    let rho = PureState::maximally_entangled().density();
    let plan = MeasurementPlan::new(vec![10], Shots::Count(10_000)).unwrap();
    let p = 1.0 / 3.0;
    let sigma = (p * (1.0 - p) / 10_000.0).sqrt();
    let mut total = 0.0;
    let seeds = 100;
    for seed in 0..seeds {
        let records = sample_counts(&rho, &plan, &mubs, seed).unwrap();
        total += records[0].p_hat; // the (10, 1) record has p = 1/3
    }
    let mean = total / seeds as f64;
    assert!(
        (mean - p).abs() < 3.0 * sigma / (seeds as f64).sqrt(),
        "mean {mean} vs {p} (sigma {sigma})"
    );
}

#[test]
fn large_shot_estimates_concentrate() {
    // 10^6 shots: max |p_hat - p| over the 90 projectors stays below
    // 5e-3 in at least 99 of 100 seeds.
    let mubs = build_mub_family();
    let rho = PureState::maximally_entangled().density();
    let plan = MeasurementPlan::canonical(Shots::Count(1_000_000));
    let exact = exact_probabilities(
        &rho,
        &MeasurementPlan::canonical(Shots::Exact),
        &mubs,
    );
    let mut ok = 0;
    for seed in 0..100 {
        let sampled = sample_counts(&rho, &plan, &mubs, seed).unwrap();
        let worst = sampled
            .iter()
            .zip(&exact)
            .map(|(s, e)| (s.p_hat - e.p_hat).abs())
            .fold(0.0f64, f64::max);
        if worst < 5e-3 {
            ok += 1;
        }
    }
    assert!(ok >= 99, "only {ok} of 100 seeds concentrated");
}
