use num_complex::Complex64;

use super::*;
use crate::qlin::eig_hermitian;
use crate::rng::SplitMix64;
use crate::sampling::random_hermitian;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn diag(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |r, col| {
        if r == col {
            c(values[r], 0.0)
        } else {
            Complex64::ZERO
        }
    })
}

fn scalar(v: f64) -> ComplexMatrix {
    diag(&[v])
}

/// `min tr(H X)` over unit-trace PSD `X` equals the smallest eigenvalue.
fn lambda_min_via_sdp(h: &ComplexMatrix, field: BlockField) -> SdpSolution {
    let mut p = SdpProblem::new(Sense::Minimize);
    let x = p.add_block(h.rows(), field);
    p.set_objective(x, h.clone()).unwrap();
    p.add_constraint(vec![(x, ComplexMatrix::identity(h.rows()))], Relation::Eq, 1.0)
        .unwrap();
    p.solve().unwrap()
}

#[test]
fn trace_one_minimization_picks_smallest_eigenvalue() {
    let sol = lambda_min_via_sdp(&diag(&[1.0, 2.0]), BlockField::RealSymmetric);
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.objective_value - 1.0).abs() < 1e-7);
    let x = &sol.primal_blocks[0];
    assert!((x.get(0, 0).re - 1.0).abs() < 1e-6);
    assert!(x.get(1, 1).re.abs() < 1e-6);
}

#[test]
fn lmi_form_reaches_smallest_eigenvalue() {
    // max t s.t. A - t I >= 0 for A = diag(3, -1), written with an
    // explicit slack block S = A - t I and entrywise equality constraints.
    let a = [[3.0, 0.0], [0.0, -1.0]];
    let mut p = SdpProblem::new(Sense::Maximize);
    let s = p.add_block(2, BlockField::RealSymmetric);
    let t_plus = p.add_block(1, BlockField::RealSymmetric);
    let t_minus = p.add_block(1, BlockField::RealSymmetric);
    p.set_objective(t_plus, scalar(1.0)).unwrap();
    p.set_objective(t_minus, scalar(-1.0)).unwrap();
    for r in 0..2 {
        for col in r..2 {
            let mut e = ComplexMatrix::zeros(2, 2);
            if r == col {
                e.set(r, col, Complex64::ONE);
            } else {
                e.set(r, col, c(0.5, 0.0));
                e.set(col, r, c(0.5, 0.0));
            }
            let mut terms = vec![(s, e)];
            if r == col {
                terms.push((t_plus, scalar(1.0)));
                terms.push((t_minus, scalar(-1.0)));
            }
            p.add_constraint(terms, Relation::Eq, a[r][col]).unwrap();
        }
    }
    let sol = p.solve().unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.objective_value - (-1.0)).abs() < 1e-7, "got {}", sol.objective_value);
}

#[test]
fn sdp_matches_eigensolver_on_random_hermitian() {
    let mut rng = SplitMix64::new(2024);
    for n in [2usize, 3, 9, 18] {
        let h = random_hermitian(&mut rng, n);
        let sol = lambda_min_via_sdp(&h, BlockField::ComplexHermitian);
        assert_eq!(sol.status, SdpStatus::Optimal, "dim {n}");
        let eig = eig_hermitian(&h).unwrap();
        assert!(
            (sol.objective_value - eig.values[0]).abs() < 1e-7,
            "dim {n}: sdp {} vs eig {}",
            sol.objective_value,
            eig.values[0]
        );
    }
}

#[test]
fn complex_block_with_off_diagonal_phase() {
    // H = [[2, i], [-i, 2]] has eigenvalues 1 and 3.
    let mut h = ComplexMatrix::zeros(2, 2);
    h.set(0, 0, c(2.0, 0.0));
    h.set(1, 1, c(2.0, 0.0));
    h.set(0, 1, c(0.0, 1.0));
    h.set(1, 0, c(0.0, -1.0));
    let sol = lambda_min_via_sdp(&h, BlockField::ComplexHermitian);
    assert!((sol.objective_value - 1.0).abs() < 1e-7);
    // And the maximizing direction for `max` gives the top eigenvalue.
    let mut p = SdpProblem::new(Sense::Maximize);
    let x = p.add_block(2, BlockField::ComplexHermitian);
    p.set_objective(x, h).unwrap();
    p.add_constraint(vec![(x, ComplexMatrix::identity(2))], Relation::Eq, 1.0).unwrap();
    let sol = p.solve().unwrap();
    assert!((sol.objective_value - 3.0).abs() < 1e-7);
}

#[test]
fn solution_invariants_hold_at_optimum() {
    let mut rng = SplitMix64::new(7);
    let h = random_hermitian(&mut rng, 9);
    let sol = lambda_min_via_sdp(&h, BlockField::ComplexHermitian);
    assert_eq!(sol.status, SdpStatus::Optimal);
    // Primal block PSD within tolerance.
    let eig = eig_hermitian(&sol.primal_blocks[0]).unwrap();
    assert!(eig.values[0] >= -1e-8);
    // Constraint satisfied within tolerance.
    assert!((sol.primal_blocks[0].trace().re - 1.0).abs() <= 1e-7);
    // Gap bound.
    assert!(sol.duality_gap <= 1e-7 * (1.0 + sol.objective_value.abs()));
}

#[test]
fn weak_duality_along_the_path() {
    // Once an iterate is feasible on both sides, its dual objective can
    // never exceed the primal one (minimization form).
    let mut rng = SplitMix64::new(8);
    let h = random_hermitian(&mut rng, 5);
    let sol = lambda_min_via_sdp(&h, BlockField::ComplexHermitian);
    for it in &sol.iterates {
        if it.primal_residual <= 1e-9 && it.dual_residual <= 1e-9 {
            assert!(it.dual_objective <= it.primal_objective + 1e-9);
        }
    }
}

#[test]
fn redundant_constraint_changes_nothing() {
    let h = diag(&[2.0, -0.5, 1.0]);
    let base = lambda_min_via_sdp(&h, BlockField::RealSymmetric);

    let mut p = SdpProblem::new(Sense::Minimize);
    let x = p.add_block(3, BlockField::RealSymmetric);
    p.set_objective(x, h).unwrap();
    p.add_constraint(vec![(x, ComplexMatrix::identity(3))], Relation::Eq, 1.0).unwrap();
    // The same hyperplane again: harmless, if numerically annoying.
    p.add_constraint(vec![(x, ComplexMatrix::identity(3))], Relation::Eq, 1.0).unwrap();
    let doubled = p.solve().unwrap();
    assert_eq!(doubled.status, SdpStatus::Optimal);
    assert!((doubled.objective_value - base.objective_value).abs() < 1e-6);
}

#[test]
fn inequalities_lower_to_slack_blocks() {
    // max tr(diag(1,2) X) s.t. tr X <= 1: pushes all weight on the top
    // eigenvalue, optimum 2.
    let mut p = SdpProblem::new(Sense::Maximize);
    let x = p.add_block(2, BlockField::RealSymmetric);
    p.set_objective(x, diag(&[1.0, 2.0])).unwrap();
    p.add_constraint(vec![(x, ComplexMatrix::identity(2))], Relation::Le, 1.0).unwrap();
    let sol = p.solve().unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.objective_value - 2.0).abs() < 1e-6);

    // min tr(diag(1,2) X) s.t. tr X >= 1: optimum 1.
    let mut p = SdpProblem::new(Sense::Minimize);
    let x = p.add_block(2, BlockField::RealSymmetric);
    p.set_objective(x, diag(&[1.0, 2.0])).unwrap();
    p.add_constraint(vec![(x, ComplexMatrix::identity(2))], Relation::Ge, 1.0).unwrap();
    let sol = p.solve().unwrap();
    assert!((sol.objective_value - 1.0).abs() < 1e-6);
}

#[test]
fn contradictory_traces_detected_infeasible() {
    let mut p = SdpProblem::new(Sense::Minimize);
    let x = p.add_block(3, BlockField::RealSymmetric);
    p.set_objective(x, diag(&[1.0, 1.0, 1.0])).unwrap();
    p.add_constraint(vec![(x, ComplexMatrix::identity(3))], Relation::Eq, 1.0).unwrap();
    p.add_constraint(vec![(x, ComplexMatrix::identity(3))], Relation::Eq, 2.0).unwrap();
    let sol = p.solve().unwrap();
    match sol.status {
        SdpStatus::Infeasible { certificate } => assert!(certificate > 1e-6),
        other => panic!("expected infeasible, got {other:?}"),
    }
}

#[test]
fn conflicting_probability_band_detected_infeasible() {
    // tr X = 1 with tr(diag(1,0,0) X) >= 0.9 and <= 0.1 cannot hold.
    let mut p = SdpProblem::new(Sense::Minimize);
    let x = p.add_block(3, BlockField::RealSymmetric);
    p.set_objective(x, diag(&[1.0, 2.0, 3.0])).unwrap();
    p.add_constraint(vec![(x, ComplexMatrix::identity(3))], Relation::Eq, 1.0).unwrap();
    let e00 = diag(&[1.0, 0.0, 0.0]);
    p.add_constraint(vec![(x, e00.clone())], Relation::Ge, 0.9).unwrap();
    p.add_constraint(vec![(x, e00)], Relation::Le, 0.1).unwrap();
    let sol = p.solve().unwrap();
    match sol.status {
        SdpStatus::Infeasible { certificate } => assert!(certificate > 0.1),
        other => panic!("expected infeasible, got {other:?}"),
    }
}

#[test]
fn deterministic_resolves() {
    let mut rng = SplitMix64::new(99);
    let h = random_hermitian(&mut rng, 6);
    let a = lambda_min_via_sdp(&h, BlockField::ComplexHermitian);
    let b = lambda_min_via_sdp(&h, BlockField::ComplexHermitian);
    assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn coefficient_validation() {
    let mut p = SdpProblem::new(Sense::Minimize);
    let x = p.add_block(2, BlockField::RealSymmetric);
    // Wrong shape.
    assert!(matches!(
        p.set_objective(x, ComplexMatrix::identity(3)),
        Err(SdpError::CoefficientShape { .. })
    ));
    // Asymmetric.
    let mut bad = ComplexMatrix::zeros(2, 2);
    bad.set(0, 1, c(1.0, 0.0));
    assert!(matches!(
        p.set_objective(x, bad),
        Err(SdpError::CoefficientAsymmetric { .. })
    ));
    // Complex entries on a real block.
    let mut cplx = ComplexMatrix::zeros(2, 2);
    cplx.set(0, 1, c(0.0, 1.0));
    cplx.set(1, 0, c(0.0, -1.0));
    assert!(matches!(
        p.set_objective(x, cplx),
        Err(SdpError::CoefficientNotReal { .. })
    ));
    // No constraints.
    assert!(matches!(p.solve(), Err(SdpError::NoConstraints)));
}

#[test]
fn json_dump_has_schema_fields() {
    let mut p = SdpProblem::new(Sense::Minimize);
    let x = p.add_block(2, BlockField::ComplexHermitian);
    p.set_objective(x, ComplexMatrix::identity(2)).unwrap();
    p.add_constraint(vec![(x, ComplexMatrix::identity(2))], Relation::Eq, 1.0).unwrap();
    let json = p.to_json();
    for needle in [
        "\"sense\":\"min\"",
        "\"blocks\":[{\"dim\":2,\"field\":\"complex-hermitian\"}]",
        "\"rows\":2",
        "\"relation\":\"=\"",
        "\"rhs\":1",
    ] {
        assert!(json.contains(needle), "missing {needle} in {json}");
    }
}
