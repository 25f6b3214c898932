use num_complex::Complex64;

use super::*;
use crate::rng::SplitMix64;
use crate::sampling::{random_density_matrix, random_hermitian, random_pure_state};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_complex_matrix(rng: &mut SplitMix64, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.next_normal(), rng.next_normal()))
}

#[test]
fn kron_identity_blocks() {
    let i3 = ComplexMatrix::identity(3);
    assert!(kron(&i3, &i3).approx_eq(&ComplexMatrix::identity(9), 0.0));
}

#[test]
fn kron_places_basis_projectors() {
    let mut a = ComplexMatrix::zeros(3, 3);
    a.set(0, 0, Complex64::ONE); // |0><0| on A
    let mut b = ComplexMatrix::zeros(3, 3);
    b.set(1, 1, Complex64::ONE); // |1><1| on B
    let k = kron(&a, &b);
    for r in 0..9 {
        for col in 0..9 {
            let expect = if r == 1 && col == 1 { 1.0 } else { 0.0 }; // |01> = index 1
            assert_eq!(k.get(r, col), c(expect, 0.0));
        }
    }
}

#[test]
fn kron_matches_entrywise_definition() {
    // Brute-force oracle: (a ⊗ b)[3i+k, 3j+l] = a[i,j] b[k,l].
    let mut rng = SplitMix64::new(11);
    let a = random_complex_matrix(&mut rng, 3, 3);
    let b = random_complex_matrix(&mut rng, 3, 3);
    let k = kron(&a, &b);
    for i in 0..3 {
        for j in 0..3 {
            for p in 0..3 {
                for q in 0..3 {
                    let expect = a.get(i, j) * b.get(p, q);
                    assert!((k.get(3 * i + p, 3 * j + q) - expect).norm() < 1e-15);
                }
            }
        }
    }
}

#[test]
fn partial_trace_of_maximally_mixed() {
    let rho = DensityMatrix::maximally_mixed();
    let third = ComplexMatrix::identity(3).scale(c(1.0 / 3.0, 0.0));
    assert!(partial_trace(&rho, Subsystem::A).approx_eq(&third, 1e-14));
    assert!(partial_trace(&rho, Subsystem::B).approx_eq(&third, 1e-14));
}

#[test]
fn partial_trace_of_maximally_entangled() {
    // Direct-expansion oracle: rho_A[i][i'] = sum_j a_ij conj(a_i'j).
    let psi = PureState::maximally_entangled();
    let rho = psi.density();
    let got = partial_trace(&rho, Subsystem::A);
    let oracle = ComplexMatrix::from_fn(3, 3, |i, ip| {
        (0..3).map(|j| psi.amp(i, j) * psi.amp(ip, j).conj()).sum()
    });
    assert!(got.approx_eq(&oracle, 1e-14));
    let third = ComplexMatrix::identity(3).scale(c(1.0 / 3.0, 0.0));
    assert!(got.approx_eq(&third, 1e-14));
}

#[test]
fn partial_trace_of_product_state() {
    let zero = [Complex64::ONE, Complex64::ZERO, Complex64::ZERO];
    let plus = [Complex64::ONE; 3];
    let psi = PureState::product(zero, plus).unwrap();
    let got = partial_trace(&psi.density(), Subsystem::A);
    let mut expect = ComplexMatrix::zeros(3, 3);
    expect.set(0, 0, Complex64::ONE);
    assert!(got.approx_eq(&expect, 1e-14));
}

#[test]
fn partial_transpose_of_product_state_is_psd() {
    let mut rng = SplitMix64::new(3);
    for _ in 0..10 {
        let psi = crate::sampling::random_product_state(&mut rng);
        let pt = psi.density().partial_transpose();
        let eig = eig_hermitian(&pt).unwrap();
        assert!(eig.values[0] >= -1e-10, "lambda_min {}", eig.values[0]);
    }
}

#[test]
fn partial_transpose_of_maximally_entangled() {
    // Oracle: expand phi+ PT entrywise and eigendecompose that copy.
    let psi = PureState::maximally_entangled();
    let rho = psi.density();
    let mut expanded = ComplexMatrix::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            for ip in 0..3 {
                for jp in 0..3 {
                    // <ij| rho^Gamma |i'j'> = <ij'| rho |i'j>
                    let v = psi.amp(i, jp) * psi.amp(ip, j).conj();
                    expanded.set(3 * i + j, 3 * ip + jp, v);
                }
            }
        }
    }
    let got = rho.partial_transpose();
    assert!(got.approx_eq(&expanded, 1e-15));
    let eig = eig_hermitian(&expanded).unwrap();
    assert!((eig.values[0] - (-1.0 / 3.0)).abs() < 1e-12);
}

#[test]
fn partial_transpose_fixes_maximally_mixed() {
    let rho = DensityMatrix::maximally_mixed();
    assert!(rho.partial_transpose().approx_eq(rho.matrix(), 0.0));
}

#[test]
fn partial_transpose_involution_and_trace() {
    let mut rng = SplitMix64::new(17);
    for _ in 0..10 {
        let rho = random_density_matrix(&mut rng, 9);
        let pt = rho.partial_transpose();
        let back = partial_transpose_mat(&pt);
        assert!(back.approx_eq(rho.matrix(), 1e-12));
        assert!((pt.trace() - rho.matrix().trace()).norm() < 1e-12);
    }
}

#[test]
fn marginals_are_states() {
    let mut rng = SplitMix64::new(23);
    for _ in 0..10 {
        let rho = random_density_matrix(&mut rng, 4);
        for sub in [Subsystem::A, Subsystem::B] {
            let marginal = partial_trace(&rho, sub);
            assert!((marginal.trace().re - 1.0).abs() < 1e-12);
            assert!(marginal.hermitian_asymmetry() < 1e-13);
            // Embed into a 3x3 eigenproblem via the Hermitian solver.
            let eig = eig_hermitian(&marginal).unwrap();
            assert!(eig.values[0] >= -1e-10);
        }
    }
}

#[test]
fn eig_of_small_diagonal() {
    let mut h = ComplexMatrix::zeros(2, 2);
    h.set(0, 0, c(3.0, 0.0));
    h.set(1, 1, c(-1.0, 0.0));
    let eig = eig_hermitian(&h).unwrap();
    assert!((eig.values[0] + 1.0).abs() < 1e-14);
    assert!((eig.values[1] - 3.0).abs() < 1e-14);
}

#[test]
fn eig_of_identity() {
    let eig = eig_hermitian(&ComplexMatrix::identity(9)).unwrap();
    for v in &eig.values {
        assert!((v - 1.0).abs() < 1e-14);
    }
    // Eigenvectors stay orthonormal even in the fully degenerate case.
    for a in 0..9 {
        for b in 0..9 {
            let dot: Complex64 = (0..9)
                .map(|r| eig.vectors.get(r, a).conj() * eig.vectors.get(r, b))
                .sum();
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!((dot - c(expect, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn eig_reconstructs_random_hermitian() {
    let mut rng = SplitMix64::new(31);
    for n in [2usize, 5, 9, 18] {
        for _ in 0..5 {
            let h = random_hermitian(&mut rng, n);
            let eig = eig_hermitian(&h).unwrap();
            assert!(eig.reconstruct().max_abs_diff(&h) < 1e-9);
            // Residual per pair and Gram orthonormality.
            for k in 0..n {
                let v = eig.vector(k);
                let mut residual = 0.0f64;
                for r in 0..n {
                    let mut hv = Complex64::ZERO;
                    for col in 0..n {
                        hv += h.get(r, col) * v[col];
                    }
                    residual += (hv - v[r] * eig.values[k]).norm_sqr();
                }
                assert!(residual.sqrt() < 1e-9, "residual {}", residual.sqrt());
            }
            for a in 0..n {
                for b in 0..n {
                    let dot: Complex64 = (0..n)
                        .map(|r| eig.vectors.get(r, a).conj() * eig.vectors.get(r, b))
                        .sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - c(expect, 0.0)).norm() < 1e-9);
                }
            }
            // Eigenvalue sum equals the trace.
            let sum: f64 = eig.values.iter().sum();
            assert!((sum - h.trace().re).abs() < 1e-9);
            // Ascending order.
            for w in eig.values.windows(2) {
                assert!(w[0] <= w[1] + 1e-15);
            }
        }
    }
}

#[test]
fn eig_rejects_non_hermitian() {
    let mut h = ComplexMatrix::identity(3);
    h.set(0, 1, c(0.5, 0.0)); // asymmetric: (1,0) stays zero
    match eig_hermitian(&h) {
        Err(QlinError::NotHermitian { max_asymmetry }) => {
            assert!((max_asymmetry - 0.5).abs() < 1e-15);
        }
        other => panic!("expected NotHermitian, got {other:?}"),
    }
}

#[test]
fn fidelity_endpoints() {
    let mut rng = SplitMix64::new(41);
    let psi = random_pure_state(&mut rng);
    assert!((fidelity_pure(&psi, &psi.density()) - 1.0).abs() < 1e-12);

    let zero = [Complex64::ONE, Complex64::ZERO, Complex64::ZERO];
    let one = [Complex64::ZERO, Complex64::ONE, Complex64::ZERO];
    let a = PureState::product(zero, zero).unwrap();
    let b = PureState::product(one, one).unwrap();
    assert!(fidelity_pure(&a, &b.density()) < 1e-15);
}

#[test]
fn fidelity_of_maximally_entangled_against_mixed() {
    // Trace-expansion oracle: <phi|I/9|phi> = 1/9 exactly.
    let psi = PureState::maximally_entangled();
    let f = fidelity_pure(&psi, &DensityMatrix::maximally_mixed());
    assert!((f - 1.0 / 9.0).abs() < 1e-14);
}

#[test]
fn density_matrix_rejects_bad_inputs() {
    // Wrong size.
    assert!(matches!(
        DensityMatrix::new(ComplexMatrix::identity(3)),
        Err(QlinError::Dimension { .. })
    ));
    // Non-unit trace.
    assert!(matches!(
        DensityMatrix::new(ComplexMatrix::identity(9)),
        Err(QlinError::NotUnitTrace { .. })
    ));
    // Non-Hermitian.
    let mut m = ComplexMatrix::identity(9).scale(c(1.0 / 9.0, 0.0));
    m.set(0, 1, c(0.1, 0.0));
    assert!(matches!(DensityMatrix::new(m), Err(QlinError::NotHermitian { .. })));
    // Indefinite.
    let mut m = ComplexMatrix::zeros(9, 9);
    m.set(0, 0, c(1.1, 0.0));
    m.set(1, 1, c(-0.1, 0.0));
    assert!(matches!(DensityMatrix::new(m), Err(QlinError::NotPositive { .. })));
}

#[test]
fn density_projection_repairs_small_violations() {
    let mut m = ComplexMatrix::zeros(9, 9);
    for i in 0..9 {
        m.set(i, i, c(1.0 / 9.0, 0.0));
    }
    m.set(0, 0, c(1.0 / 9.0 + 3e-8, 0.0));
    m.set(1, 1, c(1.0 / 9.0 - 5e-8, 0.0));
    let rho = DensityMatrix::project(&m).unwrap();
    assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
    assert!(rho.lambda_min() >= 0.0);
    assert!(rho.matrix().max_abs_diff(DensityMatrix::maximally_mixed().matrix()) < 1e-7);
}

#[test]
fn pure_state_validation() {
    let mut amps = [Complex64::ZERO; 9];
    amps[0] = c(0.9, 0.0);
    assert!(matches!(PureState::new(amps), Err(QlinError::NotNormalized { .. })));
    let st = PureState::from_unnormalized(amps).unwrap();
    assert!((st.amplitudes()[0] - Complex64::ONE).norm() < 1e-15);
    assert!(matches!(
        PureState::from_unnormalized([Complex64::ZERO; 9]),
        Err(QlinError::ZeroVector)
    ));
}

#[test]
fn slit_relabeling_follows_fixed_map() {
    // l = 3i + j - 4: slit -4 is |00>, slit 0 is |11>, slit 4 is |22>.
    let psi = PureState::maximally_entangled();
    let v = 1.0 / 3.0f64.sqrt();
    assert!((psi.amp_slit(-4).re - v).abs() < 1e-15);
    assert!((psi.amp_slit(0).re - v).abs() < 1e-15);
    assert!((psi.amp_slit(4).re - v).abs() < 1e-15);
    assert!(psi.amp_slit(-3).norm() < 1e-15);
}
