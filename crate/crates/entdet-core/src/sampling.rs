//! Random states and matrices for tests, calibration runs and benchmarks.
//!
//! All draws go through [`SplitMix64`](crate::rng::SplitMix64), so every
//! randomized check is reproducible from its seed.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::qlin::{ComplexMatrix, DensityMatrix, PureState, DIM, SUB_DIM};
use crate::rng::SplitMix64;

fn gaussian_complex(rng: &mut SplitMix64) -> Complex64 {
    Complex64::new(rng.next_normal(), rng.next_normal())
}

/// Haar-random pure state of the full 9-dimensional space.
pub fn random_pure_state(rng: &mut SplitMix64) -> PureState {
    let mut amps = [Complex64::ZERO; DIM];
    for a in &mut amps {
        *a = gaussian_complex(rng);
    }
    PureState::from_unnormalized(amps).expect("gaussian draw is nonzero")
}

/// Haar-random product state `|a> ⊗ |b>`.
pub fn random_product_state(rng: &mut SplitMix64) -> PureState {
    let mut a = [Complex64::ZERO; SUB_DIM];
    let mut b = [Complex64::ZERO; SUB_DIM];
    for v in &mut a {
        *v = gaussian_complex(rng);
    }
    for v in &mut b {
        *v = gaussian_complex(rng);
    }
    PureState::product(a, b).expect("gaussian draw is nonzero")
}

/// Random density matrix from a Ginibre factor of the given rank.
pub fn random_density_matrix(rng: &mut SplitMix64, rank: usize) -> DensityMatrix {
    let rank = rank.clamp(1, DIM);
    let g = ComplexMatrix::from_fn(DIM, rank, |_, _| gaussian_complex(rng));
    let gram = g.matmul(&g.adjoint());
    let tr = gram.trace().re;
    let mat = gram.scale(Complex64::new(1.0 / tr, 0.0)).hermitian_part();
    DensityMatrix::project(&mat).expect("Ginibre gram matrix is PSD")
}

/// Random separable density matrix: a mixture of product projectors.
pub fn random_separable_density(rng: &mut SplitMix64, terms: usize) -> DensityMatrix {
    let terms = terms.max(1);
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.next_f64() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut mat = ComplexMatrix::zeros(DIM, DIM);
    for &w in &weights {
        let p = random_product_state(rng).projector();
        mat = mat.add(&p.scale(Complex64::new(w, 0.0)));
    }
    DensityMatrix::project(&mat).expect("mixture of projectors is PSD")
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian(rng: &mut SplitMix64, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian_complex(rng));
    g.hermitian_part()
}
