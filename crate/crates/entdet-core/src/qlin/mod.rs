//! Dense complex linear algebra and bipartite two-qutrit state primitives.
//!
//! Everything is sized for the 9-dimensional Hilbert space of two qutrits
//! with its fixed (3,3) bipartition; matrices are dense row-major and all
//! comparisons are tolerance-based, never exact float equality.

mod eig;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

pub use eig::{eig_hermitian, eig_symmetric, HermitianEig};

/// Total dimension of the two-qutrit space.
pub const DIM: usize = 9;
/// Dimension of each qutrit subsystem.
pub const SUB_DIM: usize = 3;

/// Hermiticity budget enforced when constructing a [`DensityMatrix`].
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Unit-trace budget enforced when constructing a [`DensityMatrix`].
pub const TRACE_TOL: f64 = 1e-12;
/// Most-negative eigenvalue a [`DensityMatrix`] may carry.
pub const PSD_TOL: f64 = -1e-10;
/// Unit-norm budget enforced when constructing a [`PureState`].
pub const NORM_TOL: f64 = 1e-12;

/// Errors from state construction and the linear-algebra kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum QlinError {
    /// Matrix dimensions do not match what the operation requires.
    Dimension { expected: String, got: String },
    /// Input fails the Hermiticity tolerance; carries the max asymmetry
    /// `max_ij |m[i][j] - conj(m[j][i])|`.
    NotHermitian { max_asymmetry: f64 },
    /// Trace differs from one beyond tolerance.
    NotUnitTrace { trace: f64 },
    /// Smallest eigenvalue is below the PSD tolerance.
    NotPositive { lambda_min: f64 },
    /// State vector norm differs from one beyond tolerance.
    NotNormalized { norm_sq: f64 },
    /// Amplitudes are identically zero; no state can be formed.
    ZeroVector,
    /// The Jacobi eigensolver failed to converge.
    EigenNoConvergence { off_diagonal: f64 },
}

impl fmt::Display for QlinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QlinError::Dimension { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            QlinError::NotHermitian { max_asymmetry } => {
                write!(f, "matrix is not Hermitian: max asymmetry {max_asymmetry:.3e}")
            }
            QlinError::NotUnitTrace { trace } => {
                write!(f, "matrix trace {trace:.12} is not 1 within tolerance")
            }
            QlinError::NotPositive { lambda_min } => {
                write!(f, "matrix is not PSD: lambda_min = {lambda_min:.3e}")
            }
            QlinError::NotNormalized { norm_sq } => {
                write!(f, "state norm^2 {norm_sq:.12} is not 1 within tolerance")
            }
            QlinError::ZeroVector => write!(f, "all amplitudes vanish"),
            QlinError::EigenNoConvergence { off_diagonal } => {
                write!(f, "eigensolver did not converge: off-diagonal {off_diagonal:.3e}")
            }
        }
    }
}

impl core::error::Error for QlinError {}

/// Which side of the fixed (3,3) bipartition an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from row-major data; `data.len()` must equal `rows * cols`.
    pub fn from_data(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length mismatch");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn conjugate(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = Complex64::ZERO;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self.get(i, j) * other.get(j, i);
            }
        }
        acc
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise equality within `tol` on the modulus of the difference.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.max_abs_diff(other) <= tol
    }

    /// `max_ij |m[i][j] - conj(m[j][i])|`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self.get(r, c) - self.get(c, r).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Hermitian part `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        debug_assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()) * 0.5
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Kronecker product with row-major block convention: the left factor
/// indexes the slow (subsystem A) axis.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |r, c| {
        a.get(r / br, c / bc) * b.get(r % br, c % bc)
    })
}

/// Pure state of the two-qutrit system: nine amplitudes indexed by
/// `(i, j)` in `{0,1,2}^2`, stored at logical index `3i + j`.
///
/// The slit label `l` of the physical encoding relates to the logical
/// pair through `l = 3i + j - 4`, so `l` runs over `-4..=4`; `l` is kept
/// for display and CLI input ordering only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amps: [Complex64; DIM],
}

impl PureState {
    /// Accepts amplitudes that are already normalized within [`NORM_TOL`].
    pub fn new(amps: [Complex64; DIM]) -> Result<Self, QlinError> {
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(QlinError::NotNormalized { norm_sq });
        }
        Ok(Self { amps })
    }

    /// No validation; for tests that need deliberately broken states.
    #[cfg(test)]
    pub(crate) fn new_unchecked(amps: [Complex64; DIM]) -> Self {
        Self { amps }
    }

    /// Normalizes arbitrary amplitudes; fails on the zero vector.
    pub fn from_unnormalized(amps: [Complex64; DIM]) -> Result<Self, QlinError> {
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(QlinError::ZeroVector);
        }
        let inv = 1.0 / norm_sq.sqrt();
        let mut out = amps;
        for a in &mut out {
            *a *= inv;
        }
        Ok(Self { amps: out })
    }

    /// Computational basis state `|ij>`.
    pub fn basis(i: usize, j: usize) -> Self {
        assert!(i < SUB_DIM && j < SUB_DIM);
        let mut amps = [Complex64::ZERO; DIM];
        amps[3 * i + j] = Complex64::ONE;
        Self { amps }
    }

    /// Product state `|a> ⊗ |b>` from two qutrit vectors (normalized here).
    pub fn product(a: [Complex64; SUB_DIM], b: [Complex64; SUB_DIM]) -> Result<Self, QlinError> {
        let mut amps = [Complex64::ZERO; DIM];
        for i in 0..SUB_DIM {
            for j in 0..SUB_DIM {
                amps[3 * i + j] = a[i] * b[j];
            }
        }
        Self::from_unnormalized(amps)
    }

    /// Maximally entangled state `(|00> + |11> + |22>)/sqrt(3)`.
    pub fn maximally_entangled() -> Self {
        let v = Complex64::new(1.0 / 3.0f64.sqrt(), 0.0);
        let mut amps = [Complex64::ZERO; DIM];
        amps[0] = v;
        amps[4] = v;
        amps[8] = v;
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[Complex64; DIM] {
        &self.amps
    }

    /// Amplitude at logical pair `(i, j)`.
    pub fn amp(&self, i: usize, j: usize) -> Complex64 {
        self.amps[3 * i + j]
    }

    /// Amplitude at slit label `l` in `-4..=4` (`l = 3i + j - 4`).
    pub fn amp_slit(&self, l: i32) -> Complex64 {
        assert!((-4..=4).contains(&l));
        self.amps[(l + 4) as usize]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Rank-one projector `|psi><psi|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(DIM, DIM, |r, c| self.amps[r] * self.amps[c].conj())
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { mat: self.projector() }
    }

    /// Fixes the global phase so the first amplitude with modulus above
    /// `1e-12` is real and positive.
    pub fn with_fixed_phase(&self) -> Self {
        let mut out = *self;
        if let Some(a) = out.amps.iter().find(|a| a.norm() > 1e-12) {
            let phase = a / a.norm();
            let corr = phase.conj();
            for v in &mut out.amps {
                *v *= corr;
            }
        }
        out
    }

    /// Largest `|a_k - b_k|` after no phase adjustment.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Density operator of the two-qutrit system: 9x9, Hermitian, unit trace,
/// positive semidefinite, with the fixed (3,3) bipartition.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates all invariants; rejects anything outside the tolerances.
    pub fn new(mat: ComplexMatrix) -> Result<Self, QlinError> {
        if mat.rows() != DIM || mat.cols() != DIM {
            return Err(QlinError::Dimension {
                expected: String::from("9x9"),
                got: alloc::format!("{}x{}", mat.rows(), mat.cols()),
            });
        }
        let asym = mat.hermitian_asymmetry();
        if asym > HERMITICITY_TOL {
            return Err(QlinError::NotHermitian { max_asymmetry: asym });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(QlinError::NotUnitTrace { trace: tr.re });
        }
        let eig = eig_hermitian(&mat)?;
        let lambda_min = eig.values[0];
        if lambda_min < PSD_TOL {
            return Err(QlinError::NotPositive { lambda_min });
        }
        Ok(Self { mat })
    }

    /// Repairs small numerical violations: takes the Hermitian part,
    /// clips negative eigenvalues to zero and renormalizes the trace.
    /// Fails only when nothing positive remains.
    pub fn project(mat: &ComplexMatrix) -> Result<Self, QlinError> {
        if mat.rows() != DIM || mat.cols() != DIM {
            return Err(QlinError::Dimension {
                expected: String::from("9x9"),
                got: alloc::format!("{}x{}", mat.rows(), mat.cols()),
            });
        }
        let herm = mat.hermitian_part();
        let eig = eig_hermitian(&herm)?;
        let clipped: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(QlinError::NotPositive { lambda_min: eig.values[0] });
        }
        let mut out = ComplexMatrix::zeros(DIM, DIM);
        for (k, &lam) in clipped.iter().enumerate() {
            if lam == 0.0 {
                continue;
            }
            let w = lam / total;
            for r in 0..DIM {
                let vr = eig.vectors.get(r, k);
                for c in 0..DIM {
                    let add = vr * eig.vectors.get(c, k).conj() * w;
                    out.set(r, c, out.get(r, c) + add);
                }
            }
        }
        // Exact Hermitian symmetrization mops up rounding from the sum.
        let out = out.hermitian_part();
        Ok(Self { mat: out })
    }

    pub fn maximally_mixed() -> Self {
        Self { mat: ComplexMatrix::identity(DIM).scale(Complex64::new(1.0 / DIM as f64, 0.0)) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn purity(&self) -> f64 {
        self.mat.trace_product(&self.mat).re
    }

    pub fn lambda_min(&self) -> f64 {
        // Construction already proved convergence on this matrix.
        eig_hermitian(&self.mat).expect("validated Hermitian").values[0]
    }

    pub fn partial_trace(&self, subsystem: Subsystem) -> ComplexMatrix {
        partial_trace(self, subsystem)
    }

    pub fn partial_transpose(&self) -> ComplexMatrix {
        partial_transpose_mat(&self.mat)
    }
}

/// Marginal `rho_A` or `rho_B` of a two-qutrit density operator.
pub fn partial_trace(rho: &DensityMatrix, subsystem: Subsystem) -> ComplexMatrix {
    let m = rho.matrix();
    ComplexMatrix::from_fn(SUB_DIM, SUB_DIM, |r, c| {
        let mut acc = Complex64::ZERO;
        for k in 0..SUB_DIM {
            acc += match subsystem {
                Subsystem::A => m.get(SUB_DIM * r + k, SUB_DIM * c + k),
                Subsystem::B => m.get(SUB_DIM * k + r, SUB_DIM * k + c),
            };
        }
        acc
    })
}

/// Transpose on subsystem B of a 9x9 matrix in the (3,3) bipartition:
/// `out[3i+j, 3i'+j'] = in[3i+j', 3i'+j]`.
pub fn partial_transpose_mat(m: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!((m.rows(), m.cols()), (DIM, DIM), "partial transpose needs 9x9");
    ComplexMatrix::from_fn(DIM, DIM, |r, c| {
        let (i, j) = (r / SUB_DIM, r % SUB_DIM);
        let (ip, jp) = (c / SUB_DIM, c % SUB_DIM);
        m.get(SUB_DIM * i + jp, SUB_DIM * ip + j)
    })
}

/// Partial transpose of a density operator (acts on subsystem B).
pub fn partial_transpose(rho: &DensityMatrix) -> ComplexMatrix {
    rho.partial_transpose()
}

/// Jozsa fidelity for a pure target: `<psi| rho |psi>`, clamped to [0, 1].
pub fn fidelity_pure(target: &PureState, rho: &DensityMatrix) -> f64 {
    let amps = target.amplitudes();
    let m = rho.matrix();
    let mut acc = Complex64::ZERO;
    for r in 0..DIM {
        for c in 0..DIM {
            acc += amps[r].conj() * m.get(r, c) * amps[c];
        }
    }
    acc.re.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests;
