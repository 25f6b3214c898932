//! The ten mutually unbiased bases of the two-qutrit Hilbert space.
//!
//! Nine bases come from the standard odd-prime-power construction over
//! GF(9): basis `b` consists of the vectors indexed by `a` with components
//! `3^{-1/2*2} * omega^{tr(a x + b x^2)}` over the rows `x`, where
//! `omega = exp(2 pi i / 3)` and `tr` is the GF(9) -> GF(3) field trace.
//! The tenth basis is the computational (logical) one. Any two vectors
//! from different bases overlap with squared modulus exactly 1/9.
//!
//! The field is modeled as GF(3)[x]/(x^2 + 1); x^2 + 1 is irreducible over
//! GF(3) because -1 is not a square mod 3. Elements enumerate as
//! `c0 + 3*c1`, and that enumeration fixes row order, vector order and
//! basis order once and for all, so the family is identical on every call.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::qlin::{ComplexMatrix, PureState, DIM};

/// Orthonormality / unbiasedness tolerance for a valid family.
pub const MUB_TOL: f64 = 1e-10;

/// Number of bases (d + 1 for d = 9).
pub const BASIS_COUNT: usize = 10;
/// Index of the computational basis in the 1-based `alpha` convention.
pub const COMPUTATIONAL_BASIS: u8 = 10;

/// Element of GF(9) = GF(3)[x]/(x^2 + 1), stored as `c0 + c1 x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf9 {
    c0: u8,
    c1: u8,
}

impl Gf9 {
    pub const ZERO: Gf9 = Gf9 { c0: 0, c1: 0 };
    pub const ONE: Gf9 = Gf9 { c0: 1, c1: 0 };

    pub fn new(c0: u8, c1: u8) -> Self {
        assert!(c0 < 3 && c1 < 3, "coefficients live in GF(3)");
        Self { c0, c1 }
    }

    /// Element number `idx` in the fixed enumeration `c0 + 3*c1`.
    pub fn from_index(idx: usize) -> Self {
        assert!(idx < 9);
        Self { c0: (idx % 3) as u8, c1: (idx / 3) as u8 }
    }

    pub fn index(self) -> usize {
        self.c0 as usize + 3 * self.c1 as usize
    }

    pub fn is_zero(self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }

    pub fn add(self, other: Self) -> Self {
        Self { c0: (self.c0 + other.c0) % 3, c1: (self.c1 + other.c1) % 3 }
    }

    pub fn neg(self) -> Self {
        Self { c0: (3 - self.c0) % 3, c1: (3 - self.c1) % 3 }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    /// Product in GF(9); uses `x^2 = -1`.
    pub fn mul(self, other: Self) -> Self {
        let (a0, a1) = (self.c0 as u16, self.c1 as u16);
        let (b0, b1) = (other.c0 as u16, other.c1 as u16);
        let c0 = (a0 * b0 + 2 * a1 * b1) % 3;
        let c1 = (a0 * b1 + a1 * b0) % 3;
        Self { c0: c0 as u8, c1: c1 as u8 }
    }

    pub fn square(self) -> Self {
        self.mul(self)
    }

    /// Multiplicative inverse; `None` for zero. Uses the field norm:
    /// `(c0 + c1 x)(c0 - c1 x) = c0^2 + c1^2`, nonzero for nonzero input.
    pub fn inv(self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = (self.c0 as u16 * self.c0 as u16 + self.c1 as u16 * self.c1 as u16) % 3;
        // Inverse of the norm in GF(3): 1 -> 1, 2 -> 2.
        let norm_inv = match norm {
            1 => 1u8,
            2 => 2u8,
            _ => unreachable!("norm of a nonzero element is nonzero"),
        };
        let conj = Self { c0: self.c0, c1: (3 - self.c1) % 3 };
        Some(conj.mul(Self { c0: norm_inv, c1: 0 }))
    }

    /// Frobenius image `a^3`.
    pub fn frobenius(self) -> Self {
        self.mul(self).mul(self)
    }
}

impl fmt::Display for Gf9 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}x", self.c0, self.c1)
    }
}

/// Field product, as a free function mirroring the trace.
pub fn gf9_mul(a: Gf9, b: Gf9) -> Gf9 {
    a.mul(b)
}

/// Field trace GF(9) -> GF(3): `tr(a) = a + a^3`, returned as 0, 1 or 2.
pub fn gf9_trace(a: Gf9) -> u8 {
    let t = a.add(a.frobenius());
    debug_assert_eq!(t.c1, 0, "trace lands in the prime field");
    t.c0
}

/// One of the 90 rank-one projectors `|psi_m^(alpha)><psi_m^(alpha)|`.
#[derive(Debug, Clone)]
pub struct Projector {
    pub alpha: u8,
    pub m: u8,
    pub matrix: ComplexMatrix,
}

/// The ten bases, each nine orthonormal vectors.
///
/// `alpha` runs 1..=9 over the field-parameter bases (in enumeration
/// order of `b`) and `alpha = 10` is the computational basis, matching
/// the measurement-order notation used throughout the pipeline.
#[derive(Debug, Clone)]
pub struct MubFamily {
    bases: Vec<[PureState; DIM]>,
}

impl MubFamily {
    /// Basis vectors for `alpha` in 1..=10.
    pub fn basis(&self, alpha: u8) -> &[PureState; DIM] {
        assert!((1..=BASIS_COUNT as u8).contains(&alpha), "basis index out of range");
        &self.bases[alpha as usize - 1]
    }

    /// Vector `m` in 1..=9 of basis `alpha`.
    pub fn vector(&self, alpha: u8, m: u8) -> &PureState {
        assert!((1..=DIM as u8).contains(&m), "vector index out of range");
        &self.basis(alpha)[m as usize - 1]
    }

    pub fn projector(&self, alpha: u8, m: u8) -> Projector {
        Projector { alpha, m, matrix: self.vector(alpha, m).projector() }
    }

    /// All 90 projectors in (alpha, m) order.
    pub fn all_projectors(&self) -> Vec<Projector> {
        let mut out = Vec::with_capacity(BASIS_COUNT * DIM);
        for alpha in 1..=BASIS_COUNT as u8 {
            for m in 1..=DIM as u8 {
                out.push(self.projector(alpha, m));
            }
        }
        out
    }
}

/// Builds the family. Deterministic: same output on every call.
pub fn build_mub_family() -> MubFamily {
    let third = 1.0 / 3.0;
    let sqrt3_half = 3.0f64.sqrt() * 0.5;
    // omega^t for t = 0, 1, 2 with omega = exp(2 pi i / 3).
    let omega = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-0.5, sqrt3_half),
        Complex64::new(-0.5, -sqrt3_half),
    ];

    let mut bases = Vec::with_capacity(BASIS_COUNT);
    for b_idx in 0..DIM {
        let b = Gf9::from_index(b_idx);
        let mut basis = [PureState::basis(0, 0); DIM];
        for a_idx in 0..DIM {
            let a = Gf9::from_index(a_idx);
            let mut amps = [Complex64::ZERO; DIM];
            for x_idx in 0..DIM {
                let x = Gf9::from_index(x_idx);
                let phase = gf9_trace(a.mul(x).add(b.mul(x.square())));
                amps[x_idx] = omega[phase as usize] * third;
            }
            basis[a_idx] = PureState::new(amps).expect("construction is unit norm");
        }
        bases.push(basis);
    }

    let mut computational = [PureState::basis(0, 0); DIM];
    for (k, slot) in computational.iter_mut().enumerate() {
        *slot = PureState::basis(k / 3, k % 3);
    }
    bases.push(computational);

    MubFamily { bases }
}

/// Deviation report from [`verify_mub`].
#[derive(Debug, Clone, Copy)]
pub struct MubReport {
    /// Largest `| <m|n> - delta_mn |` over same-basis pairs.
    pub max_orthonormality_dev: f64,
    /// Largest `| |<m|n>|^2 - 1/9 |` over cross-basis pairs.
    pub max_unbiasedness_dev: f64,
}

impl MubReport {
    pub fn pass(&self) -> bool {
        self.max_orthonormality_dev <= MUB_TOL && self.max_unbiasedness_dev <= MUB_TOL
    }
}

/// Exhaustive orthonormality and unbiasedness check over the family.
pub fn verify_mub(family: &MubFamily) -> MubReport {
    let mut ortho = 0.0f64;
    let mut unbias = 0.0f64;
    let n_bases = family.bases.len();
    for alpha in 0..n_bases {
        for beta in alpha..n_bases {
            for m in 0..DIM {
                for n in 0..DIM {
                    if alpha == beta && n < m {
                        continue;
                    }
                    let overlap = family.bases[alpha][m].inner(&family.bases[beta][n]);
                    if alpha == beta {
                        let delta = if m == n { Complex64::ONE } else { Complex64::ZERO };
                        ortho = ortho.max((overlap - delta).norm());
                    } else {
                        unbias = unbias.max((overlap.norm_sqr() - 1.0 / 9.0).abs());
                    }
                }
            }
        }
    }
    MubReport { max_orthonormality_dev: ortho, max_unbiasedness_dev: unbias }
}
