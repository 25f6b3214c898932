//! Hermitian eigendecomposition via cyclic Jacobi on the real-symmetric
//! embedding.
//!
//! A Hermitian `H = A + iB` maps to the symmetric `2n x 2n` real matrix
//! `[[A, -B], [B, A]]` whose spectrum is that of `H` with every eigenvalue
//! doubled. Jacobi sweeps diagonalize the embedding; complex eigenvectors
//! are then recovered from the real pairs `(x; y) -> x + iy`, dropping the
//! duplicate `i*v` partners by Gram-Schmidt. Problem sizes here never
//! exceed 18x18 complex, so the O(n^3)-per-sweep cost is irrelevant.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::{ComplexMatrix, QlinError};

/// Hermiticity budget accepted by [`eig_hermitian`].
pub const EIG_HERMITICITY_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix.
///
/// `values` are ascending; column `k` of `vectors` is the unit eigenvector
/// for `values[k]`, phase-fixed so its first component above `1e-12` in
/// modulus is real positive.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.rows()).map(|r| self.vectors.get(r, k)).collect()
    }

    /// `V diag(values) V†`, for reconstruction checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        ComplexMatrix::from_fn(n, n, |r, c| {
            let mut acc = Complex64::ZERO;
            for k in 0..n {
                acc += self.vectors.get(r, k) * self.vectors.get(c, k).conj() * self.values[k];
            }
            acc
        })
    }
}

/// Cyclic Jacobi on a dense symmetric matrix given in row-major order.
///
/// Returns eigenvalues ascending and the eigenvector matrix `v` stored
/// row-major with eigenvectors as columns (`v[r * n + k]` is component `r`
/// of eigenvector `k`).
pub fn eig_symmetric(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>), QlinError> {
    assert_eq!(a.len(), n * n);
    if a.iter().any(|v| !v.is_finite()) {
        return Err(QlinError::EigenNoConvergence { off_diagonal: f64::INFINITY });
    }
    let mut m = a.to_vec();
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n <= 1 {
        return Ok((m, v));
    }

    let scale = a.iter().fold(0.0f64, |acc, &x| acc.max(x.abs())).max(1.0);
    let tol = 1e-15 * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off_max = 0.0f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[p * n + q];
                off_max = off_max.max(apq.abs());
                if apq.abs() <= tol {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // Rotate rows/columns p and q of m.
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                // Accumulate the rotation into the eigenvector columns.
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        if off_max <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off = off.max(m[p * n + q].abs());
                }
            }
        }
        if off > tol * 16.0 {
            return Err(QlinError::EigenNoConvergence { off_diagonal: off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[i * n + i].partial_cmp(&m[j * n + j]).expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = vec![0.0f64; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors[r * n + new_col] = v[r * n + old_col];
        }
    }
    Ok((values, vectors))
}

/// Eigendecomposition of a complex Hermitian matrix.
///
/// Rejects inputs whose Hermitian asymmetry exceeds [`EIG_HERMITICITY_TOL`],
/// reporting the offending magnitude.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<HermitianEig, QlinError> {
    assert!(h.is_square(), "eigendecomposition needs a square matrix");
    let n = h.rows();
    let asym = h.hermitian_asymmetry();
    if asym > EIG_HERMITICITY_TOL {
        return Err(QlinError::NotHermitian { max_asymmetry: asym });
    }

    // Embed H = A + iB as [[A, -B], [B, A]] and diagonalize.
    let nn = 2 * n;
    let mut emb = vec![0.0f64; nn * nn];
    for r in 0..n {
        for c in 0..n {
            // Work from the exactly-Hermitian average of the two triangles.
            let z = (h.get(r, c) + h.get(c, r).conj()) * 0.5;
            emb[r * nn + c] = z.re;
            emb[r * nn + (c + n)] = -z.im;
            emb[(r + n) * nn + c] = z.im;
            emb[(r + n) * nn + (c + n)] = z.re;
        }
    }
    let (vals, vecs) = eig_symmetric(&emb, nn)?;

    // Each complex eigenvalue appears twice; each real eigenvector (x; y)
    // yields the candidate v = x + iy, and its partner column maps to i*v.
    // Gram-Schmidt against accepted vectors drops the duplicates.
    let mut values = Vec::with_capacity(n);
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for k in 0..nn {
        if columns.len() == n {
            break;
        }
        let mut v: Vec<Complex64> = (0..n)
            .map(|r| Complex64::new(vecs[r * nn + k], vecs[(r + n) * nn + k]))
            .collect();
        for u in &columns {
            let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= overlap * ui;
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let inv = 1.0 / norm;
        for vi in &mut v {
            *vi *= inv;
        }
        // Fixed phase convention: first component above 1e-12 real positive.
        if let Some(lead) = v.iter().find(|z| z.norm() > 1e-12) {
            let corr = (lead / lead.norm()).conj();
            for vi in &mut v {
                *vi *= corr;
            }
        }
        values.push(vals[k]);
        columns.push(v);
    }
    debug_assert_eq!(columns.len(), n, "embedding must yield n complex eigenpairs");

    let vectors = ComplexMatrix::from_fn(n, n, |r, c| columns[c][r]);
    Ok(HermitianEig { values, vectors })
}
