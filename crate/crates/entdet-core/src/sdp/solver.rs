//! Primal-dual path-following interior point core over real symmetric
//! blocks.
//!
//! Standard form handled here:
//!
//! ```text
//!   minimize    sum_v <C_v, X_v>
//!   subject to  sum_v <A_iv, X_v> = b_i     (i = 1..m)
//!               X_v >= 0                     (each block PSD)
//! ```
//!
//! The search direction is the HKM direction with Mehrotra
//! predictor-corrector; one Schur-complement Cholesky per iteration is
//! shared by both solves. Blocks never exceed a few dozen rows, so all
//! factorizations are dense.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::qlin::eig_symmetric;

/// Relative duality-gap and feasibility tolerance at which an iterate is
/// declared optimal.
pub const SOLVE_TOL: f64 = 1e-8;
/// Iteration cap for the interior-point loop.
pub const MAX_ITERATIONS: usize = 200;
/// Phase-one optimum above which the constraint set is declared
/// infeasible.
pub const INFEASIBILITY_TOL: f64 = 1e-6;

/// Step-length damping toward the cone boundary.
const STEP_FRACTION: f64 = 0.95;

/// Problem in lowered real-symmetric form.
#[derive(Debug, Clone)]
pub struct RealSdp {
    /// Row count of each PSD block.
    pub dims: Vec<usize>,
    /// Objective coefficient per block (row-major dense, symmetric).
    pub objective: Vec<Vec<f64>>,
    /// Sparse constraint rows: `(block, coefficient)` terms plus rhs.
    pub constraints: Vec<Vec<(usize, Vec<f64>)>>,
    pub rhs: Vec<f64>,
}

/// Termination state of the real solver.
#[derive(Debug, Clone, PartialEq)]
pub enum RealStatus {
    Optimal,
    /// Phase-one optimum: how far the constraints are from satisfiable.
    Infeasible { certificate: f64 },
    MaxIterations,
}

/// Per-iteration diagnostics, kept for weak-duality auditing.
#[derive(Debug, Clone, Copy)]
pub struct IterateInfo {
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub mu: f64,
}

#[derive(Debug, Clone)]
pub struct RealSolution {
    pub status: RealStatus,
    pub objective: f64,
    pub dual_objective: f64,
    pub blocks: Vec<Vec<f64>>,
    pub dual: Vec<f64>,
    pub iterations: usize,
    pub trace: Vec<IterateInfo>,
}

// ---- dense helpers on row-major square matrices ----

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for r in 0..n {
        for k in 0..n {
            let arl = a[r * n + k];
            if arl == 0.0 {
                continue;
            }
            let row = &b[k * n..(k + 1) * n];
            let dst = &mut out[r * n..(r + 1) * n];
            for c in 0..n {
                dst[c] += arl * row[c];
            }
        }
    }
    out
}

/// `tr(a b)` for general square `a`, `b`.
fn trace_prod(a: &[f64], b: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            acc += a[r * n + c] * b[c * n + r];
        }
    }
    acc
}

/// `<a, b> = tr(a b)` when both are symmetric.
fn inner_sym(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn symmetrize(a: &mut [f64], n: usize) {
    for r in 0..n {
        for c in r + 1..n {
            let v = 0.5 * (a[r * n + c] + a[c * n + r]);
            a[r * n + c] = v;
            a[c * n + r] = v;
        }
    }
}

/// In-place lower Cholesky; `Err(col)` on a non-positive pivot.
fn cholesky(a: &mut [f64], n: usize) -> Result<(), usize> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(j);
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    // Zero the strict upper triangle so the factor is clean.
    for r in 0..n {
        for c in r + 1..n {
            a[r * n + c] = 0.0;
        }
    }
    Ok(())
}

/// Solves `L L^T x = rhs` in place given the lower factor.
fn chol_solve(l: &[f64], rhs: &mut [f64], n: usize) {
    for i in 0..n {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[i * n + k] * rhs[k];
        }
        rhs[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for k in i + 1..n {
            s -= l[k * n + i] * rhs[k];
        }
        rhs[i] = s / l[i * n + i];
    }
}

/// Inverse from the lower Cholesky factor.
fn chol_inverse(l: &[f64], n: usize) -> Vec<f64> {
    let mut inv = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|v| *v = 0.0);
        col[j] = 1.0;
        chol_solve(l, &mut col, n);
        for i in 0..n {
            inv[i * n + j] = col[i];
        }
    }
    // Clean symmetry.
    symmetrize(&mut inv, n);
    inv
}

/// Largest step `alpha` with `S + alpha dS >= 0`, given PD `S`.
fn max_psd_step(s: &[f64], ds: &[f64], n: usize) -> f64 {
    let mut l = s.to_vec();
    if cholesky(&mut l, n).is_err() {
        return 0.0;
    }
    // W = L^-1 dS L^-T; alpha = 1 / max(0, -lambda_min(W)).
    let mut w = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    // First Y = L^-1 dS (forward solve per column), then W = Y L^-T.
    for j in 0..n {
        for i in 0..n {
            col[i] = ds[i * n + j];
        }
        for i in 0..n {
            let mut v = col[i];
            for k in 0..i {
                v -= l[i * n + k] * col[k];
            }
            col[i] = v / l[i * n + i];
        }
        for i in 0..n {
            w[i * n + j] = col[i];
        }
    }
    let y = w.clone();
    for i in 0..n {
        for j in 0..n {
            col[j] = y[i * n + j];
        }
        for jj in 0..n {
            let mut v = col[jj];
            for k in 0..jj {
                v -= l[jj * n + k] * col[k];
            }
            col[jj] = v / l[jj * n + jj];
        }
        for j in 0..n {
            w[i * n + j] = col[j];
        }
    }
    symmetrize(&mut w, n);
    match eig_symmetric(&w, n) {
        Ok((vals, _)) => {
            let lam_min = vals[0];
            if lam_min >= 0.0 {
                f64::INFINITY
            } else {
                1.0 / (-lam_min)
            }
        }
        Err(_) => 0.0,
    }
}

struct Workspace {
    /// Per block: constraint indices touching it with their coefficients.
    block_constraints: Vec<Vec<usize>>,
}

impl RealSdp {
    fn block_count(&self) -> usize {
        self.dims.len()
    }

    fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    fn total_dim(&self) -> f64 {
        self.dims.iter().sum::<usize>() as f64
    }

    fn coef(&self, i: usize, block: usize) -> Option<&Vec<f64>> {
        self.constraints[i]
            .iter()
            .find(|(b, _)| *b == block)
            .map(|(_, m)| m)
    }

    fn primal_objective(&self, x: &[Vec<f64>]) -> f64 {
        self.objective
            .iter()
            .zip(x)
            .map(|(c, xv)| inner_sym(c, xv))
            .sum()
    }

    fn constraint_values(&self, x: &[Vec<f64>]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|row| row.iter().map(|(b, a)| inner_sym(a, &x[*b])).sum())
            .collect()
    }
}

/// Solves the lowered problem from the standard infeasible start; falls
/// back to a phase-one feasibility solve when the main loop cannot reach
/// primal feasibility.
pub fn solve_real(p: &RealSdp) -> RealSolution {
    let mut sol = ipm(p);
    if sol.status == RealStatus::MaxIterations {
        // Distinguish "hard but feasible" from "no state fits the data".
        let err = max_constraint_violation(p, &sol.blocks);
        if err > INFEASIBILITY_TOL {
            if let Some(cert) = phase_one_gap(p) {
                if cert > INFEASIBILITY_TOL {
                    sol.status = RealStatus::Infeasible { certificate: cert };
                }
            }
        }
    }
    sol
}

fn max_constraint_violation(p: &RealSdp, x: &[Vec<f64>]) -> f64 {
    p.constraint_values(x)
        .iter()
        .zip(&p.rhs)
        .map(|(v, b)| (v - b).abs())
        .fold(0.0, f64::max)
}

/// Minimum `t >= 0` such that `A(X) + t (b - A(I)) = b` is solvable with
/// `X >= 0`: zero (within tolerance) iff the original constraints admit a
/// PSD solution.
fn phase_one_gap(p: &RealSdp) -> Option<f64> {
    let shift: Vec<f64> = p
        .constraints
        .iter()
        .zip(&p.rhs)
        .map(|(row, b)| {
            let tr_i: f64 = row.iter().map(|(blk, a)| {
                let n = p.dims[*blk];
                (0..n).map(|k| a[k * n + k]).sum::<f64>()
            }).sum();
            b - tr_i
        })
        .collect();

    let mut dims = p.dims.clone();
    dims.push(1);
    let t_block = dims.len() - 1;
    let mut objective: Vec<Vec<f64>> = p.dims.iter().map(|&n| vec![0.0; n * n]).collect();
    objective.push(vec![1.0]);
    let constraints: Vec<Vec<(usize, Vec<f64>)>> = p
        .constraints
        .iter()
        .zip(&shift)
        .map(|(row, s)| {
            let mut r: Vec<(usize, Vec<f64>)> = row.clone();
            if s.abs() > 0.0 {
                r.push((t_block, vec![*s]));
            }
            r
        })
        .collect();
    let aux = RealSdp { dims, objective, constraints, rhs: p.rhs.clone() };
    let sol = ipm(&aux);
    match sol.status {
        RealStatus::Optimal | RealStatus::MaxIterations => Some(sol.objective.max(0.0)),
        RealStatus::Infeasible { certificate } => Some(certificate),
    }
}

fn ipm(p: &RealSdp) -> RealSolution {
    let m = p.constraint_count();
    let nblocks = p.block_count();
    let total = p.total_dim();
    assert!(m > 0, "solver requires at least one constraint");

    let ws = Workspace {
        block_constraints: (0..nblocks)
            .map(|v| {
                (0..m)
                    .filter(|&i| p.constraints[i].iter().any(|(b, _)| *b == v))
                    .collect()
            })
            .collect(),
    };

    // Scale-aware cold start.
    let b_norm = p.rhs.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let c_norm = p
        .objective
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |a, &x| a.max(x.abs()));
    let xi_p = (1.0 + b_norm) * total.sqrt().max(1.0);
    let xi_d = (1.0 + c_norm) * total.sqrt().max(1.0);

    let mut x: Vec<Vec<f64>> = p.dims.iter().map(|&n| scale_identity(n, xi_p)).collect();
    let mut z: Vec<Vec<f64>> = p.dims.iter().map(|&n| scale_identity(n, xi_d)).collect();
    let mut y = vec![0.0f64; m];

    let mut trace = Vec::new();
    let mut best: Option<(f64, Vec<Vec<f64>>, Vec<f64>, f64)> = None;

    for iter in 0..MAX_ITERATIONS {
        // Residuals.
        let ax = p.constraint_values(&x);
        let fp: Vec<f64> = p.rhs.iter().zip(&ax).map(|(b, v)| b - v).collect();
        let mut fd: Vec<Vec<f64>> = Vec::with_capacity(nblocks);
        for v in 0..nblocks {
            let n = p.dims[v];
            let mut r = p.objective[v].clone();
            for (ri, zi) in r.iter_mut().zip(&z[v]) {
                *ri -= zi;
            }
            for &i in &ws.block_constraints[v] {
                if let Some(a) = p.coef(i, v) {
                    let yi = y[i];
                    for (ri, ai) in r.iter_mut().zip(a) {
                        *ri -= yi * ai;
                    }
                }
            }
            debug_assert_eq!(r.len(), n * n);
            fd.push(r);
        }

        let mu: f64 = x.iter().zip(&z).map(|(xv, zv)| inner_sym(xv, zv)).sum::<f64>() / total;
        let pobj = p.primal_objective(&x);
        let dobj: f64 = p.rhs.iter().zip(&y).map(|(b, yi)| b * yi).sum();
        let p_res = fp.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let d_res = fd
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |a, &v| a.max(v.abs()));

        trace.push(IterateInfo {
            primal_objective: pobj,
            dual_objective: dobj,
            primal_residual: p_res,
            dual_residual: d_res,
            mu,
        });

        if !mu.is_finite() || !pobj.is_finite() || !dobj.is_finite() || !p_res.is_finite() {
            break;
        }

        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs().max(dobj.abs()));
        let rel_p = p_res / (1.0 + b_norm);
        let rel_d = d_res / (1.0 + c_norm);
        let score = rel_gap + rel_p + rel_d;
        if best.as_ref().map_or(true, |(s, ..)| score < *s) {
            best = Some((score, x.clone(), y.clone(), pobj));
        }
        if rel_gap <= SOLVE_TOL && rel_p <= SOLVE_TOL && rel_d <= SOLVE_TOL {
            return RealSolution {
                status: RealStatus::Optimal,
                objective: pobj,
                dual_objective: dobj,
                blocks: x,
                dual: y,
                iterations: iter,
                trace,
            };
        }

        // Factor Z and X blockwise.
        let mut z_inv = Vec::with_capacity(nblocks);
        let mut ok = true;
        for v in 0..nblocks {
            let n = p.dims[v];
            let mut l = z[v].clone();
            if cholesky(&mut l, n).is_err() {
                ok = false;
                break;
            }
            z_inv.push(chol_inverse(&l, n));
        }
        if !ok {
            break;
        }

        // Schur complement M_ij = sum_v tr(A_iv X_v A_jv Zinv_v).
        let mut schur = vec![0.0f64; m * m];
        for v in 0..nblocks {
            let n = p.dims[v];
            let idxs = &ws.block_constraints[v];
            if idxs.is_empty() {
                continue;
            }
            // T_j = X A_j Zinv for each touching constraint.
            let mut t_mats: Vec<Vec<f64>> = Vec::with_capacity(idxs.len());
            for &j in idxs {
                let a = p.coef(j, v).expect("listed constraint touches block");
                let xa = mat_mul(&x[v], a, n);
                t_mats.push(mat_mul(&xa, &z_inv[v], n));
            }
            for (jj, &j) in idxs.iter().enumerate() {
                for &i in idxs {
                    if i > j {
                        continue;
                    }
                    let a = p.coef(i, v).expect("listed constraint touches block");
                    let add = trace_prod(a, &t_mats[jj], n);
                    schur[i * m + j] += add;
                    if i != j {
                        schur[j * m + i] += add;
                    }
                }
            }
        }

        // Factor the Schur matrix, ridging it if duplicates make it singular.
        let diag_scale = (0..m).map(|i| schur[i * m + i]).fold(1.0f64, f64::max);
        let mut l_schur = schur.clone();
        let mut ridge = 0.0;
        while cholesky(&mut l_schur, m).is_err() {
            ridge = if ridge == 0.0 { 1e-14 * diag_scale } else { ridge * 100.0 };
            if ridge > 1e-4 * diag_scale {
                ok = false;
                break;
            }
            l_schur.copy_from_slice(&schur);
            for i in 0..m {
                l_schur[i * m + i] += ridge;
            }
        }
        if !ok {
            break;
        }

        let solve_direction = |sigma_mu: f64,
                               corr: Option<(&[Vec<f64>], &[Vec<f64>])>|
         -> (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>) {
            // rhs_i = b_i - sigma_mu tr(A_i Zinv) + tr(A_i X Fd Zinv) [+ tr(A_i dXa dZa Zinv)]
            let mut rhs = p.rhs.clone();
            for v in 0..nblocks {
                let n = p.dims[v];
                let xfz = {
                    let xf = mat_mul(&x[v], &fd[v], n);
                    mat_mul(&xf, &z_inv[v], n)
                };
                let corr_term = corr.map(|(dxa, dza)| {
                    let prod = mat_mul(&dxa[v], &dza[v], n);
                    mat_mul(&prod, &z_inv[v], n)
                });
                for &i in &ws.block_constraints[v] {
                    let a = p.coef(i, v).expect("listed constraint touches block");
                    rhs[i] -= sigma_mu * trace_prod(a, &z_inv[v], n);
                    rhs[i] += trace_prod(a, &xfz, n);
                    if let Some(ref ct) = corr_term {
                        rhs[i] += trace_prod(a, ct, n);
                    }
                }
            }
            let mut dy = rhs;
            chol_solve(&l_schur, &mut dy, m);

            let mut dz = Vec::with_capacity(nblocks);
            let mut dx = Vec::with_capacity(nblocks);
            for v in 0..nblocks {
                let n = p.dims[v];
                let mut dzv = fd[v].clone();
                for &i in &ws.block_constraints[v] {
                    let a = p.coef(i, v).expect("listed constraint touches block");
                    let dyi = dy[i];
                    for (d, ai) in dzv.iter_mut().zip(a) {
                        *d -= dyi * ai;
                    }
                }
                // dX = sigma_mu Zinv - X - (X dZ + corr) Zinv, symmetrized.
                let mut rhs_mat = mat_mul(&x[v], &dzv, n);
                if let Some((dxa, dza)) = corr {
                    let prod = mat_mul(&dxa[v], &dza[v], n);
                    for (r, q) in rhs_mat.iter_mut().zip(&prod) {
                        *r += q;
                    }
                }
                let mut dxv = mat_mul(&rhs_mat, &z_inv[v], n);
                for (idx, d) in dxv.iter_mut().enumerate() {
                    *d = sigma_mu * z_inv[v][idx] - x[v][idx] - *d;
                }
                symmetrize(&mut dxv, n);
                dx.push(dxv);
                dz.push(dzv);
            }
            (dx, dy, dz)
        };

        // Predictor.
        let (dx_aff, _dy_aff, dz_aff) = solve_direction(0.0, None);
        let alpha_p_aff = step_length(p, &x, &dx_aff);
        let alpha_d_aff = step_length(p, &z, &dz_aff);
        let mut mu_aff = 0.0;
        for v in 0..nblocks {
            let n = p.dims[v];
            for idx in 0..n * n {
                mu_aff += (x[v][idx] + alpha_p_aff * dx_aff[v][idx])
                    * (z[v][idx] + alpha_d_aff * dz_aff[v][idx]);
            }
        }
        mu_aff /= total;
        let sigma = ((mu_aff / mu).max(0.0).min(1.0)).powi(3);

        // Corrector.
        let (dx, dy, dz) = solve_direction(sigma * mu, Some((&dx_aff, &dz_aff)));
        let alpha_p = step_length(p, &x, &dx);
        let alpha_d = step_length(p, &z, &dz);

        if alpha_p < 1e-10 && alpha_d < 1e-10 {
            break;
        }

        for v in 0..nblocks {
            for (xi, di) in x[v].iter_mut().zip(&dx[v]) {
                *xi += alpha_p * di;
            }
            for (zi, di) in z[v].iter_mut().zip(&dz[v]) {
                *zi += alpha_d * di;
            }
        }
        for (yi, di) in y.iter_mut().zip(&dy) {
            *yi += alpha_d * di;
        }
    }

    let (_, bx, by, bobj) = best.expect("at least one iterate recorded");
    let dobj: f64 = p.rhs.iter().zip(&by).map(|(b, yi)| b * yi).sum();
    RealSolution {
        status: RealStatus::MaxIterations,
        objective: bobj,
        dual_objective: dobj,
        blocks: bx,
        dual: by,
        iterations: trace.len(),
        trace,
    }
}

fn scale_identity(n: usize, s: f64) -> Vec<f64> {
    let mut m = identity(n);
    for i in 0..n {
        m[i * n + i] = s;
    }
    m
}

fn step_length(p: &RealSdp, s: &[Vec<f64>], ds: &[Vec<f64>]) -> f64 {
    let mut alpha = 1.0f64 / STEP_FRACTION;
    for v in 0..p.dims.len() {
        alpha = alpha.min(max_psd_step(&s[v], &ds[v], p.dims[v]));
    }
    (STEP_FRACTION * alpha).min(1.0)
}
