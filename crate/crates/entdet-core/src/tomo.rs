//! Full-state reconstruction and entanglement quantification.
//!
//! With all 90 MUB probabilities, the density operator is the literal
//! linear-inversion sum `rho = sum_{alpha,m} p Pi - I`; statistical noise
//! can push its smallest eigenvalue below zero, which is reported rather
//! than hidden. Forced purity instead fits the closest pure state to the
//! measured probabilities, which is the right regularization for the
//! low-entropy states this pipeline produces. The squared I-concurrence
//! `2 (1 - tr(rho_A^2))` quantifies entanglement of pure states only; it
//! is rejected for mixed inputs instead of silently extended.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::measure::MeasurementRecord;
use crate::mub::MubFamily;
use crate::qlin::{ComplexMatrix, DensityMatrix, PureState, Subsystem, DIM, SUB_DIM};
use crate::rng::SplitMix64;

/// Purity below which a density operator is refused by
/// [`i_concurrence_density`].
pub const PURITY_TOL: f64 = 1e-8;

/// Parameter-counting floor for a well-determined pure-state fit.
pub const FORCED_PURITY_FLOOR: usize = 17;

/// Default multi-start count for [`forced_purity`].
pub const DEFAULT_RESTARTS: usize = 16;

/// Fixed stream for the multi-start initial points, so the fit is a
/// deterministic function of the records.
const FORCED_PURITY_SEED: u64 = 0x746f_6d6f_6669_74;

#[derive(Debug, Clone, PartialEq)]
pub enum TomoError {
    /// Linear inversion needs exactly one record per projector.
    MissingRecords { missing: Vec<(u8, u8)> },
    DuplicateRecords { duplicates: Vec<(u8, u8)> },
    /// No records at all were supplied.
    EmptyRecords,
    /// The pure-state concurrence formula does not apply.
    MixedState { purity: f64 },
}

impl fmt::Display for TomoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TomoError::MissingRecords { missing } => {
                write!(f, "linear inversion is missing {} projector(s):", missing.len())?;
                for (alpha, m) in missing.iter().take(8) {
                    write!(f, " ({alpha},{m})")?;
                }
                if missing.len() > 8 {
                    write!(f, " ...")?;
                }
                Ok(())
            }
            TomoError::DuplicateRecords { duplicates } => {
                write!(f, "duplicate records for projector(s):")?;
                for (alpha, m) in duplicates.iter().take(8) {
                    write!(f, " ({alpha},{m})")?;
                }
                Ok(())
            }
            TomoError::EmptyRecords => write!(f, "no measurement records supplied"),
            TomoError::MixedState { purity } => write!(
                f,
                "squared I-concurrence is defined for pure states only; input purity {purity:.6}"
            ),
        }
    }
}

impl core::error::Error for TomoError {}

/// Raw linear inversion `sum p Pi - I` from a complete record set.
///
/// Hermitian by construction, unit trace when each basis sums to one,
/// but possibly not PSD for noisy data; check the spectrum downstream.
pub fn linear_inversion(
    records: &[MeasurementRecord],
    mubs: &MubFamily,
) -> Result<ComplexMatrix, TomoError> {
    let mut count = [[0usize; DIM]; 10];
    let mut duplicates = Vec::new();
    for r in records {
        let slot = &mut count[r.alpha as usize - 1][r.m as usize - 1];
        *slot += 1;
        if *slot == 2 {
            duplicates.push((r.alpha, r.m));
        }
    }
    if !duplicates.is_empty() {
        return Err(TomoError::DuplicateRecords { duplicates });
    }
    let mut missing = Vec::new();
    for alpha in 1..=10u8 {
        for m in 1..=9u8 {
            if count[alpha as usize - 1][m as usize - 1] == 0 {
                missing.push((alpha, m));
            }
        }
    }
    if !missing.is_empty() {
        return Err(TomoError::MissingRecords { missing });
    }

    let mut acc = ComplexMatrix::zeros(DIM, DIM);
    for r in records {
        let proj = mubs.vector(r.alpha, r.m).projector();
        acc = acc.add(&proj.scale(Complex64::new(r.p_hat, 0.0)));
    }
    let ident = ComplexMatrix::identity(DIM);
    Ok(acc.sub(&ident).hermitian_part())
}

/// Outcome of the forced-purity fit.
#[derive(Debug, Clone)]
pub struct ForcedPurityFit {
    pub state: PureState,
    /// Final `sum_k (|<psi_k|psi>|^2 - p_hat_k)^2`.
    pub cost: f64,
    /// Fewer records than the parameter-counting floor.
    pub underdetermined: bool,
    pub restarts: usize,
}

/// Fits the pure state whose projection probabilities best match the
/// records, in least squares, over `restarts` multi-start local
/// optimizations. Deterministic for fixed inputs.
pub fn forced_purity(
    records: &[MeasurementRecord],
    mubs: &MubFamily,
    restarts: usize,
) -> Result<ForcedPurityFit, TomoError> {
    if records.is_empty() {
        return Err(TomoError::EmptyRecords);
    }
    let restarts = restarts.max(1);
    let kets: Vec<&PureState> = records.iter().map(|r| mubs.vector(r.alpha, r.m)).collect();
    let probs: Vec<f64> = records.iter().map(|r| r.p_hat).collect();

    let mut rng = SplitMix64::new(FORCED_PURITY_SEED);
    let mut best: Option<(f64, [Complex64; DIM])> = None;
    for _ in 0..restarts {
        let mut start = [Complex64::ZERO; DIM];
        for a in &mut start {
            *a = Complex64::new(rng.next_normal(), rng.next_normal());
        }
        let (params, cost) = levenberg_marquardt(&kets, &probs, start);
        let better = match &best {
            None => true,
            Some((c, p)) => {
                cost < *c - 1e-15 || ((cost - *c).abs() <= 1e-15 && lex_less(&params, p))
            }
        };
        if better {
            best = Some((cost, params));
        }
    }
    let (cost, params) = best.map(|(c, p)| (c, p)).expect("at least one restart ran");
    let state = PureState::from_unnormalized(params)
        .expect("optimizer never returns the zero vector")
        .with_fixed_phase();
    Ok(ForcedPurityFit {
        state,
        cost,
        underdetermined: records.len() < FORCED_PURITY_FLOOR,
        restarts,
    })
}

/// Deterministic tie-break between equal-cost optima.
fn lex_less(a: &[Complex64; DIM], b: &[Complex64; DIM]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x.re - y.re).abs() > 1e-12 {
            return x.re < y.re;
        }
        if (x.im - y.im).abs() > 1e-12 {
            return x.im < y.im;
        }
    }
    false
}

/// Scale-invariant least-squares fit of `|<k|psi>|^2 / |psi|^2` to the
/// probabilities, over the 18 real amplitude parameters.
fn levenberg_marquardt(
    kets: &[&PureState],
    probs: &[f64],
    start: [Complex64; DIM],
) -> ([Complex64; DIM], f64) {
    const NPAR: usize = 2 * DIM;
    let nres = kets.len();

    let cost_of = |psi: &[Complex64; DIM]| -> f64 {
        let n2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        kets.iter()
            .zip(probs)
            .map(|(k, &p)| {
                let c: Complex64 = k.amplitudes().iter().zip(psi).map(|(a, b)| a.conj() * b).sum();
                let q = c.norm_sqr() / n2;
                (q - p) * (q - p)
            })
            .sum()
    };

    let mut psi = start;
    let mut cost = cost_of(&psi);
    let mut lambda = 1e-3f64;

    let mut jac = alloc::vec![0.0f64; nres * NPAR];
    let mut resid = alloc::vec![0.0f64; nres];

    for _ in 0..200 {
        let n2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        for (row, (k, &p)) in kets.iter().zip(probs).enumerate() {
            let amps = k.amplitudes();
            let c: Complex64 = amps.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum();
            let q = c.norm_sqr() / n2;
            resid[row] = q - p;
            for j in 0..DIM {
                // d|c|^2 = 2 Re(conj(c) dc) with dc/da_j = conj(phi_j),
                // dc/db_j = i conj(phi_j); dn2/da_j = 2 a_j, dn2/db_j = 2 b_j.
                let g = c.conj() * amps[j].conj();
                let dq_da = (2.0 * g.re * n2 - c.norm_sqr() * 2.0 * psi[j].re) / (n2 * n2);
                let dq_db = (-2.0 * g.im * n2 - c.norm_sqr() * 2.0 * psi[j].im) / (n2 * n2);
                jac[row * NPAR + j] = dq_da;
                jac[row * NPAR + DIM + j] = dq_db;
            }
        }

        // Normal equations J^T J + lambda diag, J^T r.
        let mut jtj = [0.0f64; NPAR * NPAR];
        let mut jtr = [0.0f64; NPAR];
        for row in 0..nres {
            let jrow = &jac[row * NPAR..(row + 1) * NPAR];
            let r = resid[row];
            for a in 0..NPAR {
                jtr[a] += jrow[a] * r;
                for b in a..NPAR {
                    jtj[a * NPAR + b] += jrow[a] * jrow[b];
                }
            }
        }
        for a in 0..NPAR {
            for b in 0..a {
                jtj[a * NPAR + b] = jtj[b * NPAR + a];
            }
        }
        let grad_inf = jtr.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        if grad_inf < 1e-14 {
            break;
        }

        let mut improved = false;
        for _ in 0..12 {
            let mut sys = jtj;
            for a in 0..NPAR {
                sys[a * NPAR + a] += lambda * jtj[a * NPAR + a].max(1e-12);
            }
            let mut step = jtr;
            if !solve_spd(&mut sys, &mut step, NPAR) {
                lambda *= 10.0;
                continue;
            }
            let mut trial = psi;
            for j in 0..DIM {
                trial[j] -= Complex64::new(step[j], step[DIM + j]);
            }
            let trial_cost = cost_of(&trial);
            if trial_cost < cost {
                psi = trial;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved || cost < 1e-24 {
            break;
        }
    }
    (psi, cost)
}

/// Cholesky solve of a small SPD system; false when not positive.
fn solve_spd(a: &mut [f64], rhs: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return false;
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
    for i in 0..n {
        let mut s = rhs[i];
        for k in 0..i {
            s -= a[i * n + k] * rhs[k];
        }
        rhs[i] = s / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for k in i + 1..n {
            s -= a[k * n + i] * rhs[k];
        }
        rhs[i] = s / a[i * n + i];
    }
    true
}

/// Squared I-concurrence of a pure state: `2 (1 - tr(rho_A^2))`, in
/// `[0, 4/3]`.
pub fn i_concurrence(state: &PureState) -> f64 {
    // rho_A = M M^dagger for the 3x3 amplitude matrix M[i][j] = a_ij.
    let mut rho_a = [[Complex64::ZERO; SUB_DIM]; SUB_DIM];
    for i in 0..SUB_DIM {
        for ip in 0..SUB_DIM {
            let mut acc = Complex64::ZERO;
            for j in 0..SUB_DIM {
                acc += state.amp(i, j) * state.amp(ip, j).conj();
            }
            rho_a[i][ip] = acc;
        }
    }
    let mut purity = 0.0;
    for i in 0..SUB_DIM {
        for ip in 0..SUB_DIM {
            purity += (rho_a[i][ip] * rho_a[ip][i]).re;
        }
    }
    (2.0 * (1.0 - purity)).clamp(0.0, 4.0 / 3.0)
}

/// Squared I-concurrence of a density operator that is pure within
/// [`PURITY_TOL`]; mixed inputs are rejected because the formula only
/// holds for pure bipartite states.
pub fn i_concurrence_density(rho: &DensityMatrix) -> Result<f64, TomoError> {
    let purity = rho.purity();
    if (purity - 1.0).abs() > PURITY_TOL {
        return Err(TomoError::MixedState { purity });
    }
    let rho_a = rho.partial_trace(Subsystem::A);
    let marginal_purity = rho_a.trace_product(&rho_a).re;
    Ok((2.0 * (1.0 - marginal_purity)).clamp(0.0, 4.0 / 3.0))
}

/// Reconstruction bundle assembled by the front end.
#[derive(Debug, Clone)]
pub struct TomographyResult {
    pub rho_linear: Option<ComplexMatrix>,
    /// Smallest eigenvalue of the linear inversion; negative values flag
    /// a non-PSD raw reconstruction.
    pub lambda_min_linear: Option<f64>,
    pub rho_pure: Option<PureState>,
    pub fit_cost: Option<f64>,
    pub underdetermined: bool,
    pub fidelity_to_target: Option<f64>,
}

impl fmt::Display for TomographyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if let Some(l) = self.lambda_min_linear {
            parts.push(alloc::format!("linear inversion lambda_min {l:.3e}"));
        }
        if let Some(c) = self.fit_cost {
            parts.push(alloc::format!("forced-purity cost {c:.3e}"));
        }
        if let Some(fid) = self.fidelity_to_target {
            parts.push(alloc::format!("fidelity {fid:.6}"));
        }
        write!(f, "{}", parts.join(", "))
    }
}
