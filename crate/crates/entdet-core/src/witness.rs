//! Incremental entanglement certification from partial measurement data.
//!
//! The round structure: infer a guess state from the records measured so
//! far (two-stage SDP: tightest data fit, then the most mixed state at
//! that fit), build the optimal trace-one decomposable witness for the
//! guess, then certify a bound on the witness expectation over *every*
//! state consistent with the data. A negative certified value proves the
//! measured system entangled no matter which consistent state it is, and
//! the bound can never overstate the true expectation because the true
//! state itself is in the feasible set.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::measure::{MeasurementRecord, Shots};
use crate::mub::MubFamily;
use crate::qlin::{
    eig_hermitian, partial_transpose_mat, ComplexMatrix, DensityMatrix, DIM,
};
use crate::sdp::{BlockField, Relation, SdpProblem, SdpSolution, SdpStatus, Sense};

/// SDP optimum above which no decomposable witness detects the guess.
pub const WITNESS_THRESHOLD: f64 = -1e-9;

/// Slack floor added to the stage-1 residual.
pub const RESIDUAL_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessError {
    EmptyRecords,
    /// An SDP did not reach optimality.
    Solver { stage: &'static str, detail: String },
    /// The data admits no state at this slack; widen it and retry.
    InfeasibleData { certificate: f64, slack: f64 },
    /// Internal consistency check failed (certificate vs. SDP value).
    Inconsistent { detail: String },
}

impl fmt::Display for WitnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessError::EmptyRecords => write!(f, "no measurement records supplied"),
            WitnessError::Solver { stage, detail } => {
                write!(f, "SDP failure in {stage}: {detail}")
            }
            WitnessError::InfeasibleData { certificate, slack } => write!(
                f,
                "no state matches the data within slack {slack:.3e} \
                 (infeasibility {certificate:.3e}); escalate the slack and retry"
            ),
            WitnessError::Inconsistent { detail } => {
                write!(f, "certificate inconsistency: {detail}")
            }
        }
    }
}

impl core::error::Error for WitnessError {}

/// State inferred from partial data, with the fit quality that produced
/// it.
#[derive(Debug, Clone)]
pub struct GuessState {
    pub rho_tilde: DensityMatrix,
    /// Stage-1 optimum: smallest uniform deviation from the records that
    /// any state can achieve.
    pub residual: f64,
    pub records_used: usize,
}

/// Trace-one decomposable entanglement witness `W = P + Q^Gamma`.
///
/// `P, Q >= 0` certify that `tr(W sigma) >= 0` for every PPT (hence
/// every separable) state, so a negative expectation value is an
/// entanglement proof.
#[derive(Debug, Clone)]
pub struct Witness {
    pub matrix: ComplexMatrix,
    pub p_block: ComplexMatrix,
    pub q_block: ComplexMatrix,
    /// Optimum of `min tr(P rho) + tr(Q rho^Gamma)` over the trace-one
    /// split; equals the expected witness value on the source state.
    pub sdp_value: f64,
    /// FNV-1a over the source guess state's entries, for provenance.
    pub source_state_hash: u64,
}

/// Per-round entry of a detection run.
#[derive(Debug, Clone)]
pub struct RoundEntry {
    /// Projectors measured up to and including this round.
    pub projectors_measured: usize,
    /// Certified bound for the active witness; `None` while no witness
    /// exists yet or the round errored.
    pub certified_value: Option<f64>,
    pub guess_lambda_min: f64,
    pub fit_residual: f64,
    pub witness_refreshed: bool,
    pub slack_used: Option<f64>,
    /// Witness active at this round (kept for audits).
    pub witness: Option<Witness>,
    pub error: Option<String>,
}

/// Full detection run output.
#[derive(Debug, Clone)]
pub struct DetectionTrace {
    pub rounds: Vec<RoundEntry>,
    /// Certified value at the final round, when one exists.
    pub final_value: Option<f64>,
}

impl DetectionTrace {
    /// First round count at which the certified value went negative.
    pub fn first_detection(&self) -> Option<usize> {
        self.rounds
            .iter()
            .find(|r| r.certified_value.map_or(false, |v| v < 0.0))
            .map(|r| r.projectors_measured)
    }
}

/// Batch granularity of a detection run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchMode {
    /// Re-certify after each completed basis (nine projectors).
    PerBasis,
    /// Re-certify after every single projector.
    PerProjector,
}

/// How the data-consistency slack is chosen each round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlackPolicy {
    /// `max(3 sqrt(p(1-p)/shots) over sampled records, residual + 1e-9)`;
    /// exact data reduces to `residual + 1e-9`.
    Auto,
    Fixed(f64),
}

fn fnv1a64(rho: &DensityMatrix) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    let mut eat = |bits: u64| {
        for byte in bits.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x1_0000_0000_01b3);
        }
    };
    for z in rho.matrix().data() {
        eat(z.re.to_bits());
        eat(z.im.to_bits());
    }
    h
}

fn one_by_one(v: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(1, 1);
    m.set(0, 0, Complex64::new(v, 0.0));
    m
}

fn solved(problem: &SdpProblem, stage: &'static str) -> Result<SdpSolution, WitnessError> {
    let sol = problem
        .solve()
        .map_err(|e| WitnessError::Solver { stage, detail: e.to_string() })?;
    match sol.status {
        SdpStatus::Optimal => Ok(sol),
        SdpStatus::Infeasible { certificate } => Err(WitnessError::Solver {
            stage,
            detail: format!("constraints infeasible (certificate {certificate:.3e})"),
        }),
        SdpStatus::MaxIterations => Err(WitnessError::Solver {
            stage,
            detail: format!(
                "no convergence in {} iterations (gap {:.3e})",
                sol.iterations, sol.duality_gap
            ),
        }),
    }
}

/// Stage-1 problem: the smallest uniform deviation `t` such that some
/// state reproduces every record within `t`.
pub fn build_residual_problem(
    records: &[MeasurementRecord],
    mubs: &MubFamily,
) -> SdpProblem {
    let mut p = SdpProblem::new(Sense::Minimize);
    let sigma = p.add_block(DIM, BlockField::ComplexHermitian);
    let t = p.add_block(1, BlockField::RealSymmetric);
    p.set_objective(t, one_by_one(1.0)).expect("1x1 objective");
    p.add_constraint(
        vec![(sigma, ComplexMatrix::identity(DIM))],
        Relation::Eq,
        1.0,
    )
    .expect("trace constraint");
    for r in records {
        let proj = mubs.vector(r.alpha, r.m).projector();
        p.add_constraint(
            vec![(sigma, proj.clone()), (t, one_by_one(-1.0))],
            Relation::Le,
            r.p_hat,
        )
        .expect("upper data constraint");
        p.add_constraint(
            vec![(sigma, proj), (t, one_by_one(1.0))],
            Relation::Ge,
            r.p_hat,
        )
        .expect("lower data constraint");
    }
    p
}

/// Stage-2 problem: among states within `tolerance` of every record,
/// the one maximizing the smallest eigenvalue, written over
/// `sigma = Y + u I` with `Y >= 0` and `u = u_plus - u_minus`.
pub fn build_guess_problem(
    records: &[MeasurementRecord],
    mubs: &MubFamily,
    tolerance: f64,
) -> SdpProblem {
    let mut p = SdpProblem::new(Sense::Maximize);
    let y = p.add_block(DIM, BlockField::ComplexHermitian);
    let u_plus = p.add_block(1, BlockField::RealSymmetric);
    let u_minus = p.add_block(1, BlockField::RealSymmetric);
    p.set_objective(u_plus, one_by_one(1.0)).expect("objective");
    p.set_objective(u_minus, one_by_one(-1.0)).expect("objective");
    let dimf = DIM as f64;
    p.add_constraint(
        vec![
            (y, ComplexMatrix::identity(DIM)),
            (u_plus, one_by_one(dimf)),
            (u_minus, one_by_one(-dimf)),
        ],
        Relation::Eq,
        1.0,
    )
    .expect("trace constraint");
    for r in records {
        let proj = mubs.vector(r.alpha, r.m).projector();
        // tr(sigma Pi) = tr(Y Pi) + u since tr(Pi) = 1.
        p.add_constraint(
            vec![(y, proj.clone()), (u_plus, one_by_one(1.0)), (u_minus, one_by_one(-1.0))],
            Relation::Le,
            r.p_hat + tolerance,
        )
        .expect("upper data constraint");
        p.add_constraint(
            vec![(y, proj), (u_plus, one_by_one(1.0)), (u_minus, one_by_one(-1.0))],
            Relation::Ge,
            r.p_hat - tolerance,
        )
        .expect("lower data constraint");
    }
    p
}

/// Guess-state inference; `records` may be empty here (the maximally
/// mixed state comes back).
fn infer_guess(records: &[MeasurementRecord], mubs: &MubFamily) -> Result<GuessState, WitnessError> {
    let residual = if records.is_empty() {
        0.0
    } else {
        let sol = solved(&build_residual_problem(records, mubs), "guess-state stage 1")?;
        sol.objective_value.max(0.0)
    };
    let sol2 = solved(
        &build_guess_problem(records, mubs, residual + RESIDUAL_MARGIN),
        "guess-state stage 2",
    )?;
    let u = sol2.objective_value;
    let sigma = {
        let y = &sol2.primal_blocks[0];
        let shift = ComplexMatrix::identity(DIM).scale(Complex64::new(u, 0.0));
        y.add(&shift)
    };
    let rho_tilde = DensityMatrix::project(&sigma).map_err(|e| WitnessError::Solver {
        stage: "guess-state projection",
        detail: e.to_string(),
    })?;
    Ok(GuessState { rho_tilde, residual, records_used: records.len() })
}

/// Infers the guess state from the records measured so far.
///
/// Stage 1 finds the smallest uniform data deviation `t*`; stage 2, with
/// the deviation capped at `t* + 1e-9`, returns the consistent state of
/// maximal smallest eigenvalue.
pub fn estimate_guess_state(
    records: &[MeasurementRecord],
    mubs: &MubFamily,
) -> Result<GuessState, WitnessError> {
    if records.is_empty() {
        return Err(WitnessError::EmptyRecords);
    }
    infer_guess(records, mubs)
}

#[cfg(test)]
pub(crate) fn estimate_guess_state_unguarded(
    records: &[MeasurementRecord],
    mubs: &MubFamily,
) -> Result<GuessState, WitnessError> {
    infer_guess(records, mubs)
}

/// Optimal trace-one decomposable witness for the guess, or `None` when
/// the guess is PPT and no such witness exists.
///
/// The optimum of `min tr(P rho) + tr(Q rho^Gamma)` over `P, Q >= 0`,
/// `tr P + tr Q = 1` concentrates all trace on the smaller of
/// `lambda_min(rho)` and `lambda_min(rho^Gamma)`; the returned
/// certificate uses the deterministic eigenvector route (lowest index,
/// fixed phase) so repeated runs emit identical witnesses, and the SDP
/// value cross-checks it.
pub fn build_witness(guess: &GuessState) -> Result<Option<Witness>, WitnessError> {
    let rho = guess.rho_tilde.matrix().clone();
    let rho_pt = guess.rho_tilde.partial_transpose();

    let mut p = SdpProblem::new(Sense::Minimize);
    let pb = p.add_block(DIM, BlockField::ComplexHermitian);
    let qb = p.add_block(DIM, BlockField::ComplexHermitian);
    p.set_objective(pb, rho.clone()).expect("objective P");
    p.set_objective(qb, rho_pt.clone()).expect("objective Q");
    p.add_constraint(
        vec![
            (pb, ComplexMatrix::identity(DIM)),
            (qb, ComplexMatrix::identity(DIM)),
        ],
        Relation::Eq,
        1.0,
    )
    .expect("trace-one constraint");
    let sol = solved(&p, "witness construction")?;
    let optimum = sol.objective_value;
    if optimum >= WITNESS_THRESHOLD {
        return Ok(None);
    }

    let eig_rho = eig_hermitian(&rho).map_err(|e| WitnessError::Solver {
        stage: "witness eigenroute",
        detail: e.to_string(),
    })?;
    let eig_pt = eig_hermitian(&rho_pt).map_err(|e| WitnessError::Solver {
        stage: "witness eigenroute",
        detail: e.to_string(),
    })?;
    let analytic = eig_rho.values[0].min(eig_pt.values[0]);
    if (analytic - optimum).abs() > 1e-5 {
        return Err(WitnessError::Inconsistent {
            detail: format!(
                "witness SDP optimum {optimum:.3e} vs eigenvalue route {analytic:.3e}"
            ),
        });
    }

    // Deterministic certificate from the minimal eigenvector; ties between
    // the two routes go to the partial-transpose side, the detecting one.
    let (p_block, q_block) = if eig_pt.values[0] <= eig_rho.values[0] {
        let v = eig_pt.vector(0);
        let proj = ComplexMatrix::from_fn(DIM, DIM, |r, c| v[r] * v[c].conj());
        (ComplexMatrix::zeros(DIM, DIM), proj)
    } else {
        let v = eig_rho.vector(0);
        let proj = ComplexMatrix::from_fn(DIM, DIM, |r, c| v[r] * v[c].conj());
        (proj, ComplexMatrix::zeros(DIM, DIM))
    };
    let matrix = p_block.add(&partial_transpose_mat(&q_block)).hermitian_part();
    Ok(Some(Witness {
        matrix,
        p_block,
        q_block,
        sdp_value: optimum,
        source_state_hash: fnv1a64(&guess.rho_tilde),
    }))
}

/// Certification problem: maximize the witness expectation over all
/// states consistent with the records within `slack`.
pub fn build_certification_problem(
    witness: &Witness,
    records: &[MeasurementRecord],
    mubs: &MubFamily,
    slack: f64,
) -> SdpProblem {
    let mut p = SdpProblem::new(Sense::Maximize);
    let sigma = p.add_block(DIM, BlockField::ComplexHermitian);
    p.set_objective(sigma, witness.matrix.clone()).expect("objective W");
    p.add_constraint(
        vec![(sigma, ComplexMatrix::identity(DIM))],
        Relation::Eq,
        1.0,
    )
    .expect("trace constraint");
    for r in records {
        let proj = mubs.vector(r.alpha, r.m).projector();
        p.add_constraint(vec![(sigma, proj.clone())], Relation::Le, r.p_hat + slack)
            .expect("upper data constraint");
        p.add_constraint(vec![(sigma, proj)], Relation::Ge, r.p_hat - slack)
            .expect("lower data constraint");
    }
    p
}

/// Certified upper bound `V` on the witness expectation over every state
/// consistent with the data.
///
/// `V < 0` proves every consistent state entangled; because the true
/// state is consistent whenever the slack covers its deviations, `V`
/// never exceeds the true expectation in absolute value.
pub fn certify_bound(
    witness: &Witness,
    records: &[MeasurementRecord],
    mubs: &MubFamily,
    slack: f64,
) -> Result<f64, WitnessError> {
    if records.is_empty() {
        return Err(WitnessError::EmptyRecords);
    }
    let p = build_certification_problem(witness, records, mubs, slack);
    let sol = p
        .solve()
        .map_err(|e| WitnessError::Solver { stage: "certification", detail: e.to_string() })?;
    match sol.status {
        SdpStatus::Optimal => Ok(sol.objective_value),
        SdpStatus::Infeasible { certificate } => {
            Err(WitnessError::InfeasibleData { certificate, slack })
        }
        SdpStatus::MaxIterations => Err(WitnessError::Solver {
            stage: "certification",
            detail: format!(
                "no convergence in {} iterations (gap {:.3e})",
                sol.iterations, sol.duality_gap
            ),
        }),
    }
}

fn auto_slack(records: &[MeasurementRecord], residual: f64) -> f64 {
    let mut sigma_term = 0.0f64;
    for r in records {
        if let Shots::Count(n) = r.shots {
            let var = (r.p_hat * (1.0 - r.p_hat) / n as f64).max(0.0);
            sigma_term = sigma_term.max(3.0 * var.sqrt());
        }
    }
    sigma_term.max(residual + RESIDUAL_MARGIN)
}

/// Runs the incremental detection loop over an ordered record stream.
///
/// After each batch the guess state is re-estimated and the witness
/// rebuilt; a PPT guess keeps the previous witness alive rather than
/// discarding a working detector. Per-round failures are recorded in the
/// trace and the run continues.
pub fn run_detection(
    records: &[MeasurementRecord],
    batch: BatchMode,
    mubs: &MubFamily,
    slack_policy: SlackPolicy,
) -> DetectionTrace {
    let step = match batch {
        BatchMode::PerBasis => DIM,
        BatchMode::PerProjector => 1,
    };
    let mut rounds = Vec::new();
    let mut current_witness: Option<Witness> = None;

    let mut k = 0;
    while k < records.len() {
        k = (k + step).min(records.len());
        let active = &records[..k];

        let mut entry = RoundEntry {
            projectors_measured: k,
            certified_value: None,
            guess_lambda_min: f64::NAN,
            fit_residual: f64::NAN,
            witness_refreshed: false,
            slack_used: None,
            witness: None,
            error: None,
        };

        match infer_guess(active, mubs) {
            Ok(guess) => {
                entry.guess_lambda_min = guess.rho_tilde.lambda_min();
                entry.fit_residual = guess.residual;
                match build_witness(&guess) {
                    Ok(Some(w)) => {
                        current_witness = Some(w);
                        entry.witness_refreshed = true;
                    }
                    Ok(None) => {}
                    Err(e) => entry.error = Some(e.to_string()),
                }
                if entry.error.is_none() {
                    if let Some(w) = &current_witness {
                        let slack = match slack_policy {
                            SlackPolicy::Auto => auto_slack(active, guess.residual),
                            SlackPolicy::Fixed(s) => s,
                        };
                        entry.slack_used = Some(slack);
                        match certify_bound(w, active, mubs, slack) {
                            Ok(v) => entry.certified_value = Some(v),
                            Err(e) => entry.error = Some(e.to_string()),
                        }
                        entry.witness = Some(w.clone());
                    }
                }
            }
            Err(e) => entry.error = Some(e.to_string()),
        }
        rounds.push(entry);
    }

    let final_value = rounds.last().and_then(|r| r.certified_value);
    DetectionTrace { rounds, final_value }
}
