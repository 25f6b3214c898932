//! Projective measurement simulation: exact probabilities and
//! shot-noise-sampled counts under a configurable schedule.
//!
//! Each projector is measured as its own experiment with a point
//! detector, so sampled estimates within one basis are independent
//! binomial draws and need not sum to one. Every record derives its own
//! stream from `hash(seed, alpha, m)`, making the output independent of
//! plan order and of any execution interleaving.

use alloc::vec::Vec;
use core::fmt;

use crate::mub::MubFamily;
use crate::qlin::{fidelity_pure, DensityMatrix, DIM};
use crate::rng::{record_sub_seed, sample_binomial, SplitMix64};

/// Shot budget per projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    /// Infinite statistics: `p_hat` is the exact trace probability.
    Exact,
    /// Finite counting with this many trials per projector.
    Count(u64),
}

/// Ordered measurement schedule: bases to measure (each contributing its
/// nine projectors in vector order) and the per-projector shot budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementPlan {
    order: Vec<u8>,
    shots: Shots,
}

impl MeasurementPlan {
    pub fn new(order: Vec<u8>, shots: Shots) -> Result<Self, MeasureError> {
        let mut seen = [false; 11];
        for &alpha in &order {
            if !(1..=10).contains(&alpha) {
                return Err(MeasureError::BasisOutOfRange { alpha });
            }
            if seen[alpha as usize] {
                return Err(MeasureError::DuplicateBasis { alpha });
            }
            seen[alpha as usize] = true;
        }
        if let Shots::Count(0) = shots {
            return Err(MeasureError::ZeroShots);
        }
        Ok(Self { order, shots })
    }

    /// The canonical schedule: computational basis first, then the nine
    /// field bases in order.
    pub fn canonical(shots: Shots) -> Self {
        let mut order = Vec::with_capacity(10);
        order.push(10);
        order.extend(1..=9u8);
        Self::new(order, shots).expect("canonical order is valid")
    }

    /// All ten bases in the given permutation.
    pub fn order(&self) -> &[u8] {
        &self.order
    }

    pub fn shots(&self) -> Shots {
        self.shots
    }

    /// Number of projectors the plan touches.
    pub fn projector_count(&self) -> usize {
        self.order.len() * DIM
    }
}

/// One measured projector: estimated probability plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub alpha: u8,
    pub m: u8,
    pub p_hat: f64,
    pub shots: Shots,
    /// Raw count behind `p_hat`; absent for exact records.
    pub raw_count: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureError {
    BasisOutOfRange { alpha: u8 },
    DuplicateBasis { alpha: u8 },
    ZeroShots,
    /// `sample_counts` needs a finite shot budget.
    ExactPlanNotSampleable,
}

impl fmt::Display for MeasureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureError::BasisOutOfRange { alpha } => {
                write!(f, "basis index {alpha} outside 1..=10")
            }
            MeasureError::DuplicateBasis { alpha } => {
                write!(f, "basis index {alpha} appears twice in the plan")
            }
            MeasureError::ZeroShots => write!(f, "shot count must be positive"),
            MeasureError::ExactPlanNotSampleable => {
                write!(f, "cannot sample counts from an exact plan; set a finite shot count")
            }
        }
    }
}

impl core::error::Error for MeasureError {}

/// Exact projection probabilities `tr(rho Pi_m^(alpha))` in plan order.
pub fn exact_probabilities(
    rho: &DensityMatrix,
    plan: &MeasurementPlan,
    mubs: &MubFamily,
) -> Vec<MeasurementRecord> {
    let mut out = Vec::with_capacity(plan.projector_count());
    for &alpha in plan.order() {
        for m in 1..=DIM as u8 {
            let p = fidelity_pure(mubs.vector(alpha, m), rho);
            out.push(MeasurementRecord { alpha, m, p_hat: p, shots: Shots::Exact, raw_count: None });
        }
    }
    out
}

/// Binomially sampled counts in plan order, deterministic given `seed`.
pub fn sample_counts(
    rho: &DensityMatrix,
    plan: &MeasurementPlan,
    mubs: &MubFamily,
    seed: u64,
) -> Result<Vec<MeasurementRecord>, MeasureError> {
    let shots = match plan.shots() {
        Shots::Exact => return Err(MeasureError::ExactPlanNotSampleable),
        Shots::Count(n) => n,
    };
    let mut out = Vec::with_capacity(plan.projector_count());
    for &alpha in plan.order() {
        for m in 1..=DIM as u8 {
            let p = fidelity_pure(mubs.vector(alpha, m), rho);
            let mut rng = SplitMix64::new(record_sub_seed(seed, alpha, m));
            let raw = sample_binomial(&mut rng, shots, p);
            out.push(MeasurementRecord {
                alpha,
                m,
                p_hat: raw as f64 / shots as f64,
                shots: Shots::Count(shots),
                raw_count: Some(raw),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
