//! Dense semidefinite programming for the certification layer.
//!
//! Problems are stated over PSD blocks (real symmetric or complex
//! Hermitian) with linear trace constraints. Complex Hermitian blocks of
//! size n are lowered onto the real symmetric embedding of size 2n, which
//! preserves the PSD cone; inequality constraints become equalities with
//! nonnegative 1x1 slack blocks; a single primal-dual interior-point core
//! then handles everything.

mod solver;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use num_complex::Complex64;

use crate::qlin::ComplexMatrix;

pub use solver::{IterateInfo, INFEASIBILITY_TOL, MAX_ITERATIONS, SOLVE_TOL};
use solver::{solve_real, RealSdp, RealStatus};

/// Hermiticity/symmetry budget accepted on coefficient matrices.
pub const COEFFICIENT_TOL: f64 = 1e-10;

/// Scalar field of a PSD block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockField {
    RealSymmetric,
    ComplexHermitian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

/// Handle to a block of an [`SdpProblem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockId(usize);

#[derive(Debug, Clone)]
struct BlockSpec {
    dim: usize,
    field: BlockField,
}

#[derive(Debug, Clone)]
struct Constraint {
    terms: Vec<(usize, ComplexMatrix)>,
    relation: Relation,
    rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SdpError {
    UnknownBlock,
    CoefficientShape { block_dim: usize, rows: usize, cols: usize },
    /// Coefficient not symmetric/Hermitian within [`COEFFICIENT_TOL`].
    CoefficientAsymmetric { residual: f64 },
    /// Real-symmetric block given a coefficient with imaginary parts.
    CoefficientNotReal { max_imag: f64 },
    DuplicateTerm { block: usize },
    NoConstraints,
    NonFiniteData,
}

impl fmt::Display for SdpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SdpError::UnknownBlock => write!(f, "constraint references an unknown block"),
            SdpError::CoefficientShape { block_dim, rows, cols } => {
                write!(f, "coefficient is {rows}x{cols} but the block is {block_dim}x{block_dim}")
            }
            SdpError::CoefficientAsymmetric { residual } => {
                write!(f, "coefficient asymmetry {residual:.3e} exceeds tolerance")
            }
            SdpError::CoefficientNotReal { max_imag } => {
                write!(f, "real block coefficient has imaginary parts up to {max_imag:.3e}")
            }
            SdpError::DuplicateTerm { block } => {
                write!(f, "constraint lists block {block} twice")
            }
            SdpError::NoConstraints => write!(f, "problem has no constraints"),
            SdpError::NonFiniteData => write!(f, "problem data contains non-finite values"),
        }
    }
}

impl core::error::Error for SdpError {}

#[derive(Debug, Clone, PartialEq)]
pub enum SdpStatus {
    Optimal,
    /// No PSD assignment satisfies the constraints; the certificate is
    /// the phase-one optimum (how far the right-hand side is from
    /// reachable).
    Infeasible { certificate: f64 },
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Objective value in the problem's own sense.
    pub objective_value: f64,
    /// One PSD matrix per declared block, in declaration order (complex
    /// form; real blocks come back with zero imaginary part).
    pub primal_blocks: Vec<ComplexMatrix>,
    /// Dual multiplier per constraint, in the problem's own sense.
    pub dual_values: Vec<f64>,
    pub duality_gap: f64,
    pub iterations: usize,
    /// Iterate history for diagnostics and duality audits.
    pub iterates: Vec<IterateInfo>,
}

/// Block-structured SDP with trace constraints.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    sense: Sense,
    blocks: Vec<BlockSpec>,
    objective: Vec<Option<ComplexMatrix>>,
    constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn new(sense: Sense) -> Self {
        Self { sense, blocks: Vec::new(), objective: Vec::new(), constraints: Vec::new() }
    }

    pub fn add_block(&mut self, dim: usize, field: BlockField) -> BlockId {
        assert!(dim > 0, "blocks must be non-empty");
        self.blocks.push(BlockSpec { dim, field });
        self.objective.push(None);
        BlockId(self.blocks.len() - 1)
    }

    fn check_coefficient(&self, block: BlockId, coef: &ComplexMatrix) -> Result<(), SdpError> {
        let spec = self.blocks.get(block.0).ok_or(SdpError::UnknownBlock)?;
        if coef.rows() != spec.dim || coef.cols() != spec.dim {
            return Err(SdpError::CoefficientShape {
                block_dim: spec.dim,
                rows: coef.rows(),
                cols: coef.cols(),
            });
        }
        if coef.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SdpError::NonFiniteData);
        }
        let asym = coef.hermitian_asymmetry();
        if asym > COEFFICIENT_TOL {
            return Err(SdpError::CoefficientAsymmetric { residual: asym });
        }
        if spec.field == BlockField::RealSymmetric {
            let max_imag = coef.data().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            if max_imag > COEFFICIENT_TOL {
                return Err(SdpError::CoefficientNotReal { max_imag });
            }
        }
        Ok(())
    }

    /// Objective coefficient for one block (blocks without one contribute
    /// nothing).
    pub fn set_objective(&mut self, block: BlockId, coef: ComplexMatrix) -> Result<(), SdpError> {
        self.check_coefficient(block, &coef)?;
        self.objective[block.0] = Some(coef);
        Ok(())
    }

    /// Adds `sum_terms tr(coef X_block) <relation> rhs`; returns the
    /// constraint index.
    pub fn add_constraint(
        &mut self,
        terms: Vec<(BlockId, ComplexMatrix)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize, SdpError> {
        if !rhs.is_finite() {
            return Err(SdpError::NonFiniteData);
        }
        let mut seen = Vec::with_capacity(terms.len());
        for (block, coef) in &terms {
            self.check_coefficient(*block, coef)?;
            if seen.contains(&block.0) {
                return Err(SdpError::DuplicateTerm { block: block.0 });
            }
            seen.push(block.0);
        }
        self.constraints.push(Constraint {
            terms: terms.into_iter().map(|(b, c)| (b.0, c)).collect(),
            relation,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    /// Solves the problem. Deterministic: identical problems produce
    /// identical solutions.
    pub fn solve(&self) -> Result<SdpSolution, SdpError> {
        if self.constraints.is_empty() {
            return Err(SdpError::NoConstraints);
        }
        let lowered = self.lower();
        let real = solve_real(&lowered);

        let sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let primal_blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(v, spec)| raise_block(&real.blocks[v], spec))
            .collect();
        let dual_values = real.dual.iter().map(|&y| sign * y).collect();
        let status = match real.status {
            RealStatus::Optimal => SdpStatus::Optimal,
            RealStatus::Infeasible { certificate } => SdpStatus::Infeasible { certificate },
            RealStatus::MaxIterations => SdpStatus::MaxIterations,
        };
        Ok(SdpSolution {
            status,
            objective_value: sign * real.objective,
            primal_blocks,
            dual_values,
            duality_gap: (real.objective - real.dual_objective).abs(),
            iterations: real.iterations,
            iterates: real.trace,
        })
    }

    /// Lowers to the real form: minimize, equalities, real blocks.
    /// Original blocks keep their indices; slack blocks are appended.
    fn lower(&self) -> RealSdp {
        let sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut dims: Vec<usize> = self
            .blocks
            .iter()
            .map(|s| match s.field {
                BlockField::RealSymmetric => s.dim,
                BlockField::ComplexHermitian => 2 * s.dim,
            })
            .collect();
        let mut objective: Vec<Vec<f64>> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(v, spec)| match &self.objective[v] {
                Some(c) => lower_coefficient(c, spec, sign),
                None => alloc::vec![0.0; dims[v] * dims[v]],
            })
            .collect();

        let mut constraints = Vec::with_capacity(self.constraints.len());
        let mut rhs = Vec::with_capacity(self.constraints.len());
        for con in &self.constraints {
            let mut row: Vec<(usize, Vec<f64>)> = con
                .terms
                .iter()
                .map(|(v, c)| (*v, lower_coefficient(c, &self.blocks[*v], 1.0)))
                .collect();
            match con.relation {
                Relation::Eq => {}
                Relation::Le => {
                    dims.push(1);
                    objective.push(alloc::vec![0.0]);
                    row.push((dims.len() - 1, alloc::vec![1.0]));
                }
                Relation::Ge => {
                    dims.push(1);
                    objective.push(alloc::vec![0.0]);
                    row.push((dims.len() - 1, alloc::vec![-1.0]));
                }
            }
            constraints.push(row);
            rhs.push(con.rhs);
        }
        RealSdp { dims, objective, constraints, rhs }
    }

    /// JSON dump of the problem for debugging; uses the shared matrix
    /// schema `{"rows", "cols", "re", "im"}`.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{{\"sense\":\"{}\",\"blocks\":[", match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        });
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{{\"dim\":{},\"field\":\"{}\"}}", b.dim, match b.field {
                BlockField::RealSymmetric => "real-symmetric",
                BlockField::ComplexHermitian => "complex-hermitian",
            });
        }
        s.push_str("],\"objective\":[");
        for (i, o) in self.objective.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            match o {
                Some(m) => matrix_json(&mut s, m),
                None => s.push_str("null"),
            }
        }
        s.push_str("],\"constraints\":[");
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str("{\"terms\":[");
            for (j, (v, m)) in c.terms.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{{\"block\":{},\"matrix\":", v);
                matrix_json(&mut s, m);
                s.push('}');
            }
            let _ = write!(s, "],\"relation\":\"{}\",\"rhs\":{}}}", match c.relation {
                Relation::Eq => "=",
                Relation::Le => "<=",
                Relation::Ge => ">=",
            }, c.rhs);
        }
        s.push_str("]}");
        s
    }
}

fn matrix_json(out: &mut String, m: &ComplexMatrix) {
    let _ = write!(out, "{{\"rows\":{},\"cols\":{},\"re\":[", m.rows(), m.cols());
    for (i, z) in m.data().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}", z.re);
    }
    out.push_str("],\"im\":[");
    for (i, z) in m.data().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}", z.im);
    }
    out.push_str("]}");
}

/// Real form of one coefficient. Hermitian blocks use half the embedding
/// `[[Re, -Im], [Im, Re]] / 2` so traces agree with the complex problem.
fn lower_coefficient(c: &ComplexMatrix, spec: &BlockSpec, sign: f64) -> Vec<f64> {
    let n = spec.dim;
    match spec.field {
        BlockField::RealSymmetric => {
            let mut out = alloc::vec![0.0; n * n];
            for r in 0..n {
                for col in 0..n {
                    // Exact symmetry from the Hermitian average.
                    out[r * n + col] = sign * 0.5 * (c.get(r, col).re + c.get(col, r).re);
                }
            }
            out
        }
        BlockField::ComplexHermitian => {
            let nn = 2 * n;
            let mut out = alloc::vec![0.0; nn * nn];
            for r in 0..n {
                for col in 0..n {
                    let z = (c.get(r, col) + c.get(col, r).conj()) * 0.5;
                    let (re, im) = (sign * 0.5 * z.re, sign * 0.5 * z.im);
                    out[r * nn + col] = re;
                    out[(r + n) * nn + (col + n)] = re;
                    out[r * nn + (col + n)] = -im;
                    out[(r + n) * nn + col] = im;
                }
            }
            out
        }
    }
}

/// Maps a solved real block back to complex form. For embedded blocks the
/// J-average `(X' + J X' J^T)/2` is taken implicitly by averaging the
/// diagonal sub-blocks and antisymmetrizing the off-diagonal ones.
fn raise_block(x: &[f64], spec: &BlockSpec) -> ComplexMatrix {
    let n = spec.dim;
    match spec.field {
        BlockField::RealSymmetric => {
            ComplexMatrix::from_fn(n, n, |r, c| {
                Complex64::new(0.5 * (x[r * n + c] + x[c * n + r]), 0.0)
            })
        }
        BlockField::ComplexHermitian => {
            let nn = 2 * n;
            let m = ComplexMatrix::from_fn(n, n, |r, c| {
                let re = 0.5 * (x[r * nn + c] + x[(r + n) * nn + (c + n)]);
                let im = 0.5 * (x[(r + n) * nn + c] - x[r * nn + (c + n)]);
                Complex64::new(re, im)
            });
            m.hermitian_part()
        }
    }
}

#[cfg(test)]
mod tests;
