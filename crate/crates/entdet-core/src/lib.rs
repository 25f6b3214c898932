//! Simulation and certification pipeline for entanglement detection of
//! two spatial qutrits.
//!
//! The crate covers the full chain from state preparation to certified
//! detection:
//!
//! * [`qlin`] — dense complex linear algebra and bipartite 9-dimensional
//!   state primitives (partial trace, partial transpose, Hermitian
//!   eigendecomposition).
//! * [`mub`] — the 10 mutually unbiased bases of the two-qutrit Hilbert
//!   space, built from GF(9) arithmetic, and their 90 projectors.
//! * [`statesim`] — synthesis of slit-encoded qutrit pairs from a beam
//!   profile and programmable slit transmissions.
//! * [`measure`] — exact and shot-noise-sampled projection probabilities
//!   under a configurable measurement schedule.
//! * [`sdp`] — a dense primal-dual interior-point solver for the small
//!   semidefinite programs the certification layer generates.
//! * [`witness`] — incremental guess-state inference, optimal trace-one
//!   decomposable witnesses, and reliable certified bounds on their
//!   expectation values.
//! * [`tomo`] — linear-inversion reconstruction, forced-purity fitting,
//!   and I-concurrence.
//!
//! Everything here is pure computation over owned values; no IO. File
//! formats and the command-line front end live in the companion
//! `entdet-cli` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod measure;
pub mod mub;
pub mod qlin;
pub mod rng;
pub mod sampling;
pub mod sdp;
pub mod statesim;
pub mod tomo;
pub mod witness;

pub use qlin::{ComplexMatrix, DensityMatrix, PureState, Subsystem};
