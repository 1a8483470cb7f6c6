//! Adaptive FIR filtering for unknown-system identification.
//!
//! The crate covers the whole optimizer ladder for the quadratic mean-square
//! error surface of a transversal filter:
//!
//! * [`estimation`]: sample estimates of `R`, `p` and `σ_d²`, the exact Wiener
//!   solve, Newton's step and deterministic steepest descent.
//! * [`adapt`]: sample-by-sample LMS and block transform-domain LMS, plus the
//!   DFT machinery the latter needs.
//! * [`metrics`]: MSE, misadjustment, convergence detection and accuracy.
//! * [`harness`]: step-size sweeps, summary/trace files and the CLI.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod adapt;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod signal;

pub use error::{Error, Result};

/// Weight or iterate magnitude beyond which a run is flagged as diverged.
pub const DIVERGENCE_CEILING: f64 = 1e12;
