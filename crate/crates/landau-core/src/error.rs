//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("distribution support violation: nonzero value {value:e} on the outer velocity layer at node {node:?}")]
    SupportViolation { node: Vec<usize>, value: f64 },

    #[error("CFL violation: dt = {dt:e} exceeds stable limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("admissibility check failed: {0}")]
    Admissibility(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("inner minimization did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
