use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical drift: {what} ({magnitude:.3e} exceeds {tolerance:.1e})")]
    NumericalDrift {
        what: &'static str,
        magnitude: f64,
        tolerance: f64,
    },

    #[error("superoperator is numerically defective: eigenvector condition number {condition:.3e} exceeds {limit:.1e}")]
    NearDefective { condition: f64, limit: f64 },

    #[error("series too short: delay size {delay_size} requires {required} points, found {found}")]
    SeriesTooShort {
        delay_size: usize,
        required: usize,
        found: usize,
    },

    #[error("delay matrix clips dimension d_a = {advertised}: need N >= {required}, found N = {delay_size}")]
    DimensionClipped {
        advertised: usize,
        required: usize,
        delay_size: usize,
    },

    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("qasm: {0}")]
    Qasm(String),

    #[error("{}: {reason}", path.display())]
    Io { path: PathBuf, reason: std::io::Error },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            reason: source,
        }
    }
}
