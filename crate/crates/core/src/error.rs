use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("shape mismatch: expected {expected:?} (fields, modes), got {actual:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("invalid kernel parameters: {0}")]
    InvalidKernel(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("non-finite state at t = {t} (step {step}); the time step is too large for the resolved frequencies")]
    NonFinite { t: f64, step: usize },

    #[error("mean-correction fixed point did not converge after {iterations} iterations (last L1 change {residual:e})")]
    FixedPointDiverged { iterations: usize, residual: f64 },

    #[error("model `{0}` has no classical mean correction")]
    NoClassicalCorrection(String),

    #[error("time grid mismatch: no reference sample at t = {0}")]
    TimeGridMismatch(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
