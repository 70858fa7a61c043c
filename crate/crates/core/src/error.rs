use std::io;

use thiserror::Error;

pub type Result<T, E = KlsError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum KlsError {
    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("{what} is not real-valued (max imaginary part {residual:e})")]
    NotReal { what: &'static str, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exponent constraint violated: {0}")]
    Constraint(String),

    #[error("inadmissible estimate exponents: {0}")]
    Inadmissible(String),

    #[error("Picard iteration did not converge in {iterations} iterations (ratios {ratios:?})")]
    NoConvergence { iterations: usize, ratios: Vec<f64> },

    #[error("history not time-sorted at row {0}")]
    UnsortedHistory(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
