use thiserror::Error;

use crate::solver::{BlowUpDiagnostic, ConvergenceReport};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("multiplier is not finite at wavevector {wavevector:?}")]
    NonFiniteMultiplier { wavevector: Vec<f64> },

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("state is not neutral: mean(v) - mean(w) = {net_charge:e}")]
    NotNeutral { net_charge: f64 },

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("picard iteration did not converge after {} iterations", .0.iterations.len())]
    NotConverged(Box<ConvergenceReport>),

    #[error("solution blew up after t = {}", .0.last_finite_time)]
    BlowUp(Box<BlowUpDiagnostic>),

    #[error("no admissible frequency cutoff: {0}")]
    NoAdmissibleCutoff(String),

    #[error("experiment refused: {0}")]
    Refused(String),

    #[error("bad snapshot: {0}")]
    BadSnapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
