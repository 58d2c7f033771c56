use thiserror::Error;

use crate::convert::CoverResult;

#[derive(Debug, Error)]
pub enum FairError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("element {element} is outside the ground set of size {size}")]
    UnknownElement { element: usize, size: usize },

    #[error("fairness difference is undefined for an empty solution")]
    EmptySolution,

    #[error("threshold {tau} exceeds f(U) = {max}")]
    TauInfeasible { tau: f64, max: f64 },

    #[error("ground set exhausted at f(S) = {value} before reaching the threshold")]
    Exhausted { value: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("coordinate {index} would reach {value} > 1")]
    CoordinateOverflow { index: usize, value: f64 },

    #[error("fractional solution carries no base decomposition")]
    MissingCertificate,

    #[error("all size guesses up to {max_kappa} failed the value gate")]
    GuessesExhausted {
        max_kappa: usize,
        best: Option<Box<CoverResult>>,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = FairError> = std::result::Result<T, E>;
