use thiserror::Error;

use crate::expr::{EvalError, ParseError};

/// Errors raised by the library. CLI exit codes are derived from these.
#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution too high: {what} = {value} exceeds the supported maximum {max}")]
    ResolutionTooHigh {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no bounded weight function for the {0} family on [-1, 1]")]
    UnsupportedWeight(&'static str),

    #[error("index {index} out of range for basis of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("evaluation error: {0}")]
    Eval(#[from] EvalError),

    #[error("evaluation failed at point {index} (t = {t}): {source}")]
    PointEval {
        index: usize,
        t: f64,
        #[source]
        source: EvalError,
    },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("singular matrix: pivot {pivot:e} below threshold")]
    SingularMatrix { pivot: f64 },

    #[error("singular system at iteration {iteration}: pivot {pivot:e} below threshold")]
    Conditioning { iteration: usize, pivot: f64 },

    #[error("unknown builtin problem '{0}'")]
    UnknownBuiltin(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("problem '{0}' has no exact solution")]
    MissingExact(String),

    #[error("empty resolution range")]
    EmptyRange,
}

pub type Result<T> = std::result::Result<T, Error>;
