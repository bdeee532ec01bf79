use thiserror::Error;

use crate::group::{ValidationReport, Violation};

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input that is not even shaped like a group or action.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("group axiom violated: {0}")]
    Axiom(Violation),

    #[error("invalid automorphism action: {}", .0.violation.as_ref().map(|v| v.to_string()).unwrap_or_default())]
    InvalidAction(ValidationReport),

    #[error("{what} index {index} out of range (size {size})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("unsupported group parameter: {0}")]
    Unsupported(String),

    #[error("operands live on different groups")]
    GroupMismatch,

    #[error("not a probability density: {0}")]
    InvalidDensity(String),

    #[error("exponent p = {0} is below 1")]
    BadExponent(f64),

    #[error("K is not a standard cyclic group")]
    NonCyclic,

    #[error("grid error: {0}")]
    Grid(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
