//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by construction and evaluation routines.
///
/// Numerical conventions (ratios with `1/0 = inf`, suprema over empty sets)
/// are *not* errors; they produce legal extended-real values. Errors are
/// reserved for malformed inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("action index {index} out of range: spec has {n_actions} actions")]
    ActionOutOfRange { index: usize, n_actions: usize },

    #[error("non-finite value in {context}: {value}")]
    NonFinite { context: &'static str, value: f64 },

    #[error("loss evaluation returned NaN for action {action} at {point}")]
    NanLoss { action: usize, point: String },

    #[error("parameter point {point} is not a grid point of table loss `{label}`")]
    PointNotInTable { point: String, label: String },

    #[error("{field} must lie in {range}, got {value}")]
    OutOfRange {
        field: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("{0}")]
    Invalid(String),

    #[error("flag `{flag}` violated: L(a{action}, {point}) = {value}")]
    FlagViolation {
        flag: &'static str,
        action: usize,
        point: String,
        value: f64,
    },

    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn config(line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
