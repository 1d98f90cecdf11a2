//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the toolkit. Messages carry the originating
/// component so CLI diagnostics can name the failing module.
#[derive(Debug, Error)]
pub enum Error {
    /// Vector/grid lengths disagree.
    #[error("{context}: dimension mismatch: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// An argument is outside its admissible range.
    #[error("{0}")]
    Parameter(String),

    /// A computation needs more observations than the sample provides.
    #[error("{0}")]
    InsufficientData(String),

    /// A theorem hypothesis or type invariant is violated.
    #[error("{0}")]
    Hypothesis(String),

    /// Covariance factorization failed even after jitter escalation.
    #[error("gp-sim: covariance matrix is singular after jitter escalation")]
    SingularCovariance,

    /// The finite-dimensional density-ratio oracle cannot be evaluated.
    #[error("bayes-oracle: oracle unavailable: {0}")]
    OracleUnavailable(String),

    /// Model fitting failed (singular system, non-finite entries, ...).
    #[error("{0}")]
    Fit(String),

    /// Malformed CSV input; `line` is 1-based.
    #[error("csv: line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Requested combination is not supported.
    #[error("{0}")]
    Unsupported(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn insufficient(msg: impl Into<String>) -> Self {
        Error::InsufficientData(msg.into())
    }

    pub fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    pub fn fit(msg: impl Into<String>) -> Self {
        Error::Fit(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
