use std::path::PathBuf;

use thiserror::Error;

/// Which side of a binary distance query an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::First => f.write_str("first"),
            Side::Second => f.write_str("second"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("predicate refers to x{index} but the signal has {dims} dimension(s)")]
    DimensionOutOfRange { index: usize, dims: usize },

    #[error("unbounded or malformed interval at byte {position}: {message}")]
    BadInterval { position: usize, message: String },

    #[error("trace has {available} step(s) after t but the formula needs {required}")]
    TraceTooShort { required: usize, available: usize },

    #[error("formula contains a negation; convert it to negation normal form first")]
    NegationPresent,

    #[error("until is not supported by the area-of-satisfaction conversion")]
    UntilUnsupported,

    #[error("the {0} formula has an empty language")]
    EmptyLanguage(Side),

    #[error("{what} budget of {limit} exceeded")]
    BudgetExceeded { what: &'static str, limit: usize },

    #[error("boxes do not overlap in time")]
    NoOverlap,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("horizon {horizon} exceeds the time bound {bound}")]
    HorizonExceeded { horizon: usize, bound: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("value {value} exceeds x_max {x_max} in dimension {dim}")]
    NormalizationViolated { dim: usize, value: String, x_max: String },

    #[error("LP format error on line {line}: {message}")]
    LpFormat { line: usize, message: String },

    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Error {
        Error::File { path: path.into(), message: self.to_string() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
