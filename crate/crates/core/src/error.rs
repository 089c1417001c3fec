use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are split by what went wrong rather than where, so callers (the
/// CLI in particular) can map them onto a stable exit-code contract:
/// configuration problems, data/artifact problems and prediction-input
/// problems are distinguishable.
#[derive(Debug, Error)]
pub enum Error {
    /// Column layout does not match the declared schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A cell could not be parsed; `row` is the 1-based data row.
    #[error("parse error at data row {row}: {msg}")]
    Parse { row: usize, msg: String },

    /// The data violates a dataset invariant (duplicate ids, out-of-range
    /// targets, mismatched artifact versions).
    #[error("integrity error: {0}")]
    Integrity(String),

    /// An operation was called with an invalid parameter value.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The dataset is too small for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A categorical label was not seen when the encoding was fitted.
    #[error("unknown category {label:?} in column {column:?}")]
    UnknownCategory { column: String, label: String },

    /// A record id does not exist in the dataset.
    #[error("unknown record id {0:?}")]
    UnknownId(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
