use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: row {row}: {message}")]
    Format {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("input contains no data")]
    EmptyInput,

    #[error("label column {column} out of range (row has {width} fields)")]
    LabelColumnOutOfRange { column: usize, width: usize },

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid number of clusters: k={k} for {n} objects")]
    InvalidClusterCount { k: usize, n: usize },

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no informative k: every candidate has a degenerate null spread")]
    NoInformativeK,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
