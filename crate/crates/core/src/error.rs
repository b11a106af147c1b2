use std::io;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a permutation of 1..={n}: {values:?}")]
    InvalidPermutation { n: usize, values: Vec<usize> },

    #[error("profile must contain at least one trader")]
    EmptyProfile,

    #[error("row {row} has length {len}, expected {expected}")]
    RowLength { row: usize, len: usize, expected: usize },

    #[error("size mismatch: expected n = {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("n = {n} exceeds the brute-force bound {bound}")]
    BoundExceeded { n: usize, bound: usize },

    #[error("allocation {0} is not locally optimal")]
    NotLocallyOptimal(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("checkpoint mismatch: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
