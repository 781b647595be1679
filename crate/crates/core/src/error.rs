use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("malformed record {record}: {reason}")]
    MalformedRecord { record: usize, reason: String },

    #[error("expected {expected} vectors, found {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("file holds more records than the declared {0}")]
    TrailingData(usize),

    #[error("duplicate token {0:?}")]
    DuplicateToken(String),

    #[error("invalid token {0:?}: tokens must be non-empty and contain no space or newline")]
    InvalidToken(String),

    #[error("vector for token {0:?} is all zeros and cannot be normalized")]
    ZeroVector(String),

    #[error("embedding dimensionality must be positive")]
    ZeroDimension,

    #[error("embedding set must contain at least one token")]
    EmptySet,

    #[error("vocabulary cutoff must be at least 1")]
    InvalidCutoff,

    #[error("vocabulary view admits no tokens")]
    EmptyView,

    #[error("unknown token {0:?}")]
    UnknownToken(String),

    #[error("vector dimensions differ: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("cosine is undefined for a zero vector")]
    ZeroNorm,

    #[error("no candidates left to score after applying constraints")]
    EmptyCandidates,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dataset line {line}: {reason}")]
    DatasetSyntax { line: usize, reason: String },

    #[error("dataset is empty")]
    EmptyDataset,
}
