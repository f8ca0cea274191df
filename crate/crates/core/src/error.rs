use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("degenerate cloud: all points are identical")]
    DegenerateCloud,

    #[error("non-finite coordinate in point {index}")]
    NonFinite { index: usize },

    #[error("insufficient points: requested {requested}, cloud has {available}")]
    InsufficientPoints { requested: usize, available: usize },

    #[error("input below minimum scale: {available} points, pipeline needs at least {required}")]
    BelowMinimumScale { available: usize, required: usize },

    #[error("log domain: {0}")]
    LogDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("benchmark refused: {0}")]
    BenchRefused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(message: impl Into<String>) -> Error {
    Error::InvalidParameter(message.into())
}
