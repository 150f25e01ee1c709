use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("malformed field file {path}: {reason}")]
    MalformedFile { path: PathBuf, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure at iteration {iter}: {reason}")]
    NumericalFailure { iter: usize, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported anisotropy: {0}")]
    UnsupportedAnisotropy(String),

    #[error("unknown scenario `{name}`; available: {}", available.join(", "))]
    Lookup { name: String, available: Vec<String> },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid family parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
