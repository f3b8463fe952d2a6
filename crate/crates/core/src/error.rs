//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WclError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singularity guard: {0}")]
    Singularity(String),

    #[error("parameter projection failed to converge: {0}")]
    Projection(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, WclError>;
