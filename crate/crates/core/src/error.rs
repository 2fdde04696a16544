use thiserror::Error;

/// Errors raised when an input falls outside the domain of an operation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("vector norm {norm} is too far from 1 to renormalize")]
    NotUnit { norm: f64 },
    #[error("outcome magnitude must be positive and finite, got {0}")]
    BadMagnitude(f64),
    #[error("invalid outcome label {0}")]
    InvalidLabel(i64),
    #[error("{0}")]
    Domain(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
