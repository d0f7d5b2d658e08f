//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by kernel construction, norm evaluation, simulation and
/// classification.
#[derive(Debug, Error)]
pub enum StableError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("negative value where nonnegative is required: {0}")]
    NegativeValue(String),

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("signed kernel where a nonnegative kernel is required: {0}")]
    SignedKernel(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("shift out of range: {0}")]
    ShiftOutOfRange(String),

    #[error("invalid weight function: {0}")]
    InvalidWeight(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("kernel spec: {0}")]
    KernelSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, StableError>;
