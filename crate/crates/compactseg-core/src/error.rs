//! Error type shared by the whole library.

use std::fmt;

/// Errors produced by field operations, solvers and metrics.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two fields that must share a grid had different sizes.
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    /// An operation that divides by the foreground area received an empty mask.
    EmptyRegion,
    /// A configuration or constructor argument was out of range.
    InvalidParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, actual } => write!(
                f,
                "dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, actual.0, actual.1
            ),
            Error::EmptyRegion => write!(f, "empty foreground region"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
