use std::io;

use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (bad seed, non-maximal taps, zero lengths...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A scalar argument outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// Streams or vectors whose shapes do not line up.
    #[error("structural error: expected length {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// A documented precondition of an operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Input that makes the algorithm undefined, such as an all-zero row.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A value left the representable interval.
    #[error("range error at index {index}: {value} is outside [-1, 1)")]
    Range { index: usize, value: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}
