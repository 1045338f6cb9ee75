//! Error types shared across the library.

use thiserror::Error;

/// Errors from core types, environment construction, and the oracle.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid preference matrix: {0}")]
    InvalidMatrix(String),

    #[error("arm index {arm} out of range for K={k}")]
    ArmOutOfRange { arm: usize, k: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("round {round} has no Condorcet winner")]
    NoCondorcetWinner { round: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
