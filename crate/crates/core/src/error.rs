//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or parameters. Messages name the offending key.
    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed tag file (bad magic, truncated record, ...).
    #[error("bad tag file: {0}")]
    Format(String),

    /// Tag file records out of order.
    #[error("non-monotone at record {0}")]
    NonMonotone(u64),

    /// Structurally valid input that cannot be analyzed as requested
    /// (missing channel, too few peaks, empty gate, ...).
    #[error("data: {0}")]
    Data(String),

    /// Numerical failure (no root in bracket, fit divergence, infeasible
    /// moments, ...).
    #[error("numerical: {0}")]
    Numerics(String),
}

pub type Result<T> = std::result::Result<T, Error>;
