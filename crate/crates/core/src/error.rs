//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by tree algebra, enumeration and statistics.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands disagree on degree or depth.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A vertex, level or truncation depth is out of range.
    #[error("out of range: {0}")]
    Range(String),

    /// Invalid permutation data (not a bijection of {{0..d-1}}).
    #[error("invalid permutation: {0}")]
    InvalidPerm(String),

    /// Invalid tree degree (must be at least 2 and at most 255).
    #[error("invalid degree: {0}")]
    InvalidDegree(usize),

    /// Text did not conform to the portrait grammar.
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    /// An enumeration exceeded its element cap.
    #[error("capacity exceeded: cap {cap}, reached at least {reached}")]
    Capacity { cap: usize, reached: usize },

    /// A subgroup argument is not contained in the ambient group.
    #[error("containment failure: {0}")]
    Containment(String),

    /// A subgroup argument is not normal where normality is required.
    #[error("normality failure: {0}")]
    NotNormal(String),

    /// A construction's built-in postcondition check failed.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// The requested operation has no valid strategy for this input.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
