use thiserror::Error;

/// Errors raised by the exact engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("non-unit leading term: {0}")]
    NonUnitLeadingTerm(String),
    #[error("exponential of a non-nilpotent series: {0}")]
    NonNilpotentExp(String),
    #[error("truncation window too small: {0}")]
    TruncationTooSmall(String),
    #[error("polynomial is not expressible in root coordinates")]
    NotRootExpressible,
    #[error("roots are linearly dependent")]
    DependentRoots,
    #[error("odd class appears twice: b_{k}^{j}")]
    OddClassSquared { k: usize, j: usize },
    #[error("invalid pairing spec: {0}")]
    InvalidSpec(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
