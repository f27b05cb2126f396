use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument {arg:e} exceeds the evaluation cap {cap:e}")]
    OverflowDomain { arg: f64, cap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("iteration cap hit: {0}")]
    NoConvergence(String),

    #[error("sequence not sorted nonincreasing at index {0}")]
    NotSorted(usize),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),

    #[error("membership failed: {0}")]
    MembershipFailed(String),

    #[error("family of {0} vectors too large for exhaustive phase search")]
    FamilyTooLarge(usize),

    #[error("amplification cap exceeded: {0}")]
    CapExceeded(String),

    #[error("potential is not self-adjoint: {0}")]
    NotSelfAdjoint(String),

    #[error("potential is not positive semidefinite: smallest eigenvalue {0:e}")]
    NotPsd(f64),

    #[error("singular operator: {0}")]
    SingularOperator(String),

    #[error("candidate pool is empty")]
    EmptyPool,
}

pub type Result<T> = std::result::Result<T, Error>;
