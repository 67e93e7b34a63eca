//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix or list dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An input failed a structural invariant (Hermitian, PSD, descending, ...).
    #[error("validation failed: {0}")]
    Validation(String),

    /// Quadrature stopped refining before reaching the requested tolerance.
    /// Carries the best estimate so callers can decide whether to use it.
    #[error("quadrature did not reach tol {tol:.1e}: best estimate {best:.12e}, error ~{err:.1e}")]
    Accuracy { best: f64, err: f64, tol: f64 },

    /// Operation restricted to small sizes (e.g. permutation enumeration).
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    /// Requested group structure cannot fit in the antenna dimension.
    #[error("infeasible structure: {0}")]
    InfeasibleStructure(String),

    /// Numerically meaningless request (e.g. repeated Vandermonde nodes).
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
}

pub type Result<T> = std::result::Result<T, Error>;
