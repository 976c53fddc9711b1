//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by constructors and operations.
///
/// Validation variants name the invariant that failed rather than the call
/// site, so they stay meaningful when surfaced through the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A probability vector, matrix column, or joint distribution does not
    /// sum to 1 within tolerance.
    #[error("{what}: entries sum to {sum}, expected 1")]
    NotNormalized { what: String, sum: f64 },

    /// A probability entry lies outside [0, 1] by more than the entry slack.
    #[error("{what}: entry {index} is {value}, outside [0, 1]")]
    EntryOutOfRange {
        what: String,
        index: usize,
        value: f64,
    },

    /// A distribution or matrix has no entries.
    #[error("{what} must be non-empty")]
    Empty { what: &'static str },

    /// A matrix differs from its conjugate transpose beyond tolerance.
    #[error("matrix is not Hermitian: max |A - A^H| deviation is {max_dev}")]
    NotHermitian { max_dev: f64 },

    /// A density-matrix trace differs from 1 beyond tolerance.
    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    /// An eigenvalue lies outside [0, 1] beyond the clamping tolerance.
    #[error("eigenvalue {value} lies outside [0, 1] beyond tolerance")]
    EigenvalueOutOfRange { value: f64 },

    /// Operand dimensions do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A guard against excessive computation was triggered.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// A forward-reachable trajectory carries zero reverse weight, so its
    /// entropy production is infinite.
    #[error(
        "infinite entropy production on trajectory (x0={x0}, k={k}, x1={x1}): \
         zero reverse weight on the forward support"
    )]
    InfiniteSigma { x0: usize, k: usize, x1: usize },

    /// A built-in consistency check failed.
    #[error("self-check failed: {0}")]
    SelfCheck(String),
}
