//! Crate-wide error type. Variants are grouped by what the caller can do
//! about them, not by which module raised them.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum HjError {
    /// A structural precondition on inputs failed (grid spacing, lengths,
    /// array shapes, parameter ranges).
    InvalidInput(String),
    /// Two grid functions (or a grid and a function) do not share a shape.
    GridMismatch(String),
    /// An operation required convexity in `p` and the Hamiltonian is not
    /// convex (or has no unique minimizer).
    NotConvex(String),
    /// An operation required an `(x, t)`-independent Hamiltonian.
    TimeDependent(String),
    /// A flux-limiter level below the attainable minimum `A_0`.
    LimiterBelowMinimum(String),
    /// A time step too large for the monotone CFL bound.
    CflViolation(String),
    /// NaN or infinity detected mid-run.
    NonFinite(String),
    /// A bracketing or iterative search failed to converge.
    SearchFailure(String),
    /// Rejection sampling exhausted its attempt budget.
    GeneratorFailure(String),
    /// Filesystem failure while writing results.
    Io(String),
}

pub type Result<T> = std::result::Result<T, HjError>;

impl fmt::Display for HjError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HjError::InvalidInput(m) => write!(f, "invalid input: {m}"),
            HjError::GridMismatch(m) => write!(f, "grid mismatch: {m}"),
            HjError::NotConvex(m) => write!(f, "not convex: {m}"),
            HjError::TimeDependent(m) => write!(f, "time-dependent Hamiltonian: {m}"),
            HjError::LimiterBelowMinimum(m) => write!(f, "limiter below minimum: {m}"),
            HjError::CflViolation(m) => write!(f, "CFL violation: {m}"),
            HjError::NonFinite(m) => write!(f, "non-finite value: {m}"),
            HjError::SearchFailure(m) => write!(f, "search failure: {m}"),
            HjError::GeneratorFailure(m) => write!(f, "generator failure: {m}"),
            HjError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for HjError {}

impl From<std::io::Error> for HjError {
    fn from(e: std::io::Error) -> Self {
        HjError::Io(e.to_string())
    }
}
