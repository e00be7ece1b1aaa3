//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by model construction and by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// A model parameter was outside its admissible range.
    #[error("invalid parameter {name} = {value}: must satisfy {requirement}")]
    InvalidParameter {
        /// Name of the offending parameter.
        name: String,
        /// Rejected value.
        value: f64,
        /// Human-readable admissibility condition.
        requirement: &'static str,
    },

    /// A function argument fell outside the function's domain.
    #[error("{name} = {value} is outside {domain}")]
    OutOfDomain {
        /// Name of the argument.
        name: &'static str,
        /// Rejected value.
        value: f64,
        /// The domain it must lie in.
        domain: &'static str,
    },

    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        /// Operation that detected the mismatch.
        context: &'static str,
        /// Expected dimension.
        expected: usize,
        /// Dimension actually supplied.
        found: usize,
    },

    /// A structural requirement on model data failed (stochasticity, regularity, ...).
    #[error("invalid model structure: {0}")]
    InvalidStructure(String),

    /// A model assumption failed its numeric check (equilibrium existence,
    /// hyperbolicity, ...). The conclusion that depends on it is withheld.
    #[error("model assumption violated: {0}")]
    HypothesisViolation(String),

    /// The operation is not defined for this model variant.
    #[error("unsupported model variant: {0}")]
    Unsupported(String),

    /// An operation's stated precondition does not hold for the given inputs.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An iterative routine failed to reach its tolerance.
    #[error("numerical failure in {context}: {detail}")]
    NumericalFailure {
        /// The routine that failed.
        context: &'static str,
        /// What went wrong.
        detail: String,
    },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
