//! CLI-level failure type that carries the process exit code.
//!
//! Exit code contract:
//!
//! - `0` — success.
//! - `1` — the input was rejected: malformed scenario files, parameters or
//!   matrices outside their domains, dimension mismatches, unsupported model
//!   combinations.
//! - `2` — the input was well formed but a mathematical hypothesis failed to
//!   hold or a numerical procedure did not converge.

use std::fmt;

use episcale_core::Error;

/// An error plus the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    /// Invalid input (exit code 1).
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    /// The exit code for the process.
    pub fn code(&self) -> u8 {
        self.code
    }

    /// Wraps a core error, prefixing its message with `context`.
    pub fn in_context(context: &str, error: Error) -> Self {
        let base = Self::from(error);
        Self {
            code: base.code,
            message: format!("{context}: {}", base.message),
        }
    }

    /// A failure with a custom message that exits with the same code as
    /// `error` would.
    pub fn with_class_of(error: &Error, message: impl Into<String>) -> Self {
        Self {
            code: Self::from(error.clone()).code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match &error {
            Error::InvalidParameter { .. }
            | Error::OutOfDomain { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidStructure(_)
            | Error::Unsupported(_) => 1,
            Error::HypothesisViolation(_)
            | Error::Precondition(_)
            | Error::NumericalFailure { .. } => 2,
            // The error enum is non-exhaustive; treat future classes as
            // runtime failures.
            _ => 2,
        };
        Self {
            code,
            message: error.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(error: std::io::Error) -> Self {
        Self::input(error.to_string())
    }
}
