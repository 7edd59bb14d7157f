//! Error type shared by every fallible operation in the crate.

use std::fmt;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by model evaluation, special functions, quadrature, and
/// the Monte Carlo estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates one of the model invariants. `field` names the
    /// offending input so front ends can point at the exact knob.
    InvalidParam {
        /// Name of the offending parameter.
        field: &'static str,
        /// Human-readable description of the violated constraint.
        reason: String,
    },
    /// The operation was evaluated at a point where the model is singular,
    /// e.g. a node sitting exactly on the receiver with no path-loss offset.
    SingularInput {
        /// Description of the singular configuration.
        what: String,
    },
    /// The argument lies outside the mathematical domain supported by a
    /// special function.
    Domain {
        /// Description of the unsupported argument combination.
        what: String,
    },
    /// An iterative numerical routine exhausted its budget without reaching
    /// the requested tolerance.
    NonConvergent {
        /// Which routine failed to converge.
        what: String,
        /// Error estimate achieved when the budget ran out.
        achieved: f64,
        /// Tolerance that was requested.
        requested: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParam { field, reason } => {
                write!(f, "invalid parameter `{field}`: {reason}")
            }
            Error::SingularInput { what } => write!(f, "singular input: {what}"),
            Error::Domain { what } => write!(f, "domain error: {what}"),
            Error::NonConvergent {
                what,
                achieved,
                requested,
            } => write!(
                f,
                "{what} did not converge: error estimate {achieved:.3e} exceeds tolerance {requested:.3e}"
            ),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    /// Shorthand for an [`Error::InvalidParam`] with a formatted reason.
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_names_the_offending_field() {
        let err = Error::invalid("pathloss_exponent", "must exceed 2");
        assert_eq!(
            err.to_string(),
            "invalid parameter `pathloss_exponent`: must exceed 2"
        );
    }

    #[test]
    fn display_reports_convergence_numbers() {
        let err = Error::NonConvergent {
            what: "adaptive quadrature".into(),
            achieved: 1e-3,
            requested: 1e-8,
        };
        let msg = err.to_string();
        assert!(msg.contains("adaptive quadrature"));
        assert!(msg.contains("1.000e-3"));
    }
}
