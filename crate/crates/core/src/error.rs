//! Error type shared by every module of the library.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the library.
///
/// The variants fall into three families that the command-line front end maps
/// to distinct exit codes: input validation ([`Error::Domain`],
/// [`Error::Validation`], [`Error::AssumptionViolation`],
/// [`Error::Degenerate`]), numerical failures ([`Error::Accuracy`],
/// [`Error::Evaluation`], [`Error::Numerical`], [`Error::Resolution`],
/// [`Error::GapClosure`], [`Error::Sampling`], [`Error::Continuation`]) and
/// configuration problems ([`Error::Config`]).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A structural precondition on an input value does not hold.
    #[error("validation error: {0}")]
    Validation(String),

    /// The two curve functions share a zero on the unit circle.
    #[error("curve functions vanish simultaneously at angle {angle}")]
    AssumptionViolation { angle: f64 },

    /// A point configuration makes a kernel denominator vanish.
    #[error("degenerate configuration at entry ({i}, {j}): {detail}")]
    Degenerate { i: usize, j: usize, detail: String },

    /// An integrand or matrix evaluation produced a non-finite value.
    #[error("non-finite evaluation at theta = {theta}: {detail}")]
    Evaluation { theta: f64, detail: String },

    /// An adaptive rule failed to reach the requested tolerance.
    #[error("accuracy target missed in {op}: estimate {estimate}, error bound {error_bound}")]
    Accuracy {
        op: &'static str,
        estimate: f64,
        error_bound: f64,
    },

    /// A generic numerical failure (non-convergence, singular factorisation).
    #[error("numerical failure in {op}: {detail}")]
    Numerical { op: &'static str, detail: String },

    /// An argument increment along a sampled curve was too large to unwrap.
    #[error("argument increment {increment} at node {node} exceeds the unwrapping threshold")]
    Resolution { node: usize, increment: f64 },

    /// A determinant sample came within the underflow guard of zero.
    #[error("determinant sample {node} is numerically zero (relative size {relative})")]
    GapClosure { node: usize, relative: f64 },

    /// A rejection sampler exhausted its proposal budget.
    #[error("sampling budget exhausted: {0}")]
    Sampling(String),

    /// Both the direct and the a/b-swapped representation are singular.
    #[error("no regular representation for the point configuration: {0}")]
    Continuation(String),

    /// Inconsistent configuration (e.g. ensemble size mismatch).
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn numerical(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Numerical {
            op,
            detail: detail.into(),
        }
    }

    /// True for errors caused by invalid inputs rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::Validation(_)
                | Error::AssumptionViolation { .. }
                | Error::Degenerate { .. }
                | Error::Config(_)
        )
    }
}
