//! One error type for the whole crate; variants map to the distinct failure
//! classes a caller may want to branch on.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller handed in something structurally invalid (negative budget,
    /// unordered interval, non-probability masses, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Adaptive quadrature could not reach the requested tolerance, or the
    /// integrand was non-finite on a set of positive mass.
    #[error("integration failure: {0}")]
    Integration(String),

    /// A root bracket could not be grown or a bisection did not meet its
    /// residual target; carries the last residual for diagnostics.
    #[error("no convergence in {what}: residual {residual:e} after {iterations} iterations")]
    Convergence {
        what: String,
        residual: f64,
        iterations: usize,
    },

    /// A query landed outside the sampled range of a curve and extension was
    /// not enabled.
    #[error("out of range: {0}")]
    Range(String),

    /// A discretised solve could not certify its optimality sandwich at the
    /// given grid step; re-run with a finer step.
    #[error("grid too coarse: {0}")]
    Resolution(String),

    /// The randomised game has no equilibrium under the given curve/budgets.
    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),

    /// Serialized artifact (CSV/JSON) malformed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A failure from a lower-level solve, annotated with where it happened.
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// Wrap the error with a note about where it happened.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }
}
