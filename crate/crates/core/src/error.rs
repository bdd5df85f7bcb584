use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fractional order {0} outside (0, 1]")]
    InvalidOrder(f64),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// A non-finite state component appeared while integrating.
    #[error("solution diverged at node {node}")]
    Divergence { node: usize },

    #[error("no endemic equilibrium: reproduction number {r0} <= 1")]
    NoEndemicEquilibrium { r0: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonFailed { iterations: usize, residual: f64 },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("invalid parameters: {0}")]
    Params(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
