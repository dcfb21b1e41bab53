use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A formula was evaluated outside its domain (e.g. a nonpositive logarithm).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition `{name}` violated: {detail}")]
    Precondition { name: &'static str, detail: String },

    #[error("quadrature did not converge after {nodes} nodes (last change {last_change:e})")]
    QuadratureNonConvergence { nodes: usize, last_change: f64 },

    #[error("covariance is not positive definite after jitter; smallest eigenvalue estimate {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration budget exceeded: {needed:e} candidates > budget {budget:e}")]
    BudgetExceeded { needed: f64, budget: f64 },

    #[error("exponent p = {p} below required minimum {required}")]
    ExponentTooSmall { p: f64, required: f64 },

    #[error("{what} not defined at index {index}")]
    IndexOutOfRange { what: &'static str, index: usize },

    #[error("beta = {beta} lies outside (0, 1)")]
    BetaOutOfRange { beta: f64 },

    #[error("condition `{name}` fails: lhs {lhs} > rhs {rhs}")]
    ConditionFailed { name: &'static str, lhs: f64, rhs: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },
}

impl Error {
    pub(crate) fn pre(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            name,
            detail: detail.into(),
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
