use thiserror::Error;

/// Failures raised while parsing or evaluating expressions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("variable `{name}` at byte {offset} is out of range for dimension {dim}")]
    VariableOutOfRange { name: String, offset: usize, dim: usize },

    #[error("exponent at byte {offset} must not depend on variables; write exp(y*ln(x)) instead")]
    NonConstantExponent { offset: usize },

    #[error("domain error in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: String },

    #[error("parameter `{0}` has no value")]
    UnboundParameter(String),

    #[error("no value supplied for variable `{0}`")]
    MissingVariable(String),
}

/// Top-level error for the dynamics engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("base point mismatch: {0}")]
    BaseMismatch(&'static str),

    #[error("dimension mismatch: expected {expected}, got {actual} ({what})")]
    DimensionMismatch { what: &'static str, expected: usize, actual: usize },

    #[error("mass matrix is singular (condition estimate {condition:e})")]
    SingularMassMatrix { condition: f64 },

    #[error("Legendre inversion did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("action is undefined for a system with non-potential forces")]
    NonPotentialSystem,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("at t = {t}: {source}")]
    AtTime { t: f64, source: Box<Error> },
}

impl Error {
    pub fn at_time(self, t: f64) -> Self {
        match self {
            e @ Error::AtTime { .. } => e,
            e => Error::AtTime { t, source: Box::new(e) },
        }
    }

    /// Strips any time annotation.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, actual })
    }
}
