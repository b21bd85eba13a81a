use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("correlation {0} is outside the open interval (-1, 1)")]
    InvalidCorrelation(f64),

    #[error("operation requires a nonzero correlation")]
    ZeroCorrelation,

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("probability {value} is outside the admissible range for {what}")]
    InvalidProbability { what: &'static str, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} needs {required} units of work, over the budget of {budget}")]
    BudgetExceeded { what: &'static str, required: u128, budget: u128 },

    #[error("invalid simplex point: {0}")]
    InvalidSimplexPoint(String),

    #[error("invalid distribution matrix: {0}")]
    InvalidDistribution(String),

    #[error("invalid joint pmf: {0}")]
    InvalidPmf(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("coefficient tables have different degree caps ({0} vs {1})")]
    CapMismatch(usize, usize),

    #[error("epsilon {epsilon} violates 0<ε<|ρ| with |ρ| = {rho_abs}")]
    EpsilonNotBelowRho { epsilon: f64, rho_abs: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for errors caused by the caller's arguments rather than by data or numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidCorrelation(_)
                | Error::ZeroCorrelation
                | Error::InvalidProbability { .. }
                | Error::BudgetExceeded { .. }
                | Error::EpsilonNotBelowRho { .. }
                | Error::InvalidParameter { .. }
                | Error::CapMismatch(..)
        )
    }
}
