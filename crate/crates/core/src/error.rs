use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("needs more precision: {0}")]
    NeedsMorePrecision(String),
    #[error("no bracket found: {0}")]
    NoBracketFound(String),
    #[error("budget of {budget} exceeded: {what}")]
    BudgetExceeded { budget: u64, what: String },
    #[error("zero term encountered at index {index}")]
    ZeroTerm { index: u64 },
    #[error("point outside the admissible window ({lower}, {upper}]")]
    WindowViolation { lower: String, upper: String },
    #[error("index {index} lies beyond the {materialized} materialized blocks; extend first")]
    ExtendFirst { index: u64, materialized: usize },
    #[error("sample matrix is singular; retry with other indices")]
    SingularSample,
    #[error("division by an enclosure containing zero")]
    DivisionByZero,
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::NeedsMorePrecision(msg.into())
    }

    pub fn budget(budget: u64, what: impl Into<String>) -> Self {
        Error::BudgetExceeded {
            budget,
            what: what.into(),
        }
    }

    /// Precision or budget exhaustion: the answer is unknown, not wrong.
    pub fn is_unresolved(&self) -> bool {
        matches!(
            self,
            Error::NeedsMorePrecision(_) | Error::BudgetExceeded { .. } | Error::SingularSample
        )
    }
}
