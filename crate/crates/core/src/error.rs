use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("budget exceeded: {needed} items requested, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error("degree overflow while composing {0} and {1}")]
    DegreeOverflow(i64, i64),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Short machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::Domain(_) => "domain-error",
            Error::Unsupported(_) => "unsupported-operation",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::ConstructionFailed(_) => "construction-failed",
            Error::DegreeOverflow(..) => "degree-overflow",
        }
    }
}
