use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// An argument violates an operation's precondition.
    InvalidInput(String),
    /// Two objects that must share a dimension do not.
    DimensionMismatch { expected: usize, found: usize },
    /// The requested computation needs more elementary terms than allowed.
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u64,
    },
    /// Exact integer arithmetic left the supported range.
    Overflow(&'static str),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::BudgetExceeded {
                what,
                needed,
                limit,
            } => write!(
                f,
                "budget exceeded in {what}: needs {needed} terms, limit is {limit}"
            ),
            Error::Overflow(what) => write!(f, "integer overflow in {what}"),
        }
    }
}

impl core::error::Error for Error {}
