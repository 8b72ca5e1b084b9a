use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit class.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("element does not belong to this field context: {0}")]
    Context(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("{what} needs {needed} steps, over the budget of {budget}")]
    Capacity { what: String, needed: u128, budget: u64 },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("missing state: {0}")]
    State(String),

    #[error("numerical integrity: {0}")]
    Numerical(String),

    #[error("characteristic {0} is not supported (need p > 3)")]
    UnsupportedCharacteristic(u64),

    #[error("degenerate form: {0}")]
    Degenerate(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn capacity(what: impl Into<String>, needed: u128, budget: u64) -> Self {
        Error::Capacity {
            what: what.into(),
            needed,
            budget,
        }
    }

    /// Short machine-readable tag, used in error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "not_prime",
            Error::Context(_) => "context",
            Error::DivisionByZero => "division_by_zero",
            Error::Capacity { .. } => "capacity",
            Error::Domain(_) => "domain",
            Error::Shape(_) => "shape",
            Error::Precondition(_) => "precondition",
            Error::State(_) => "state",
            Error::Numerical(_) => "numerical",
            Error::UnsupportedCharacteristic(_) => "unsupported_characteristic",
            Error::Degenerate(_) => "degenerate",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
