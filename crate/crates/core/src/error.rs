use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside its legal domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to reach its accuracy target.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An accept-reject proposal budget was exhausted before enough
    /// draws were accepted. Carries the draws collected so far.
    #[error("proposal budget exhausted after {proposals} proposals ({} accepted)", partial.len())]
    BudgetExhausted { proposals: u64, partial: Vec<f64> },

    /// Malformed or out-of-support input data.
    #[error("data error: {0}")]
    Data(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
