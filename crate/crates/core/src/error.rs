use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-positive or non-finite price for {symbol} on {date} at minute {minute}")]
    InvalidPrice {
        symbol: String,
        date: NaiveDate,
        minute: usize,
    },

    #[error("{symbol} on {date} has {found} minutes, expected {expected}")]
    MissingMinutes {
        symbol: String,
        date: NaiveDate,
        found: usize,
        expected: usize,
    },

    #[error("unsupported sampling step {0} (expected 1, 5 or 10)")]
    UnsupportedStep(usize),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shock on {date} was not accepted for law estimation")]
    UnacceptedShock { date: NaiveDate },
}

pub type Result<T> = std::result::Result<T, Error>;
