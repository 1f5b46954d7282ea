use alloc::boxed::Box;
use alloc::string::String;

use chrono::NaiveDate;

use crate::garch::GarchFit;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("row {row}: {reason}")]
    InvalidRow { row: usize, reason: String },

    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("degenerate model: conditional variance {variance} at t={t} is not positive")]
    DegenerateModel { t: usize, variance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("date misalignment: {0}")]
    Alignment(String),

    /// The optimizer exhausted its budget. The best parameters found so far
    /// are still returned so callers can decide whether to use them.
    #[error("likelihood maximization did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize, best: Box<GarchFit> },
}
