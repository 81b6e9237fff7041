use thiserror::Error;

use crate::diophantine::Convergent;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An integer input exceeds the supported width.
    #[error("input out of range: {0}")]
    Range(String),

    /// The requested work exceeds the configured compute or memory budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("insufficient precision: convergent denominator {q} needs q^2 < 2^{max_bits}")]
    InsufficientPrecision { q: String, max_bits: u32 },

    #[error("no convergent with denominator in ({q_min}, {q_max})")]
    WindowEmpty {
        q_min: f64,
        q_max: f64,
        below: Option<Convergent>,
        above: Option<Convergent>,
    },

    #[error("no split of {d} = h*s with h <= {h_max}, s <= {s_max} (factors {factors:?})")]
    SplitFailed {
        d: u64,
        h_max: f64,
        s_max: f64,
        factors: Vec<u64>,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    /// True for errors raised by a budget guard rather than by bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}
