use thiserror::Error;

use crate::pretopology::Violation;

pub type Result<T, E = SoritesError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SoritesError {
    /// Malformed or out-of-range input.
    #[error("input error: {0}")]
    Input(String),

    /// The structure failed validation; each violation is listed.
    #[error("invalid space: {}", join_violations(.0))]
    InvalidSpace(Vec<Violation>),

    /// Cover enumeration would exceed the caller's budget.
    #[error("budget exceeded: {product} minimal covers, cap is {cap}")]
    Budget { product: u128, cap: u64 },

    /// A stated precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The asserted tolerant cover does not chain `x` to `y`.
    #[error("no chain from {x} to {y} in the asserted cover")]
    NoChain { x: String, y: String },

    /// A tolerance report was not produced for this system.
    #[error("stale report: {0}")]
    StaleReport(String),

    /// A result contradicting a proven theorem; indicates a bug.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

impl SoritesError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        SoritesError::Input(msg.into())
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
