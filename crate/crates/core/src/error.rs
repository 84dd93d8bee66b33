use thiserror::Error;

use crate::extremal::SearchResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("requested {requested} primes but the table ceiling is {ceiling}")]
    Capacity { requested: usize, ceiling: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("prime table too small: need {need} primes, have {have}")]
    TableTooSmall { need: usize, have: usize },

    #[error("{digits} digits requested, supported range is 1..={max}")]
    PrecisionInfeasible { digits: u32, max: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    /// The search hit a configured limit. `partial` holds the best
    /// signature seen so far, with `proven_optimal == false`.
    #[error("search limit reached after {} nodes", .partial.nodes)]
    Resource { partial: Box<SearchResult> },
}
