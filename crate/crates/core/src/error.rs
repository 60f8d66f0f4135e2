use thiserror::Error;

/// Errors raised by the engine. Each variant names the guard or the
/// structural rule that was violated.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid colour set: {0}")]
    InvalidColourSet(String),
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("malformed map: {0}")]
    MalformedMap(String),
    #[error("unsupported bubble: {0}")]
    UnsupportedBubble(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("operation requires a connected map")]
    RequiresConnected,
    #[error("vacuum map has no boundary graph")]
    NoBoundary,
    #[error("budget exceeded: {guard} (limit {limit}, requested {requested})")]
    BudgetExceeded {
        guard: &'static str,
        limit: usize,
        requested: usize,
    },
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(u32, u32),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn budget(guard: &'static str, limit: usize, requested: usize) -> Result<()> {
    if requested > limit {
        Err(Error::BudgetExceeded {
            guard,
            limit,
            requested,
        })
    } else {
        Ok(())
    }
}
