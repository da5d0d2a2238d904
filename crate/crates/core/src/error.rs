use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Arrays whose dimensions disagree with each other or with the market.
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    /// A caller broke an operation's precondition.
    #[error("invalid input: {0}")]
    Usage(String),

    /// The input is valid but too large for an exhaustive routine.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A solver invariant failed. This is always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
