use thiserror::Error;

/// Errors surfaced by the library.
///
/// Validation failures (`InvalidInput`) and size guards (`TooLarge`) are kept
/// apart so the CLI can map them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed argument: out-of-range index, non-bijective entries, ...
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Request is well-formed but computationally infeasible.
    #[error("size guard: {what} requires n <= {limit}, got n = {n}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        n: usize,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn too_large(what: &'static str, limit: usize, n: usize) -> Self {
        Error::TooLarge { what, limit, n }
    }
}
