use thiserror::Error;

/// Errors produced by chain construction, eigensolvers, and the search routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("index {index} out of range for a chain of {len} nodes")]
    Index { index: usize, len: usize },

    #[error("eigensolver failed to converge: {0}")]
    Convergence(String),

    #[error("secular root search failed: {0}")]
    RootSearch(String),

    #[error("degenerate secular root: {0}")]
    DegenerateRoot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
