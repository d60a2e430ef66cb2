//! Shared error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("embedding dimension must be at least 4 for directional models, got {0}")]
    DimensionTooSmall(usize),

    #[error("graph has no port numbering")]
    MissingPorts,

    #[error("port numbering is inconsistent: {0}")]
    InconsistentPorts(String),

    #[error("graph has no node positions")]
    MissingPositions,

    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),

    #[error("graph has {got} nodes, exact oracle limit is {limit}")]
    SizeLimit { got: usize, limit: usize },

    #[error("operation requires a nonempty graph")]
    EmptyGraph,

    #[error("duplicate port {0} in aggregation sequence")]
    DuplicatePort(usize),

    #[error("invalid port message sequence: {0}")]
    InvalidSequence(String),

    #[error("unknown construction name: {0}")]
    UnknownConstruction(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid bound spec: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
