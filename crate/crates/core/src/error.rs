use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("no hypotheses: {0}")]
    NoHypotheses(String),

    #[error("cyclic forest: node {node} ({label}) lies on a cycle")]
    CyclicForest { node: usize, label: String },

    #[error("malformed forest: {0}")]
    MalformedForest(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("provenance does not belong to this forest: {0}")]
    ProvenanceMismatch(String),

    #[error("enumeration overflow: more than {cap} derivations")]
    EnumerationOverflow { cap: usize },

    #[error("oracle cap exceeded: {needed} > {cap}")]
    CapExceeded { needed: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
