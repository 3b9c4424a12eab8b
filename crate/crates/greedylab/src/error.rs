//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient vector must have at least one entry")]
    EmptyVector,

    #[error("coefficient at position {index} is not finite")]
    NonFinite { index: usize },

    #[error("index {index} out of range for dimension {dim} (coordinates are numbered 1..=n)")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("index sets use 1-based coordinates; 0 is not a valid index")]
    ZeroIndex,

    #[error("duplicate index {index} in index set")]
    DuplicateIndex { index: usize },

    #[error("sign pattern does not match its index set: {reason}")]
    SignPatternMismatch { reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dictionary must contain at least one atom")]
    EmptyDictionary,

    #[error("atom {index} has Euclidean norm {norm} (atoms must be unit vectors within 1e-12)")]
    AtomNotUnit { index: usize, norm: f64 },

    #[error("atoms {first} and {second} coincide up to sign; store one representative per +/- pair")]
    DuplicateAtom { first: usize, second: usize },

    #[error("dictionary atoms span a subspace of rank {rank} < ambient dimension {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error("{what} out of range: {value} (allowed: {allowed})")]
    OutOfRange {
        what: &'static str,
        value: String,
        allowed: &'static str,
    },

    #[error("capacity guard exceeded: {0}")]
    Capacity(String),

    #[error("coefficient re-optimization over a non-separable quasi-norm with p < 1 is excluded (objective is non-convex): {space}")]
    NonConvex { space: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error on {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn out_of_range(
        what: &'static str,
        value: impl std::fmt::Display,
        allowed: &'static str,
    ) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            allowed,
        }
    }
}
