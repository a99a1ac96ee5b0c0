use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point set is empty")]
    EmptyPointSet,

    #[error("point {index} is the zero vector")]
    ZeroPoint { index: usize },

    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("invalid clustering: {0}")]
    InvalidClustering(String),

    #[error("shape {shape:?} is not feasible: {reason}")]
    InfeasibleShape { shape: Vec<usize>, reason: String },

    #[error("clustering is not feasible for the given bounds")]
    InfeasibleClustering,

    #[error("point {label} is not in cluster {cluster}")]
    LabelNotInSource { label: usize, cluster: usize },

    #[error("clusterings are over different point sets (n = {left} vs {right})")]
    MismatchedInstances { left: usize, right: usize },

    #[error("k must be at least 1")]
    InvalidK,

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("sites {i} and {j} coincide")]
    CoincidentSites { i: usize, j: usize },

    #[error("site vector lies outside the cone")]
    NotInCone,

    #[error("cone has empty interior: the clustering is not a vertex clustering")]
    EmptyInterior,

    #[error("no separating weights exist; negative cycle through clusters {cycle:?}")]
    SeparationInfeasible { cycle: Vec<usize> },

    #[error("instance too large for exhaustive enumeration: k^n = {size:.3e} exceeds {limit:.3e}")]
    GuardExceeded { size: f64, limit: f64 },

    #[error("solver failed to converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
