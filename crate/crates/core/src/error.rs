use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("metric {metric} cannot be applied to {object} objects")]
    IncompatibleMetric {
        metric: &'static str,
        object: &'static str,
    },

    #[error("explicit metric queried for an object without a point index")]
    MissingIndex,

    #[error("index {index} out of range for {len} objects")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("Minkowski order must be >= 1, got {0}")]
    InvalidMinkowski(f64),

    #[error("malformed distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("pivot {0} has no revealed query distance")]
    UnrevealedPivot(usize),

    #[error("at least one pivot is required")]
    NoPivots,

    #[error("k = {k} is out of range for {n} objects")]
    KOutOfRange { k: usize, n: usize },

    #[error("graph has {n} vertices; brute force is limited to {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedDimensions {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid query selection: {0}")]
    InvalidQuery(String),

    #[error("invalid experiment: {0}")]
    InvalidSpec(String),

    #[error("cannot plot: {0}")]
    Plot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
