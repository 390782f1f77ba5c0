// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("negative edge weight {weight} on ({i}, {j})")]
    NegativeWeight { i: usize, j: usize, weight: f64 },

    #[error("non-finite edge weight on ({i}, {j})")]
    NonFiniteWeight { i: usize, j: usize },

    #[error("node index {index} out of range for graph with {num_nodes} nodes")]
    NodeOutOfRange { index: usize, num_nodes: usize },

    #[error("{expected} node labels expected, got {got}")]
    LabelLength { expected: usize, got: usize },

    #[error("attribute vector has length {got}, graph has {expected} nodes")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("missing file {0}")]
    MissingFile(PathBuf),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("record {index}: {message}")]
    Record { index: usize, message: String },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("edge ({a}, {b}) joins nodes of different graphs ({graph_a} and {graph_b})")]
    CrossGraphEdge {
        a: usize,
        b: usize,
        graph_a: usize,
        graph_b: usize,
    },

    #[error("hop count {t} exceeds the configured maximum {max}")]
    HopLimit { t: usize, max: usize },

    #[error("eigensolver did not converge for eigenvector {index}: residual {residual:e} > tolerance {tolerance:e}")]
    NoConvergence {
        index: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("graph {graph_id}: {source}")]
    InGraph {
        graph_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("training data has a single class")]
    SingleClass,

    #[error("untrained model")]
    Untrained,

    #[error("feature matrix has {got} columns, model expects {expected}")]
    ColumnMismatch { expected: usize, got: usize },

    #[error("class {class:?} has {count} training members, fewer than {folds} folds")]
    ClassTooSmall {
        class: String,
        count: usize,
        folds: usize,
    },

    #[error("missing accuracy for dataset {dataset:?}, algorithm {algorithm:?}")]
    MissingCell { dataset: String, algorithm: String },

    #[error("unsupported Nemenyi setting: K = {k}, alpha = {alpha}")]
    UnsupportedCriticalValue { k: usize, alpha: f64 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of a numerical routine rather than bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoConvergence { .. } => true,
            Error::InGraph { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
