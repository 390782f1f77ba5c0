// SPDX-License-Identifier: Apache-2.0

//! Graph fingerprints built from multi-hop assortativities of a stationary
//! random walk, a from-scratch random forest with a repeated
//! cross-validation protocol, and Friedman/Nemenyi rank statistics for
//! comparing classifiers across datasets.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: CSR undirected weighted graphs and degree profiles.
//! * [`dataset`]: TU benchmark and JSON loaders, dataset summaries.
//! * [`walk`]: the random-walk model and every assortativity computation.
//! * [`spectral`]: dominant left eigenvectors of the transition matrix.
//! * [`fingerprint`]: the fixed-order feature vector of a graph.
//! * [`learn`]: random forest and the evaluation protocol.
//! * [`stats`]: average ranks, Friedman test, Nemenyi CD, significance SVG.

pub mod dataset;
pub mod error;
pub mod fingerprint;
pub mod graph;
pub mod learn;
pub mod numeric;
pub mod spectral;
pub mod stats;
pub mod walk;

pub use dataset::{Dataset, DatasetSummary};
pub use error::{Error, Result};
pub use fingerprint::{FeatureMatrix, FeatureVector, FingerprintConfig};
pub use graph::{DegreeProfile, Graph, MergePolicy};
pub use learn::{EvaluationReport, ProtocolConfig, RandomForestModel};
pub use spectral::SpectralBasis;
pub use stats::{AccuracyTable, CdConvention, FriedmanResult, NemenyiResult};
pub use walk::{AssortativityValue, CategoricalEncoding, WalkModel};
