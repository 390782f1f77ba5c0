// SPDX-License-Identifier: Apache-2.0

//! Random forest classifier and the repeated stratified evaluation protocol.

mod forest;
mod protocol;
mod tree;

pub use forest::{bootstrap_sample, predict, train_forest, RandomForestModel, MODEL_FORMAT};
pub use protocol::{
    evaluate_protocol, stratified_folds, stratified_split, EvaluationReport, ProtocolConfig,
    RepeatOutcome,
};
pub use tree::{DecisionTree, TreeNode};
