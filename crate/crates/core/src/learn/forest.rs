// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{majority_class, DecisionTree};
use crate::error::{Error, Result};
use crate::numeric::derive_seed;

pub const MODEL_FORMAT: &str = "hopcov-random-forest";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForestModel {
    pub format: String,
    pub version: u32,
    pub num_features: usize,
    pub num_classes: usize,
    /// `⌈√F⌉`.
    pub num_features_per_split: usize,
    pub seed: u64,
    pub trees: Vec<DecisionTree>,
}

/// `n` row indices drawn uniformly with replacement.
pub fn bootstrap_sample(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Trains `num_trees` CART trees, each on its own bootstrap sample. Tree `i`
/// draws from a generator seeded by `(seed, i)`, so the model does not
/// depend on how trees are scheduled across threads.
pub fn train_forest(
    x: &[Vec<f64>],
    y: &[usize],
    num_trees: usize,
    seed: u64,
) -> Result<RandomForestModel> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let num_classes = y.iter().max().map_or(0, |m| m + 1);
    let present = {
        let mut seen = vec![false; num_classes];
        y.iter().for_each(|&c| seen[c] = true);
        seen.iter().filter(|&&s| s).count()
    };
    if x.len() < 2 || present < 2 {
        return Err(Error::SingleClass);
    }
    let num_features = x[0].len();
    if let Some(row) = x.iter().find(|r| r.len() != num_features) {
        return Err(Error::ColumnMismatch {
            expected: num_features,
            got: row.len(),
        });
    }
    let mtry = ((num_features as f64).sqrt().ceil() as usize).max(1);

    let trees = (0..num_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[i as u64]));
            let bag = bootstrap_sample(x.len(), &mut rng);
            DecisionTree::fit(x, y, num_classes, &bag, mtry, &mut rng)
        })
        .collect();

    Ok(RandomForestModel {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        num_features,
        num_classes,
        num_features_per_split: mtry,
        seed,
        trees,
    })
}

/// Majority vote over trees; ties go to the lowest class index.
pub fn predict(model: &RandomForestModel, x: &[Vec<f64>]) -> Result<Vec<usize>> {
    if model.trees.is_empty() {
        return Err(Error::Untrained);
    }
    if let Some(row) = x.iter().find(|r| r.len() != model.num_features) {
        return Err(Error::ColumnMismatch {
            expected: model.num_features,
            got: row.len(),
        });
    }
    Ok(x.iter()
        .map(|row| {
            let mut votes = vec![0usize; model.num_classes];
            for tree in &model.trees {
                votes[tree.predict_row(row)] += 1;
            }
            majority_class(&votes)
        })
        .collect())
}

impl RandomForestModel {
    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<usize>> {
        predict(self, x)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        if model.format != MODEL_FORMAT || model.version != MODEL_VERSION {
            return Err(Error::Config(format!(
                "unsupported model format {} v{}",
                model.format, model.version
            )));
        }
        Ok(model)
    }
}

pub(crate) fn accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}
