// SPDX-License-Identifier: Apache-2.0

//! Repeated evaluation: per repeat, a stratified train/test split, inner
//! stratified k-fold cross-validation on the training part to pick the
//! number of trees, a refit on the whole training part, and a test score.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::forest::{accuracy, predict, train_forest};
use crate::error::{Error, Result};
use crate::numeric::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub trees_grid: Vec<usize>,
    pub repeats: usize,
    pub folds: usize,
    pub split_fraction: f64,
    pub master_seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            trees_grid: vec![128, 256, 512],
            repeats: 10,
            folds: 10,
            split_fraction: 0.9,
            master_seed: 0,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::Config("folds must be at least 2".into()));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(Error::Config("split fraction must lie in (0, 1)".into()));
        }
        if self.trees_grid.is_empty() || self.trees_grid.contains(&0) {
            return Err(Error::Config(
                "trees grid must be non-empty and positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatOutcome {
    pub num_trees: usize,
    /// Mean inner-CV accuracy for each grid value, in grid order.
    pub cv_accuracy: Vec<f64>,
    pub test_accuracy: f64,
    pub train_size: usize,
    pub test_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub mean_accuracy: f64,
    /// Sample standard deviation over repeats (0 for a single repeat).
    pub std_accuracy: f64,
    pub per_repeat_accuracies: Vec<f64>,
    pub chosen_hyperparameters: Vec<RepeatOutcome>,
    pub config: ProtocolConfig,
}

impl EvaluationReport {
    pub fn to_table(&self) -> String {
        let mut out = String::from("repeat  trees  test_acc  cv_acc\n");
        for (r, o) in self.chosen_hyperparameters.iter().enumerate() {
            let best = o
                .cv_accuracy
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            out.push_str(&format!(
                "{:>6}  {:>5}  {:>8.4}  {:>6.4}\n",
                r + 1,
                o.num_trees,
                o.test_accuracy,
                best
            ));
        }
        out.push_str(&format!(
            "accuracy: {:.2} ± {:.2} (%)\n",
            100.0 * self.mean_accuracy,
            100.0 * self.std_accuracy
        ));
        out
    }
}

fn members_by_class(rows: &[usize], y: &[usize], num_classes: usize) -> Vec<Vec<usize>> {
    let mut by_class = vec![Vec::new(); num_classes];
    for &r in rows {
        by_class[y[r]].push(r);
    }
    by_class
}

/// Splits `rows` per class, keeping `round(n_c · fraction)` of each class for
/// training (clamped so that classes with two or more members contribute to
/// both sides). Returns sorted `(train, test)`.
pub fn stratified_split(
    rows: &[usize],
    y: &[usize],
    num_classes: usize,
    fraction: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut members in members_by_class(rows, y, num_classes) {
        if members.is_empty() {
            continue;
        }
        members.shuffle(rng);
        let n = members.len();
        let keep = if n >= 2 {
            ((n as f64 * fraction).round() as usize).clamp(1, n - 1)
        } else {
            n
        };
        train.extend_from_slice(&members[..keep]);
        test.extend_from_slice(&members[keep..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Fold index for every entry of `rows`. Each class is shuffled and dealt
/// round-robin, continuing the deal across classes, so every fold receives
/// `⌊n_c/k⌋` or `⌈n_c/k⌉` members of class `c`.
pub fn stratified_folds(
    rows: &[usize],
    y: &[usize],
    num_classes: usize,
    folds: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let position: std::collections::HashMap<usize, usize> =
        rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
    let mut assignment = vec![0; rows.len()];
    let mut deal = 0;
    for mut members in members_by_class(rows, y, num_classes) {
        members.shuffle(rng);
        for r in members {
            assignment[position[&r]] = deal % folds;
            deal += 1;
        }
    }
    assignment
}

fn gather(x: &[Vec<f64>], y: &[usize], rows: &[usize]) -> (Vec<Vec<f64>>, Vec<usize>) {
    (
        rows.iter().map(|&r| x[r].clone()).collect(),
        rows.iter().map(|&r| y[r]).collect(),
    )
}

/// Runs the protocol. `class_names[c]` names class index `c` in errors.
pub fn evaluate_protocol(
    x: &[Vec<f64>],
    y: &[usize],
    class_names: &[String],
    cfg: &ProtocolConfig,
) -> Result<EvaluationReport> {
    cfg.validate()?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let num_classes = y.iter().max().map_or(0, |m| m + 1);
    let name = |c: usize| class_names.get(c).cloned().unwrap_or_else(|| c.to_string());
    let mut grid = cfg.trees_grid.clone();
    grid.sort_unstable();
    grid.dedup();

    let all: Vec<usize> = (0..x.len()).collect();
    let mut outcomes = Vec::with_capacity(cfg.repeats);
    for repeat in 0..cfg.repeats as u64 {
        let seed = |path: &[u64]| {
            let mut full = vec![repeat];
            full.extend_from_slice(path);
            derive_seed(cfg.master_seed, &full)
        };
        let mut split_rng = ChaCha8Rng::seed_from_u64(seed(&[0]));
        let (train, test) =
            stratified_split(&all, y, num_classes, cfg.split_fraction, &mut split_rng);
        for (c, members) in members_by_class(&train, y, num_classes).iter().enumerate() {
            if !members.is_empty() && members.len() < cfg.folds {
                return Err(Error::ClassTooSmall {
                    class: name(c),
                    count: members.len(),
                    folds: cfg.folds,
                });
            }
        }

        let mut fold_rng = ChaCha8Rng::seed_from_u64(seed(&[1]));
        let fold_of = stratified_folds(&train, y, num_classes, cfg.folds, &mut fold_rng);

        let jobs: Vec<(usize, usize)> = (0..grid.len())
            .flat_map(|g| (0..cfg.folds).map(move |f| (g, f)))
            .collect();
        let fold_scores: Vec<f64> = jobs
            .par_iter()
            .map(|&(g, f)| {
                let fit_rows: Vec<usize> = train
                    .iter()
                    .zip(&fold_of)
                    .filter(|(_, &k)| k != f)
                    .map(|(&r, _)| r)
                    .collect();
                let held: Vec<usize> = train
                    .iter()
                    .zip(&fold_of)
                    .filter(|(_, &k)| k == f)
                    .map(|(&r, _)| r)
                    .collect();
                let (fx, fy) = gather(x, y, &fit_rows);
                let (hx, hy) = gather(x, y, &held);
                let model = train_forest(&fx, &fy, grid[g], seed(&[2, g as u64, f as u64]))?;
                Ok(accuracy(&predict(&model, &hx)?, &hy))
            })
            .collect::<Result<_>>()?;

        let cv_accuracy: Vec<f64> = fold_scores
            .chunks(cfg.folds)
            .map(|s| s.iter().sum::<f64>() / s.len() as f64)
            .collect();
        let mut chosen = 0;
        for (g, &acc) in cv_accuracy.iter().enumerate() {
            if acc > cv_accuracy[chosen] {
                chosen = g;
            }
        }

        let (tx, ty) = gather(x, y, &train);
        let (sx, sy) = gather(x, y, &test);
        let model = train_forest(&tx, &ty, grid[chosen], seed(&[3]))?;
        let test_accuracy = accuracy(&predict(&model, &sx)?, &sy);
        outcomes.push(RepeatOutcome {
            num_trees: grid[chosen],
            cv_accuracy,
            test_accuracy,
            train_size: train.len(),
            test_size: test.len(),
        });
    }

    let per_repeat: Vec<f64> = outcomes.iter().map(|o| o.test_accuracy).collect();
    let n = per_repeat.len() as f64;
    let mean = per_repeat.iter().sum::<f64>() / n;
    let std = if per_repeat.len() > 1 {
        (per_repeat.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(EvaluationReport {
        mean_accuracy: mean,
        std_accuracy: std,
        per_repeat_accuracies: per_repeat,
        chosen_hyperparameters: outcomes,
        config: cfg.clone(),
    })
}
