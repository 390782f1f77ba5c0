// SPDX-License-Identifier: Apache-2.0

//! Rank-based comparison of several classifiers over several datasets:
//! average ranks, the Friedman test, the Nemenyi critical difference and a
//! significance diagram.

mod critical;
mod diagram;
pub mod special;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use critical::{studentized_range, MAX_K, MIN_K};
pub use diagram::{companion_path, significance_diagram, DiagramData};
pub use table::AccuracyTable;

/// Scaling of the studentized-range quantile used in the critical difference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CdConvention {
    /// `q = q_range/√2`, the usual Nemenyi constant.
    #[default]
    Demsar,
    /// The undivided `q_range`.
    Paper,
}

impl std::str::FromStr for CdConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "demsar" => Ok(Self::Demsar),
            "paper" => Ok(Self::Paper),
            _ => Err(Error::Config(format!("unknown CD convention {s:?}"))),
        }
    }
}

impl std::fmt::Display for CdConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Demsar => "demsar",
            Self::Paper => "paper",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub algorithms: Vec<String>,
    pub average_ranks: Vec<f64>,
    pub num_datasets: usize,
    pub q: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NemenyiResult {
    pub cd: f64,
    pub alpha: f64,
    pub q_value: f64,
    pub convention: CdConvention,
    pub num_algorithms: usize,
    pub num_datasets: usize,
}

/// Ranks of one row, 1 for the largest value, tied values sharing the mean of
/// the positions they occupy.
pub fn rank_row(row: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; row.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && row[order[end]] == row[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end share their mean.
        let mean = (start + 1 + end) as f64 / 2.0;
        for &j in &order[start..end] {
            ranks[j] = mean;
        }
        start = end;
    }
    ranks
}

fn check_shape(t: &AccuracyTable) -> Result<Vec<Vec<f64>>> {
    let values = t.values()?;
    if t.num_datasets() < 2 || t.num_algorithms() < 2 {
        return Err(Error::Config(format!(
            "rank statistics need at least 2 datasets and 2 algorithms, got {}×{}",
            t.num_datasets(),
            t.num_algorithms()
        )));
    }
    Ok(values)
}

/// Mean rank of each algorithm over datasets.
pub fn average_ranks(t: &AccuracyTable) -> Result<Vec<f64>> {
    let values = check_shape(t)?;
    let mut totals = vec![0.0; t.num_algorithms()];
    for row in &values {
        for (acc, r) in totals.iter_mut().zip(rank_row(row)) {
            *acc += r;
        }
    }
    let d = values.len() as f64;
    Ok(totals.into_iter().map(|s| s / d).collect())
}

pub fn friedman_test(t: &AccuracyTable) -> Result<FriedmanResult> {
    let ranks = average_ranks(t)?;
    let k = ranks.len() as f64;
    let d = t.num_datasets() as f64;
    let centre = (k + 1.0) / 2.0;
    let spread: f64 = ranks.iter().map(|r| (r - centre).powi(2)).sum();
    let q = 12.0 * d / (k * (k + 1.0)) * spread;
    Ok(FriedmanResult {
        algorithms: t.algorithms.clone(),
        average_ranks: ranks,
        num_datasets: t.num_datasets(),
        q,
        degrees_of_freedom: t.num_algorithms() - 1,
        p_value: special::chi2_sf(q, k - 1.0),
    })
}

pub fn nemenyi_cd(
    k: usize,
    d: usize,
    alpha: f64,
    convention: CdConvention,
) -> Result<NemenyiResult> {
    if d == 0 {
        return Err(Error::Config(
            "critical difference needs at least one dataset".into(),
        ));
    }
    let raw = studentized_range(k, alpha)?;
    let q_value = match convention {
        CdConvention::Demsar => raw / std::f64::consts::SQRT_2,
        CdConvention::Paper => raw,
    };
    let kf = k as f64;
    Ok(NemenyiResult {
        cd: q_value * (kf * (kf + 1.0) / (12.0 * d as f64)).sqrt(),
        alpha,
        q_value,
        convention,
        num_algorithms: k,
        num_datasets: d,
    })
}
