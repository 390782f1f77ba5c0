// SPDX-License-Identifier: Apache-2.0

//! Synthetic inputs for the benchmarks.

use hopcov_core::{Graph, MergePolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sparse random graph with average degree near `avg_degree`: a random
/// spanning path plus uniformly drawn extra edges, with `k` node categories.
pub fn sparse_graph(n: usize, avg_degree: f64, k: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> =
        (1..n).map(|i| (rng.random_range(0..i), i, 1.0)).collect();
    let extra = ((avg_degree / 2.0 - 1.0).max(0.0) * n as f64) as usize;
    for _ in 0..extra {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i != j {
            edges.push((i, j, 1.0));
        }
    }
    let labels = (k > 0).then(|| (0..n).map(|_| Some(rng.random_range(0..k))).collect());
    Graph::from_edges_with(n, &edges, labels, MergePolicy::Max).expect("valid synthetic graph")
}

/// `n` rows of `f` uniform features with labels given by a noisy threshold
/// on the first feature.
pub fn classification_data(n: usize, f: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..f).map(|_| rng.random::<f64>()).collect())
        .collect();
    let y = x
        .iter()
        .map(|r| usize::from(r[0] + 0.2 * rng.random::<f64>() > 0.6))
        .collect();
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = sparse_graph(200, 6.0, 3, 1);
        assert_eq!(a, sparse_graph(200, 6.0, 3, 1));
        let mean_degree = a.degrees().iter().sum::<f64>() / 200.0;
        assert!((4.0..=7.0).contains(&mean_degree), "{mean_degree}");
        let (x, y) = classification_data(50, 4, 2);
        assert_eq!((x.len(), y.len()), (50, 50));
        assert!(y.contains(&0) && y.contains(&1));
    }
}
