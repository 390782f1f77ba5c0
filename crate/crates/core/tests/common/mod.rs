// SPDX-License-Identifier: Apache-2.0

//! Random graph generators and a dense-matrix reference implementation shared
//! by the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

use hopcov_core::walk::CategoricalEncoding;
use hopcov_core::{Graph, MergePolicy, WalkModel};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn mutag_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/MUTAG")
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/accuracy")
        .join(name)
}

fn weight(rng: &mut ChaCha8Rng, weighted: bool) -> f64 {
    if weighted {
        0.25 + 2.0 * rng.random::<f64>()
    } else {
        1.0
    }
}

pub fn erdos_renyi(
    n: usize,
    p: f64,
    weighted: bool,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, weight(rng, weighted)));
            }
        }
    }
    edges
}

/// Circulant graph linking `i` to `i ± 1, …, i ± ⌊k/2⌋`, plus the antipodal
/// matching when `k` is odd and `n` even.
pub fn regular(n: usize, k: usize) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for s in 1..=k / 2 {
            let j = (i + s) % n;
            edges.push((i.min(j), i.max(j), 1.0));
        }
    }
    if k % 2 == 1 && n.is_multiple_of(2) {
        for i in 0..n / 2 {
            edges.push((i, i + n / 2, 1.0));
        }
    }
    edges.sort_unstable_by_key(|a| (a.0, a.1));
    edges.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    edges
}

pub fn bipartite(
    a: usize,
    b: usize,
    p: f64,
    weighted: bool,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for i in 0..a {
        for j in a..a + b {
            if rng.random::<f64>() < p {
                edges.push((i, j, weight(rng, weighted)));
            }
        }
    }
    edges
}

/// Adds a path through all nodes in a random order, making the graph connected.
pub fn connect(n: usize, edges: &mut Vec<(usize, usize, f64)>, rng: &mut ChaCha8Rng) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for w in order.windows(2) {
        edges.push((w[0], w[1], 1.0));
    }
}

pub fn random_labels(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    (0..n).map(|_| Some(rng.random_range(0..k))).collect()
}

/// One of four families (ER, regular, bipartite, disconnected with isolated
/// nodes), `n ≤ max_n`, with `k` random node categories.
pub fn mixed_graph(index: usize, max_n: usize, k: usize, rng: &mut ChaCha8Rng) -> Graph {
    let n = rng.random_range(2..=max_n);
    let weighted = rng.random::<bool>();
    let (n, edges) = match index % 4 {
        0 => (n, erdos_renyi(n, rng.random_range(0.2..0.8), weighted, rng)),
        1 => {
            let n = n.max(4);
            let deg = rng.random_range(2..n.min(6));
            (n, regular(n, deg))
        }
        2 => {
            let a = (n / 2).max(1);
            let b = (n - a).max(1);
            let mut e = bipartite(a, b, 0.6, weighted, rng);
            if e.is_empty() {
                e.push((0, a, 1.0));
            }
            (a + b, e)
        }
        _ => {
            let half = n / 2;
            let mut e = erdos_renyi(half, 0.7, weighted, rng);
            let rest = erdos_renyi(n - half, 0.5, weighted, rng);
            e.extend(rest.into_iter().map(|(i, j, w)| (i + half, j + half, w)));
            (n + 1, e) // node n stays isolated
        }
    };
    Graph::from_edges(n, &edges, Some(random_labels(n, k, rng))).unwrap()
}

pub fn random_connected(n: usize, p: f64, weighted: bool, rng: &mut ChaCha8Rng) -> Graph {
    let mut e = erdos_renyi(n, p, weighted, rng);
    connect(n, &mut e, rng);
    // Path edges may repeat ER edges; keep them simple.
    Graph::from_edges_with(n, &e, None, MergePolicy::Max).unwrap()
}

/// Dense `M = D⁻¹A` and `π`, rebuilt from the stored adjacency.
pub struct Dense {
    pub a: DMatrix<f64>,
    pub m: DMatrix<f64>,
    pub pi: DVector<f64>,
    pub degrees: DVector<f64>,
}

impl Dense {
    pub fn new(g: &Graph) -> Self {
        let n = g.num_nodes();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            let (cols, ws) = g.neighbors(i);
            for (&j, &w) in cols.iter().zip(ws) {
                a[(i, j)] = w;
            }
        }
        let degrees = DVector::from_iterator(n, (0..n).map(|i| a.row(i).sum()));
        let total = degrees.sum();
        let pi = &degrees / total;
        let mut m = a.clone();
        for i in 0..n {
            let d = degrees[i];
            m.row_mut(i).iter_mut().for_each(|x| *x /= d);
        }
        Self { a, m, pi, degrees }
    }

    /// `ρ(t) = Π Mᵗ − ππᵀ`.
    pub fn rho(&self, t: usize) -> DMatrix<f64> {
        let mt = self.m.pow(t as u32);
        DMatrix::from_diagonal(&self.pi) * mt - &self.pi * self.pi.transpose()
    }

    pub fn quad(&self, t: usize, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        (v.transpose() * self.rho(t) * v)[(0, 0)]
    }

    /// Eigenvalues of `D^{-1/2} A D^{-1/2}`, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.pi.len();
        let s = DMatrix::from_fn(n, n, |i, j| {
            self.a[(i, j)] / (self.degrees[i] * self.degrees[j]).sqrt()
        });
        let mut ev: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }
}

/// Variance of `v(x₀)v(x_t)` for a stationary walk, from dense powers.
pub fn product_variance(d: &Dense, v: &[f64], t: usize) -> f64 {
    let mt = d.m.pow(t as u32);
    let n = v.len();
    let mut second = 0.0;
    let mut first = 0.0;
    for i in 0..n {
        for j in 0..n {
            let p = d.pi[i] * mt[(i, j)];
            first += p * v[i] * v[j];
            second += p * (v[i] * v[j]).powi(2);
        }
    }
    second - first * first
}

/// Newman modularity of a node partition, from an edge enumeration.
pub fn modularity(g: &Graph, part: &[usize]) -> f64 {
    let mut two_m = 0.0;
    let mut inside = 0.0;
    let k = part.iter().max().unwrap() + 1;
    let mut strength = vec![0.0; k];
    for (i, j, w) in g.edges() {
        let mult = if i == j { 1.0 } else { 2.0 };
        two_m += mult * w;
        if part[i] == part[j] {
            inside += mult * w;
        }
        strength[part[i]] += w;
        if i != j {
            strength[part[j]] += w;
        }
    }
    inside / two_m - strength.iter().map(|s| (s / two_m).powi(2)).sum::<f64>()
}

/// Pearson correlation of `v` across the two ends of every edge, each edge
/// listed in both orientations.
pub fn edge_correlation(g: &Graph, v: &[f64]) -> f64 {
    let mut pairs = Vec::new();
    for (i, j, w) in g.edges() {
        assert!(i != j && w == 1.0, "simple graphs only");
        pairs.push((v[i], v[j]));
        pairs.push((v[j], v[i]));
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let cov = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / n;
    let vx = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / n;
    let vy = pairs.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / n;
    cov / (vx * vy).sqrt()
}

pub fn complete(n: usize) -> Graph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            e.push((i, j, 1.0));
        }
    }
    Graph::from_edges(n, &e, None).unwrap()
}

/// `(graph, attribute, t)` cases mixing scalar attributes and category
/// indicators on connected and disconnected graphs.
pub fn mc_cases() -> Vec<(Graph, Vec<f64>, usize)> {
    let mut rng = rng(404);
    (0..20)
        .map(|i| {
            let g = if i % 5 == 4 {
                mixed_graph(3, 20, 3, &mut rng)
            } else {
                let n = rng.random_range(10..40);
                let mut e = erdos_renyi(n, 0.2, i % 2 == 0, &mut rng);
                connect(n, &mut e, &mut rng);
                Graph::from_edges(n, &e, Some(random_labels(n, 3, &mut rng))).unwrap()
            };
            let v = if i % 3 == 0 {
                CategoricalEncoding::from_graph(&g, 3)
                    .unwrap()
                    .column(i % 3)
            } else {
                (0..g.num_nodes())
                    .map(|_| rng.random_range(-1.0..2.0))
                    .collect()
            };
            (g, v, 1 + i % 4)
        })
        .collect()
}

/// Least-squares slope of log RMS error against log sample count.
pub fn error_slope(g: &Graph, v: &[f64], t: usize, seeds: u64) -> f64 {
    let model = WalkModel::new(g);
    let exact = model.scalar_assortativity(v, t).unwrap().value;
    let sizes = [1_000usize, 4_000, 16_000, 64_000, 256_000];
    let points: Vec<(f64, f64)> = sizes
        .iter()
        .map(|&n| {
            let mse = (0..seeds)
                .map(|s| {
                    let e = model.mc_assortativity(v, t, n, 1000 + s).unwrap().value - exact;
                    e * e
                })
                .sum::<f64>()
                / seeds as f64;
            ((n as f64).ln(), 0.5 * mse.ln())
        })
        .collect();
    let mx = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
    let my = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
