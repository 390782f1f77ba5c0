// SPDX-License-Identifier: Apache-2.0

//! Stationary random walk on an undirected graph and the multi-hop
//! assortativities derived from its autocovariance.
//!
//! For the walk `M = D⁻¹A` with stationary row vector `π = dᵀ/1ᵀd`, the lag-`t`
//! autocovariance of walker position indicators is `ρ(t) = ΠMᵗ − πᵀπ`. The
//! assortativity of a node attribute `v` at lag `t` is `vᵀρ(t)v`. `ρ(t)` is
//! never formed: every quantity here is evaluated through `t` sparse
//! matrix-vector products.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::{self, CompensatedSum};

/// Largest hop count accepted by [`WalkModel::node_id_assortativity`].
pub const DEFAULT_MAX_NODE_ID_HOP: usize = 8;

/// Samples per Monte Carlo chunk. Chunk `c` always draws from stream `c` of
/// the master seed, so estimates do not depend on the worker count.
const MC_CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssortativityValue {
    pub t: usize,
    pub value: f64,
}

/// One-hot membership of nodes in `k` categories, stored as a per-node
/// category index. A node without a category belongs to no column.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalEncoding {
    membership: Vec<Option<usize>>,
    k: usize,
}

impl CategoricalEncoding {
    pub fn new(membership: Vec<Option<usize>>, k: usize) -> Result<Self> {
        if let Some(bad) = membership.iter().flatten().find(|&&c| c >= k) {
            return Err(Error::Config(format!(
                "category {bad} outside alphabet of size {k}"
            )));
        }
        Ok(Self { membership, k })
    }

    /// Encoding of the graph's own node labels against an alphabet of size `k`.
    pub fn from_graph(g: &Graph, k: usize) -> Result<Self> {
        let labels = g
            .node_labels()
            .ok_or_else(|| Error::Config("graph has no node labels".into()))?;
        Self::new(labels.to_vec(), k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_nodes(&self) -> usize {
        self.membership.len()
    }

    pub fn membership(&self) -> &[Option<usize>] {
        &self.membership
    }

    /// Indicator vector `hᵢ` of category `i`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.membership
            .iter()
            .map(|&c| if c == Some(i) { 1.0 } else { 0.0 })
            .collect()
    }
}

/// Random walk on a regularised graph.
#[derive(Debug, Clone)]
pub struct WalkModel<'g> {
    graph: &'g Graph,
    degrees: Vec<f64>,
    pi: Vec<f64>,
}

impl<'g> WalkModel<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let degrees = graph.degrees();
        let total = numeric::sum(degrees.iter().copied());
        let pi = degrees.iter().map(|d| d / total).collect();
        Self { graph, degrees, pi }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn num_nodes(&self) -> usize {
        self.pi.len()
    }

    /// Stationary distribution `π = d/1ᵀd`.
    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// `Mv` for a column vector `v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        self.apply_into(v, &mut out);
        out
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let (cols, ws) = self.graph.neighbors(i);
            let mut acc = 0.0;
            for (&j, &w) in cols.iter().zip(ws) {
                acc += w * v[j];
            }
            *o = acc / self.degrees[i];
        }
    }

    /// `pM` for a row vector `p`.
    pub fn apply_left(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            let scale = pi / self.degrees[i];
            let (cols, ws) = self.graph.neighbors(i);
            for (&j, &w) in cols.iter().zip(ws) {
                out[j] += scale * w;
            }
        }
        out
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.num_nodes() {
            return Err(Error::DimensionMismatch {
                expected: self.num_nodes(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `Mᵗv` by `t` sparse products.
    pub fn hop_vector(&self, v: &[f64], t: usize) -> Result<Vec<f64>> {
        self.check_len(v)?;
        let mut cur = v.to_vec();
        let mut next = vec![0.0; v.len()];
        for _ in 0..t {
            self.apply_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    /// Degree-weighted mean `π·v`.
    pub fn mean(&self, v: &[f64]) -> f64 {
        numeric::dot(&self.pi, v)
    }

    /// `vᵀρ(t)w`, the lag-`t` covariance of `v` and `w` seen by the walker.
    pub fn autocovariance(&self, v: &[f64], w: &[f64], t: usize) -> Result<f64> {
        self.check_len(v)?;
        self.check_len(w)?;
        if is_constant(v) || is_constant(w) {
            return Ok(0.0);
        }
        // Centring leaves vᵀρ(t)w unchanged because ρ(t)1 = 0 and 1ᵀρ(t) = 0.
        let mv = self.mean(v);
        let mw = self.mean(w);
        let cv: Vec<f64> = v.iter().map(|x| x - mv).collect();
        let cw: Vec<f64> = w.iter().map(|x| x - mw).collect();
        let hw = self.hop_vector(&cw, t)?;
        Ok(numeric::sum(
            self.pi
                .iter()
                .zip(&cv)
                .zip(&hw)
                .map(|((p, a), b)| p * a * b),
        ))
    }

    /// `r(t, v) = vᵀρ(t)v`.
    pub fn scalar_assortativity(&self, v: &[f64], t: usize) -> Result<AssortativityValue> {
        Ok(AssortativityValue {
            t,
            value: self.autocovariance(v, v, t)?,
        })
    }

    /// Per-category `r(t, hᵢ)` and their sum `r(t, H)`.
    pub fn categorical_assortativity(
        &self,
        h: &CategoricalEncoding,
        t: usize,
    ) -> Result<(Vec<AssortativityValue>, AssortativityValue)> {
        if h.num_nodes() != self.num_nodes() {
            return Err(Error::DimensionMismatch {
                expected: self.num_nodes(),
                got: h.num_nodes(),
            });
        }
        let per_category = (0..h.k())
            .map(|i| self.scalar_assortativity(&h.column(i), t))
            .collect::<Result<Vec<_>>>()?;
        let total = numeric::sum(per_category.iter().map(|a| a.value));
        Ok((per_category, AssortativityValue { t, value: total }))
    }

    /// `r(t, I) = Σᵢ πᵢ (Mᵗ)ᵢᵢ − ‖π‖²` with the default hop limit.
    pub fn node_id_assortativity(&self, t: usize) -> Result<AssortativityValue> {
        self.node_id_assortativity_with_limit(t, DEFAULT_MAX_NODE_ID_HOP)
    }

    /// Node-ID assortativity computed from per-node `t`-step return
    /// probabilities. Each return probability is assembled from two
    /// truncated walks of lengths `⌈t/2⌉` and `⌊t/2⌋` out of the same node,
    /// using reversibility `πᵢ(Mᵇ)ᵢⱼ = πⱼ(Mᵇ)ⱼᵢ`.
    pub fn node_id_assortativity_with_limit(
        &self,
        t: usize,
        max_hop: usize,
    ) -> Result<AssortativityValue> {
        if t > max_hop {
            return Err(Error::HopLimit { t, max: max_hop });
        }
        let n = self.num_nodes();
        let pi_sq = numeric::sum(self.pi.iter().map(|p| p * p));
        if t == 0 {
            return Ok(AssortativityValue {
                t,
                value: numeric::sum(self.pi.iter().copied()) - pi_sq,
            });
        }

        let long = t.div_ceil(2);
        let short = t / 2;
        let mut cur = vec![0.0; n];
        let mut next = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut next_touched: Vec<usize> = Vec::new();
        let mut in_next = vec![false; n];
        let mut snapshot: Vec<(usize, f64)> = Vec::new();
        let mut trace = CompensatedSum::new();

        for i in 0..n {
            cur[i] = 1.0;
            touched.clear();
            touched.push(i);
            snapshot.clear();
            if short == 0 {
                snapshot.push((i, 1.0));
            }
            for step in 1..=long {
                next_touched.clear();
                for &u in &touched {
                    let mass = cur[u];
                    cur[u] = 0.0;
                    if mass == 0.0 {
                        continue;
                    }
                    let scale = mass / self.degrees[u];
                    let (cols, ws) = self.graph.neighbors(u);
                    for (&j, &w) in cols.iter().zip(ws) {
                        if !in_next[j] {
                            in_next[j] = true;
                            next_touched.push(j);
                        }
                        next[j] += scale * w;
                    }
                }
                std::mem::swap(&mut cur, &mut next);
                std::mem::swap(&mut touched, &mut next_touched);
                for &j in &touched {
                    in_next[j] = false;
                }
                if step == short {
                    snapshot.extend(touched.iter().map(|&j| (j, cur[j])));
                }
            }
            let mut ret = 0.0;
            for &(j, xb) in &snapshot {
                ret += xb * cur[j] * self.degrees[i] / self.degrees[j];
            }
            trace.add(self.pi[i] * ret);
            for &j in &touched {
                cur[j] = 0.0;
            }
        }
        Ok(AssortativityValue {
            t,
            value: trace.value() - pi_sq,
        })
    }

    /// Monte Carlo estimate of `r(t, v)` from `samples` simulated walks, each
    /// started from `π` and run for `t` steps.
    pub fn mc_assortativity(
        &self,
        v: &[f64],
        t: usize,
        samples: usize,
        seed: u64,
    ) -> Result<AssortativityValue> {
        Ok(self.mc_estimate(v, t, samples, seed)?.value)
    }

    pub fn mc_estimate(
        &self,
        v: &[f64],
        t: usize,
        samples: usize,
        seed: u64,
    ) -> Result<McEstimate> {
        self.check_len(v)?;
        if samples == 0 {
            return Err(Error::Config(
                "Monte Carlo needs at least one sample".into(),
            ));
        }
        if is_constant(v) {
            return Ok(McEstimate {
                value: AssortativityValue { t, value: 0.0 },
                std_error: 0.0,
                samples,
            });
        }
        let sampler = WalkSampler::new(self);
        let chunks = samples.div_ceil(MC_CHUNK);
        let partials: Vec<(f64, f64)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let len = MC_CHUNK.min(samples - c * MC_CHUNK);
                let mut s = CompensatedSum::new();
                let mut s2 = CompensatedSum::new();
                for _ in 0..len {
                    let x0 = sampler.start(&mut rng);
                    let mut x = x0;
                    for _ in 0..t {
                        x = sampler.step(x, &mut rng);
                    }
                    let prod = v[x0] * v[x];
                    s.add(prod);
                    s2.add(prod * prod);
                }
                (s.value(), s2.value())
            })
            .collect();
        let mut s = CompensatedSum::new();
        let mut s2 = CompensatedSum::new();
        for (a, b) in partials {
            s.add(a);
            s2.add(b);
        }
        let n = samples as f64;
        let mean_prod = s.value() / n;
        let mu = self.mean(v);
        let var = if samples > 1 {
            ((s2.value() - n * mean_prod * mean_prod) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Ok(McEstimate {
            value: AssortativityValue {
                t,
                value: mean_prod - mu * mu,
            },
            std_error: (var / n).sqrt(),
            samples,
        })
    }
}

/// Monte Carlo estimate with its empirical standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: AssortativityValue,
    pub std_error: f64,
    pub samples: usize,
}

fn is_constant(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

/// Inverse-CDF sampling tables for walk starts and transitions.
struct WalkSampler<'a> {
    graph: &'a Graph,
    cum_degree: Vec<f64>,
    cum_row: Vec<f64>,
}

impl<'a> WalkSampler<'a> {
    fn new(model: &WalkModel<'a>) -> Self {
        let graph = model.graph;
        let mut acc = 0.0;
        let cum_degree = model
            .degrees
            .iter()
            .map(|d| {
                acc += d;
                acc
            })
            .collect();
        let mut cum_row = Vec::with_capacity(graph.weights().len());
        for i in 0..graph.num_nodes() {
            let mut acc = 0.0;
            for &w in graph.neighbors(i).1 {
                acc += w;
                cum_row.push(acc);
            }
        }
        Self {
            graph,
            cum_degree,
            cum_row,
        }
    }

    /// A node drawn proportionally to degree.
    fn start(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cum_degree.last().unwrap();
        let u = rng.random::<f64>() * total;
        self.cum_degree
            .partition_point(|&c| c <= u)
            .min(self.cum_degree.len() - 1)
    }

    fn step(&self, i: usize, rng: &mut impl Rng) -> usize {
        let (s, e) = (self.graph.row_ptr()[i], self.graph.row_ptr()[i + 1]);
        let row = &self.cum_row[s..e];
        let u = rng.random::<f64>() * row[row.len() - 1];
        let k = row.partition_point(|&c| c <= u).min(row.len() - 1);
        self.graph.col_idx()[s + k]
    }
}
