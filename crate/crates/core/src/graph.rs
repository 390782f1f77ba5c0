// SPDX-License-Identifier: Apache-2.0

//! Undirected weighted graphs in compressed sparse row form.
//!
//! Every stored graph is symmetric and has no zero-degree rows: a node left
//! isolated by its edge list receives a unit self-loop so that the random
//! walk transition matrix is row-stochastic everywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How repeated mentions of the same undirected pair are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MergePolicy {
    /// Weights of all mentions are added.
    #[default]
    Sum,
    /// The largest mention wins. Suited to edge files that list both
    /// orientations of each edge.
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    graph_id: String,
    num_nodes: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    weights: Vec<f64>,
    node_labels: Option<Vec<Option<usize>>>,
    edge_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeProfile {
    pub degrees: Vec<f64>,
    pub total_weight: f64,
    pub edge_count: usize,
}

impl Graph {
    /// Builds a graph from an undirected edge list, summing duplicate pairs.
    pub fn from_edges(
        num_nodes: usize,
        edges: &[(usize, usize, f64)],
        node_labels: Option<Vec<Option<usize>>>,
    ) -> Result<Self> {
        Self::from_edges_with(num_nodes, edges, node_labels, MergePolicy::Sum)
    }

    pub fn from_edges_with(
        num_nodes: usize,
        edges: &[(usize, usize, f64)],
        node_labels: Option<Vec<Option<usize>>>,
        policy: MergePolicy,
    ) -> Result<Self> {
        if let Some(labels) = &node_labels {
            if labels.len() != num_nodes {
                return Err(Error::LabelLength {
                    expected: num_nodes,
                    got: labels.len(),
                });
            }
        }

        let mut pairs = Vec::with_capacity(edges.len());
        for &(i, j, w) in edges {
            for index in [i, j] {
                if index >= num_nodes {
                    return Err(Error::NodeOutOfRange { index, num_nodes });
                }
            }
            if !w.is_finite() {
                return Err(Error::NonFiniteWeight { i, j });
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight { i, j, weight: w });
            }
            pairs.push((i.min(j), i.max(j), w));
        }
        pairs.sort_by_key(|a| (a.0, a.1));

        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(pairs.len());
        for (i, j, w) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => match policy {
                    MergePolicy::Sum => last.2 += w,
                    MergePolicy::Max => last.2 = last.2.max(w),
                },
                _ => merged.push((i, j, w)),
            }
        }
        // A zero-weight pair carries no adjacency.
        merged.retain(|&(_, _, w)| w > 0.0);

        let mut degree = vec![0.0; num_nodes];
        for &(i, j, w) in &merged {
            degree[i] += w;
            if i != j {
                degree[j] += w;
            }
        }
        for (node, d) in degree.iter().enumerate() {
            if *d == 0.0 {
                merged.push((node, node, 1.0));
            }
        }
        let edge_count = merged.len();

        let mut counts = vec![0usize; num_nodes];
        for &(i, j, _) in &merged {
            counts[i] += 1;
            if i != j {
                counts[j] += 1;
            }
        }
        let mut row_ptr = Vec::with_capacity(num_nodes + 1);
        row_ptr.push(0);
        for c in &counts {
            row_ptr.push(row_ptr.last().unwrap() + c);
        }
        let nnz = *row_ptr.last().unwrap();
        let mut col_idx = vec![0usize; nnz];
        let mut weights = vec![0.0; nnz];
        let mut cursor = row_ptr[..num_nodes].to_vec();
        for &(i, j, w) in &merged {
            col_idx[cursor[i]] = j;
            weights[cursor[i]] = w;
            cursor[i] += 1;
            if i != j {
                col_idx[cursor[j]] = i;
                weights[cursor[j]] = w;
                cursor[j] += 1;
            }
        }
        for row in 0..num_nodes {
            let (start, end) = (row_ptr[row], row_ptr[row + 1]);
            let mut entries: Vec<(usize, f64)> = col_idx[start..end]
                .iter()
                .copied()
                .zip(weights[start..end].iter().copied())
                .collect();
            entries.sort_by_key(|e| e.0);
            for (k, (c, w)) in entries.into_iter().enumerate() {
                col_idx[start + k] = c;
                weights[start + k] = w;
            }
        }

        Ok(Graph {
            graph_id: String::new(),
            num_nodes,
            row_ptr,
            col_idx,
            weights,
            node_labels,
            edge_count,
        })
    }

    pub fn with_id(mut self, graph_id: impl Into<String>) -> Self {
        self.graph_id = graph_id.into();
        self
    }

    pub fn graph_id(&self) -> &str {
        &self.graph_id
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Undirected edges, each self-loop counted once.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node_labels(&self) -> Option<&[Option<usize>]> {
        self.node_labels.as_deref()
    }

    /// Column indices and weights of row `i`, sorted by column.
    #[inline]
    pub fn neighbors(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[s..e], &self.weights[s..e])
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let (cols, ws) = self.neighbors(i);
        cols.binary_search(&j).map(|k| ws[k]).unwrap_or(0.0)
    }

    /// Each undirected edge once as `(i, j, w)` with `i <= j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.num_nodes).flat_map(move |i| {
            let (cols, ws) = self.neighbors(i);
            cols.iter()
                .zip(ws)
                .filter(move |(&j, _)| j >= i)
                .map(move |(&j, &w)| (i, j, w))
        })
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.num_nodes)
            .map(|i| crate::numeric::sum(self.neighbors(i).1.iter().copied()))
            .collect()
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let degrees = self.degrees();
        let total_weight = crate::numeric::sum(degrees.iter().copied());
        DegreeProfile {
            degrees,
            total_weight,
            edge_count: self.edge_count,
        }
    }

    /// Same graph with node `i` renamed to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_nodes {
            return Err(Error::DimensionMismatch {
                expected: self.num_nodes,
                got: perm.len(),
            });
        }
        let edges: Vec<_> = self
            .edges()
            .map(|(i, j, w)| (perm[i], perm[j], w))
            .collect();
        let labels = self.node_labels.as_ref().map(|labels| {
            let mut out = vec![None; labels.len()];
            for (i, l) in labels.iter().enumerate() {
                out[perm[i]] = *l;
            }
            out
        });
        Ok(Graph::from_edges(self.num_nodes, &edges, labels)?.with_id(self.graph_id.clone()))
    }
}
