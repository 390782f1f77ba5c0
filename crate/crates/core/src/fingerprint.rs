// SPDX-License-Identifier: Apache-2.0

//! Fixed-order feature vectors ("fingerprints") of graphs.
//!
//! Feature blocks, by id:
//!
//! 1. node-ID assortativity `r(t, I)` for `t = 0..=T`
//! 2. degree-weighted mean `πᵀuᵢ` of each of the first `p` dominant left
//!    eigenvectors
//! 3. `r(t, uᵢ)` for each eigenvector (eigenvector-major, then hop)
//! 4. category frequencies `πᵀhᵢ` in alphabet order
//! 5. `r(t, hᵢ)` for each category (category-major, then hop)
//! 6. node count
//! 7. edge count
//!
//! Eigenvector slots beyond the spectrum of a small graph are zero.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::dominant_left_eigenvectors;
use crate::walk::{CategoricalEncoding, WalkModel, DEFAULT_MAX_NODE_ID_HOP};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintConfig {
    pub feature_ids: BTreeSet<u8>,
    pub num_eigenvectors: usize,
    pub max_hop: usize,
    pub use_labels: bool,
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        Self::new([1, 2, 3, 4, 5, 6, 7], 3, 3)
    }
}

/// Named presets reproducing the per-dataset feature recipes.
pub const PRESETS: &[(&str, &[u8], usize)] = &[
    ("mutag", &[1, 2, 3, 4, 5, 6, 7], 3),
    ("ptc", &[1, 2, 3, 4, 5, 6, 7], 3),
    ("nci1", &[1, 2, 3, 4, 5, 6, 7], 3),
    ("nci109", &[1, 2, 3, 4, 5, 6, 7], 3),
    ("enzymes", &[1, 2, 3, 4, 5, 6, 7], 3),
    ("proteins", &[1, 2, 3, 4, 5, 6, 7], 3),
    ("collab", &[1, 2, 3, 6, 7], 5),
    ("reddit-binary", &[1, 2, 3, 6, 7], 5),
    ("reddit-multi-5k", &[1, 2, 3, 6, 7], 5),
    ("reddit-multi-12k", &[1, 2, 3, 6, 7], 5),
    ("imdb-binary", &[1, 2, 3, 6, 7], 3),
    ("imdb-multi", &[1, 2, 3, 6, 7], 3),
];

impl FingerprintConfig {
    /// Config with `use_labels` set exactly when blocks 4 or 5 are selected.
    pub fn new(ids: impl IntoIterator<Item = u8>, num_eigenvectors: usize, max_hop: usize) -> Self {
        let feature_ids: BTreeSet<u8> = ids.into_iter().collect();
        let use_labels = feature_ids.contains(&4) || feature_ids.contains(&5);
        Self {
            feature_ids,
            num_eigenvectors,
            max_hop,
            use_labels,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        let key = name.to_ascii_lowercase();
        PRESETS
            .iter()
            .find(|(n, _, _)| *n == key)
            .map(|(_, ids, p)| Self::new(ids.iter().copied(), *p, 3))
    }

    fn has(&self, id: u8) -> bool {
        self.feature_ids.contains(&id)
    }

    pub fn validate(&self) -> Result<()> {
        if self.feature_ids.is_empty() {
            return Err(Error::Config("no features selected".into()));
        }
        if let Some(bad) = self.feature_ids.iter().find(|&&id| !(1..=7).contains(&id)) {
            return Err(Error::Config(format!("unknown feature id {bad}")));
        }
        if (self.has(4) || self.has(5)) && !self.use_labels {
            return Err(Error::Config(
                "features 4 and 5 need node labels (use_labels)".into(),
            ));
        }
        if (self.has(2) || self.has(3)) && self.num_eigenvectors == 0 {
            return Err(Error::Config(
                "features 2 and 3 need at least one eigenvector".into(),
            ));
        }
        if self.has(1) && self.max_hop > DEFAULT_MAX_NODE_ID_HOP {
            return Err(Error::Config(format!(
                "node-ID assortativity supports at most {DEFAULT_MAX_NODE_ID_HOP} hops"
            )));
        }
        Ok(())
    }

    /// Feature count for a dataset with `k` node categories.
    pub fn dimension(&self, k: usize) -> usize {
        let hops = self.max_hop + 1;
        let p = self.num_eigenvectors;
        let on = |id| usize::from(self.has(id));
        hops * on(1) + p * on(2) + p * hops * on(3) + k * on(4) + k * hops * on(5) + on(6) + on(7)
    }

    pub fn feature_names(&self, k: usize) -> Vec<String> {
        let hops = 0..=self.max_hop;
        let mut names = Vec::with_capacity(self.dimension(k));
        if self.has(1) {
            names.extend(hops.clone().map(|t| format!("idassort_t{t}")));
        }
        if self.has(2) {
            names.extend((1..=self.num_eigenvectors).map(|i| format!("eig{i}_avg")));
        }
        if self.has(3) {
            for i in 1..=self.num_eigenvectors {
                names.extend(hops.clone().map(|t| format!("eig{i}_assort_t{t}")));
            }
        }
        if self.has(4) {
            names.extend((1..=k).map(|c| format!("cat{c}_avg")));
        }
        if self.has(5) {
            for c in 1..=k {
                names.extend(hops.clone().map(|t| format!("cat{c}_assort_t{t}")));
            }
        }
        if self.has(6) {
            names.push("num_nodes".into());
        }
        if self.has(7) {
            names.push("num_edges".into());
        }
        names
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

/// Fingerprint of one graph given the dataset's category count `k`.
pub fn fingerprint(g: &Graph, cfg: &FingerprintConfig, k: usize) -> Result<FeatureVector> {
    cfg.validate()?;
    let encoding = if cfg.use_labels {
        if k == 0 {
            return Err(Error::Config(
                "label features requested on an unlabeled dataset".into(),
            ));
        }
        Some(CategoricalEncoding::from_graph(g, k)?)
    } else {
        None
    };

    let model = WalkModel::new(g);
    let hops = 0..=cfg.max_hop;
    let mut values = Vec::with_capacity(cfg.dimension(k));

    if cfg.has(1) {
        for t in hops.clone() {
            values.push(
                model
                    .node_id_assortativity_with_limit(t, cfg.max_hop)?
                    .value,
            );
        }
    }
    if cfg.has(2) || cfg.has(3) {
        let p = cfg.num_eigenvectors;
        let basis = dominant_left_eigenvectors(&model, p)?;
        let available = basis.left_eigenvectors.len();
        if cfg.has(2) {
            values.extend(basis.left_eigenvectors.iter().map(|u| model.mean(u)));
            values.extend(std::iter::repeat_n(0.0, p - available));
        }
        if cfg.has(3) {
            for u in &basis.left_eigenvectors {
                for t in hops.clone() {
                    values.push(model.scalar_assortativity(u, t)?.value);
                }
            }
            values.extend(std::iter::repeat_n(
                0.0,
                (p - available) * (cfg.max_hop + 1),
            ));
        }
    }
    if let Some(h) = &encoding {
        let columns: Vec<Vec<f64>> = (0..k).map(|c| h.column(c)).collect();
        if cfg.has(4) {
            values.extend(columns.iter().map(|col| model.mean(col)));
        }
        if cfg.has(5) {
            for col in &columns {
                for t in hops.clone() {
                    values.push(model.scalar_assortativity(col, t)?.value);
                }
            }
        }
    }
    if cfg.has(6) {
        values.push(g.num_nodes() as f64);
    }
    if cfg.has(7) {
        values.push(g.edge_count() as f64);
    }

    debug_assert_eq!(values.len(), cfg.dimension(k));
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("non-finite feature value".into()));
    }
    Ok(FeatureVector {
        names: cfg.feature_names(k),
        values,
    })
}

/// Feature rows for a whole dataset plus the class of each row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Index into `class_alphabet`.
    pub classes: Vec<usize>,
    pub class_alphabet: Vec<String>,
}

/// Fingerprints every graph in dataset order. Graphs are processed in
/// parallel on the current rayon pool.
pub fn fingerprint_dataset(d: &Dataset, cfg: &FingerprintConfig) -> Result<FeatureMatrix> {
    cfg.validate()?;
    let k = d.num_categories();
    if cfg.use_labels && k == 0 {
        return Err(Error::Config(format!(
            "dataset {} has no node labels but label features were requested",
            d.name
        )));
    }
    let rows = d
        .graphs
        .par_iter()
        .map(|g| {
            fingerprint(g, cfg, k)
                .map(|fv| fv.values)
                .map_err(|e| Error::InGraph {
                    graph_id: g.graph_id().to_string(),
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureMatrix {
        names: cfg.feature_names(k),
        rows,
        classes: d.graph_labels.clone(),
        class_alphabet: d.class_alphabet.clone(),
    })
}

impl FeatureMatrix {
    pub fn num_features(&self) -> usize {
        self.names.len()
    }

    /// CSV with a header of feature names and a final `class` column. Values
    /// carry 17 significant digits; lines end in LF.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header = self.names.join(",");
        header.push_str(",class\n");
        out.write_all(header.as_bytes())?;
        for (row, &class) in self.rows.iter().zip(&self.classes) {
            let mut line = String::with_capacity(row.len() * 24);
            for v in row {
                line.push_str(&format!("{v:.16e},"));
            }
            line.push_str(&self.class_alphabet[class]);
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    pub fn read_csv<R: BufRead>(input: R, origin: &std::path::Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut lines = input.lines().enumerate();
        let header = match lines.next() {
            Some((_, Ok(h))) => h,
            Some((_, Err(e))) => return Err(Error::io(origin, e)),
            None => return Err(parse_err(1, "empty feature file".into())),
        };
        let mut names: Vec<String> = header.trim_end().split(',').map(str::to_string).collect();
        if names.pop().as_deref() != Some("class") {
            return Err(parse_err(1, "last column must be `class`".into()));
        }
        let mut rows = Vec::new();
        let mut raw_classes = Vec::new();
        for (k, line) in lines {
            let line = line.map_err(|e| Error::io(origin, e))?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != names.len() + 1 {
                return Err(parse_err(
                    k + 1,
                    format!("{} fields, expected {}", fields.len(), names.len() + 1),
                ));
            }
            let row = fields[..names.len()]
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| parse_err(k + 1, format!("bad number {f:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
            raw_classes.push(fields[names.len()].to_string());
        }
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut class_alphabet: Vec<String> = raw_classes
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if let Some(mut keyed) = class_alphabet
            .iter()
            .map(|c| c.parse::<i64>().ok().map(|k| (k, c.clone())))
            .collect::<Option<Vec<_>>>()
        {
            keyed.sort();
            class_alphabet = keyed.into_iter().map(|(_, c)| c).collect();
        }
        let classes = raw_classes
            .iter()
            .map(|c| class_alphabet.iter().position(|a| a == c).unwrap())
            .collect();
        Ok(FeatureMatrix {
            names,
            rows,
            classes,
            class_alphabet,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_dimensions() {
        let mutag = FingerprintConfig::preset("MUTAG").unwrap();
        assert_eq!(mutag.dimension(7), 56);
        let collab = FingerprintConfig::preset("collab").unwrap();
        assert_eq!(collab.dimension(0), 31);
        assert_eq!(collab.feature_names(0).len(), 31);
        assert_eq!(mutag.feature_names(7).len(), 56);
    }

    #[test]
    fn names_follow_serialization_order() {
        let cfg = FingerprintConfig::new([1, 2, 3, 4, 5, 6, 7], 2, 1);
        let names = cfg.feature_names(2);
        assert_eq!(
            names,
            [
                "idassort_t0",
                "idassort_t1",
                "eig1_avg",
                "eig2_avg",
                "eig1_assort_t0",
                "eig1_assort_t1",
                "eig2_assort_t0",
                "eig2_assort_t1",
                "cat1_avg",
                "cat2_avg",
                "cat1_assort_t0",
                "cat1_assort_t1",
                "cat2_assort_t0",
                "cat2_assort_t1",
                "num_nodes",
                "num_edges",
            ]
        );
    }

    #[test]
    fn single_node_counts() {
        let g = Graph::from_edges(1, &[], None).unwrap();
        let fv = fingerprint(&g, &FingerprintConfig::new([6, 7], 1, 3), 0).unwrap();
        assert_eq!(fv.values, vec![1.0, 1.0]);
        assert_eq!(fv.names, vec!["num_nodes", "num_edges"]);
    }

    #[test]
    fn hops_zero_block_width() {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], None).unwrap();
        let fv = fingerprint(&g, &FingerprintConfig::new([1], 1, 0), 0).unwrap();
        assert_eq!(fv.values.len(), 1);
        assert!((fv.values[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn small_graph_pads_eigen_slots() {
        let g = Graph::from_edges(2, &[(0, 1, 1.0)], None).unwrap();
        let cfg = FingerprintConfig::new([2, 3], 3, 1);
        let fv = fingerprint(&g, &cfg, 0).unwrap();
        assert_eq!(fv.values.len(), 3 + 6);
        assert_eq!(&fv.values[1..3], &[0.0, 0.0]);
        assert_eq!(&fv.values[7..], &[0.0, 0.0]);
    }

    #[test]
    fn label_mismatch_errors() {
        let g = Graph::from_edges(2, &[(0, 1, 1.0)], None).unwrap();
        let cfg = FingerprintConfig::new([4], 1, 1);
        assert!(fingerprint(&g, &cfg, 2).is_err());
        assert!(fingerprint(&g, &cfg, 0).is_err());
        let mut bad = cfg.clone();
        bad.use_labels = false;
        assert!(bad.validate().is_err());
        assert!(FingerprintConfig::new(Vec::<u8>::new(), 1, 1)
            .validate()
            .is_err());
        assert!(FingerprintConfig::new([9], 1, 1).validate().is_err());
    }

    #[test]
    fn category_frequencies_sum_to_one() {
        let g = Graph::from_edges(
            4,
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)],
            Some(vec![Some(0), Some(2), Some(2), Some(0)]),
        )
        .unwrap();
        let fv = fingerprint(&g, &FingerprintConfig::new([4], 1, 1), 3).unwrap();
        assert_eq!(fv.values.len(), 3);
        assert_eq!(fv.values[1], 0.0);
        assert!((fv.values.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn csv_round_trip() {
        let m = FeatureMatrix {
            names: vec!["a".into(), "b".into()],
            rows: vec![vec![0.1, 1.0 / 3.0], vec![-2.5e-300, 7.0]],
            classes: vec![1, 0],
            class_alphabet: vec!["-1".into(), "1".into()],
        };
        let text = m.to_csv_string();
        assert!(text.starts_with("a,b,class\n"));
        let back = FeatureMatrix::read_csv(text.as_bytes(), std::path::Path::new("mem")).unwrap();
        assert_eq!(back, m);
    }
}
