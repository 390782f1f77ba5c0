// SPDX-License-Identifier: Apache-2.0

//! Graph classification datasets: TU benchmark text files and a JSON
//! record format.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, MergePolicy};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    /// Index into `class_alphabet` for each graph.
    pub graph_labels: Vec<usize>,
    /// Sorted distinct node-category values over the whole dataset. Empty
    /// for unlabeled datasets.
    pub label_alphabet: Vec<i64>,
    pub class_alphabet: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub num_graphs: usize,
    pub num_classes: usize,
    pub num_node_categories: Option<usize>,
    pub mean_nodes: f64,
    pub mean_edges: f64,
}

/// Node count, weighted edge list and optional raw node labels of one graph.
pub type RawGraph = (usize, Vec<(usize, usize, f64)>, Option<Vec<Option<i64>>>);

impl Dataset {
    /// Assembles a dataset from graphs whose node labels are raw category
    /// values and per-graph class names.
    pub fn from_raw(
        name: impl Into<String>,
        raw: Vec<RawGraph>,
        classes: Vec<String>,
        policy: MergePolicy,
    ) -> Result<Self> {
        let name = name.into();
        if raw.is_empty() {
            return Err(Error::EmptyDataset);
        }
        debug_assert_eq!(raw.len(), classes.len());

        let label_alphabet: Vec<i64> = raw
            .iter()
            .filter_map(|(_, _, labels)| labels.as_ref())
            .flatten()
            .flatten()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let label_index: HashMap<i64, usize> = label_alphabet
            .iter()
            .enumerate()
            .map(|(k, &v)| (v, k))
            .collect();

        let class_alphabet = sorted_classes(&classes);
        let class_index: HashMap<&str, usize> = class_alphabet
            .iter()
            .enumerate()
            .map(|(k, c)| (c.as_str(), k))
            .collect();

        let mut graphs = Vec::with_capacity(raw.len());
        for (index, (n, edges, labels)) in raw.into_iter().enumerate() {
            let labels = labels.map(|ls| {
                ls.into_iter()
                    .map(|l| l.map(|v| label_index[&v]))
                    .collect::<Vec<_>>()
            });
            let g = Graph::from_edges_with(n, &edges, labels, policy)
                .map_err(|e| Error::Record {
                    index,
                    message: e.to_string(),
                })?
                .with_id(format!("{name}#{}", index + 1));
            graphs.push(g);
        }
        let graph_labels = classes.iter().map(|c| class_index[c.as_str()]).collect();

        Ok(Dataset {
            name,
            graphs,
            graph_labels,
            label_alphabet,
            class_alphabet,
        })
    }

    pub fn is_labeled(&self) -> bool {
        !self.label_alphabet.is_empty()
    }

    /// Number of node categories `k`; zero when unlabeled.
    pub fn num_categories(&self) -> usize {
        self.label_alphabet.len()
    }

    pub fn summarize(&self) -> DatasetSummary {
        let n = self.graphs.len() as f64;
        DatasetSummary {
            name: self.name.clone(),
            num_graphs: self.graphs.len(),
            num_classes: self.class_alphabet.len(),
            num_node_categories: self.is_labeled().then_some(self.label_alphabet.len()),
            mean_nodes: self
                .graphs
                .iter()
                .map(|g| g.num_nodes() as f64)
                .sum::<f64>()
                / n,
            mean_edges: self
                .graphs
                .iter()
                .map(|g| g.edge_count() as f64)
                .sum::<f64>()
                / n,
        }
    }

    pub fn to_json_records(&self) -> Vec<JsonRecord> {
        self.graphs
            .iter()
            .zip(&self.graph_labels)
            .map(|(g, &class)| JsonRecord {
                nodes: g.num_nodes(),
                edges: g.edges().map(|(i, j, w)| JsonEdge(i, j, Some(w))).collect(),
                node_labels: g.node_labels().map(|ls| {
                    ls.iter()
                        .map(|l| l.map(|k| self.label_alphabet[k]))
                        .collect()
                }),
                class: serde_json::Value::String(self.class_alphabet[class].clone()),
            })
            .collect()
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json_records())?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Class names sorted numerically when every name is an integer, and
/// lexicographically otherwise.
fn sorted_classes(classes: &[String]) -> Vec<String> {
    let distinct: BTreeSet<&String> = classes.iter().collect();
    let mut out: Vec<String> = distinct.into_iter().cloned().collect();
    let numeric: Option<Vec<i64>> = out.iter().map(|c| c.parse::<i64>().ok()).collect();
    if let Some(keys) = numeric {
        let mut paired: Vec<(i64, String)> = keys.into_iter().zip(out).collect();
        paired.sort();
        out = paired.into_iter().map(|(_, c)| c).collect();
    }
    out
}

/// Non-empty lines of a text file. Accepts LF or CRLF endings and trailing
/// blank lines; a blank line followed by content is an error.
fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines: Vec<(usize, String)> = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim().to_string()))
        .collect();
    while lines.last().is_some_and(|(_, l)| l.is_empty()) {
        lines.pop();
    }
    if let Some((line, _)) = lines.iter().find(|(_, l)| l.is_empty()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: *line,
            message: "blank line".into(),
        });
    }
    Ok(lines)
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: usize, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("cannot parse {s:?}"),
    })
}

/// Loads a dataset in the TU benchmark layout from `directory`.
pub fn load_tu_dataset(directory: &Path, name: &str) -> Result<Dataset> {
    let file = |suffix: &str| -> PathBuf { directory.join(format!("{name}_{suffix}.txt")) };
    let a_path = file("A");
    let indicator_path = file("graph_indicator");
    let graph_labels_path = file("graph_labels");
    let node_labels_path = file("node_labels");

    let indicator: Vec<usize> = read_lines(&indicator_path)?
        .iter()
        .map(|(line, s)| parse_field(&indicator_path, *line, s))
        .collect::<Result<_>>()?;
    let classes: Vec<String> = read_lines(&graph_labels_path)?
        .into_iter()
        .map(|(_, s)| s)
        .collect();
    let num_graphs = classes.len();
    if num_graphs == 0 {
        return Err(Error::EmptyDataset);
    }

    // Local index of each global node inside its graph.
    let mut local = Vec::with_capacity(indicator.len());
    let mut sizes = vec![0usize; num_graphs];
    for (k, &gid) in indicator.iter().enumerate() {
        if gid == 0 || gid > num_graphs {
            return Err(Error::Parse {
                path: indicator_path.clone(),
                line: k + 1,
                message: format!("graph id {gid} outside 1..={num_graphs}"),
            });
        }
        local.push(sizes[gid - 1]);
        sizes[gid - 1] += 1;
    }

    let node_labels: Option<Vec<i64>> = if node_labels_path.is_file() {
        let labels: Vec<i64> = read_lines(&node_labels_path)?
            .iter()
            .map(|(line, s)| {
                // Some releases append extra comma-separated columns.
                let first = s.split(',').next().unwrap_or("");
                parse_field(&node_labels_path, *line, first)
            })
            .collect::<Result<_>>()?;
        if labels.len() != indicator.len() {
            return Err(Error::LabelLength {
                expected: indicator.len(),
                got: labels.len(),
            });
        }
        Some(labels)
    } else {
        None
    };

    let mut edges: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); num_graphs];
    for (line, s) in read_lines(&a_path)? {
        let mut parts = s.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                path: a_path.clone(),
                line,
                message: "expected two comma-separated node ids".into(),
            });
        };
        let a: usize = parse_field(&a_path, line, a)?;
        let b: usize = parse_field(&a_path, line, b)?;
        for node in [a, b] {
            if node == 0 || node > indicator.len() {
                return Err(Error::Parse {
                    path: a_path.clone(),
                    line,
                    message: format!("node id {node} outside 1..={}", indicator.len()),
                });
            }
        }
        let (ga, gb) = (indicator[a - 1], indicator[b - 1]);
        if ga != gb {
            return Err(Error::CrossGraphEdge {
                a,
                b,
                graph_a: ga,
                graph_b: gb,
            });
        }
        edges[ga - 1].push((local[a - 1], local[b - 1], 1.0));
    }

    let mut per_graph_labels: Vec<Vec<Option<i64>>> =
        sizes.iter().map(|&n| Vec::with_capacity(n)).collect();
    if let Some(labels) = &node_labels {
        for (k, &gid) in indicator.iter().enumerate() {
            per_graph_labels[gid - 1].push(Some(labels[k]));
        }
    }

    let raw = sizes
        .iter()
        .zip(edges)
        .zip(per_graph_labels)
        .map(|((&n, e), l)| (n, e, node_labels.as_ref().map(|_| l)))
        .collect();
    Dataset::from_raw(name, raw, classes, MergePolicy::Max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonRecord {
    pub nodes: usize,
    pub edges: Vec<JsonEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_labels: Option<Vec<Option<i64>>>,
    pub class: serde_json::Value,
}

/// `[i, j]` or `[i, j, w]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonEdge(
    pub usize,
    pub usize,
    #[serde(default, skip_serializing_if = "Option::is_none")] pub Option<f64>,
);

pub fn load_json_dataset(file: &Path) -> Result<Dataset> {
    if !file.is_file() {
        return Err(Error::MissingFile(file.to_path_buf()));
    }
    let text = fs::read_to_string(file).map_err(|e| Error::io(file, e))?;
    let name = file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_json_dataset(&name, &text)
}

pub fn parse_json_dataset(name: &str, text: &str) -> Result<Dataset> {
    let values: Vec<serde_json::Value> = serde_json::from_str(text)?;
    if values.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut raw = Vec::with_capacity(values.len());
    let mut classes = Vec::with_capacity(values.len());
    for (index, value) in values.into_iter().enumerate() {
        let record: JsonRecord = serde_json::from_value(value).map_err(|e| Error::Record {
            index,
            message: e.to_string(),
        })?;
        let class = match &record.class {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => {
                return Err(Error::Record {
                    index,
                    message: format!("class must be a string or number, got {other}"),
                })
            }
        };
        if let Some(labels) = &record.node_labels {
            if labels.len() != record.nodes {
                return Err(Error::Record {
                    index,
                    message: format!("{} node labels for {} nodes", labels.len(), record.nodes),
                });
            }
        }
        let edges = record
            .edges
            .iter()
            .map(|e| (e.0, e.1, e.2.unwrap_or(1.0)))
            .collect();
        raw.push((record.nodes, edges, record.node_labels));
        classes.push(class);
    }
    Dataset::from_raw(name, raw, classes, MergePolicy::Sum)
}
