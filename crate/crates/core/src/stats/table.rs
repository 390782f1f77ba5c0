// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Datasets × algorithms accuracy matrix. `None` marks a missing score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyTable {
    pub datasets: Vec<String>,
    pub algorithms: Vec<String>,
    /// Row-major, `cells[dataset][algorithm]`.
    pub cells: Vec<Vec<Option<f64>>>,
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "--" | "-" | "NA" | "na" | "N/A" | "nan" | "NaN")
}

impl AccuracyTable {
    pub fn new(
        datasets: Vec<String>,
        algorithms: Vec<String>,
        cells: Vec<Vec<Option<f64>>>,
    ) -> Result<Self> {
        if cells.len() != datasets.len() {
            return Err(Error::DimensionMismatch {
                expected: datasets.len(),
                got: cells.len(),
            });
        }
        if let Some(row) = cells.iter().find(|r| r.len() != algorithms.len()) {
            return Err(Error::ColumnMismatch {
                expected: algorithms.len(),
                got: row.len(),
            });
        }
        Ok(Self {
            datasets,
            algorithms,
            cells,
        })
    }

    pub fn from_matrix(
        datasets: Vec<String>,
        algorithms: Vec<String>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let cells = values
            .into_iter()
            .map(|r| r.into_iter().map(Some).collect())
            .collect();
        Self::new(datasets, algorithms, cells)
    }

    /// CSV with a header of algorithm names (the first header cell labels the
    /// dataset column) and one row per dataset. Empty, `--` and `NA` cells
    /// are missing.
    pub fn parse_csv(text: &str, origin: &Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .clone();
        let algorithms: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut datasets = Vec::new();
        let mut cells = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                parse_err(line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let mut fields = record.iter();
            let name = fields.next().unwrap_or_default().to_string();
            let row = fields
                .map(|cell| {
                    if is_missing(cell) {
                        Ok(None)
                    } else {
                        cell.parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite())
                            .map(Some)
                            .ok_or_else(|| parse_err(line, format!("invalid accuracy {cell:?}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            datasets.push(name);
            cells.push(row);
        }
        Self::new(datasets, algorithms, cells)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, path)
    }

    pub fn num_datasets(&self) -> usize {
        self.datasets.len()
    }

    pub fn num_algorithms(&self) -> usize {
        self.algorithms.len()
    }

    /// The sub-table of algorithms scored on every dataset, in column order.
    pub fn complete_columns(&self) -> Self {
        let keep: Vec<usize> = (0..self.algorithms.len())
            .filter(|&j| self.cells.iter().all(|r| r[j].is_some()))
            .collect();
        Self {
            datasets: self.datasets.clone(),
            algorithms: keep.iter().map(|&j| self.algorithms[j].clone()).collect(),
            cells: self
                .cells
                .iter()
                .map(|r| keep.iter().map(|&j| r[j]).collect())
                .collect(),
        }
    }

    /// Restricts to the named algorithms, in the given order.
    pub fn select(&self, algorithms: &[&str]) -> Result<Self> {
        let idx = algorithms
            .iter()
            .map(|name| {
                self.algorithms
                    .iter()
                    .position(|a| a == name)
                    .ok_or_else(|| Error::Config(format!("unknown algorithm {name:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            datasets: self.datasets.clone(),
            algorithms: idx.iter().map(|&j| self.algorithms[j].clone()).collect(),
            cells: self
                .cells
                .iter()
                .map(|r| idx.iter().map(|&j| r[j]).collect())
                .collect(),
        })
    }

    /// Dense values, or the first missing `(dataset, algorithm)`.
    pub fn values(&self) -> Result<Vec<Vec<f64>>> {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, c)| {
                        c.ok_or_else(|| Error::MissingCell {
                            dataset: self.datasets[i].clone(),
                            algorithm: self.algorithms[j].clone(),
                        })
                    })
                    .collect()
            })
            .collect()
    }
}
