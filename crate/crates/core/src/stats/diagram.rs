// SPDX-License-Identifier: Apache-2.0

//! Critical-difference diagram: one row per algorithm, ordered by average
//! rank, with the CD tail drawn from the best rank.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{FriedmanResult, NemenyiResult};
use crate::error::{Error, Result};

/// Every number placed on the diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramData {
    /// Ascending by average rank (ties by name).
    pub algorithms: Vec<String>,
    pub average_ranks: Vec<f64>,
    pub best_rank: f64,
    pub cd: f64,
    /// `[best, best + cd]`, the upper end capped at the worst possible rank.
    pub window: [f64; 2],
    /// Algorithms whose rank exceeds `best + cd`.
    pub outside_window: Vec<String>,
    pub friedman_q: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub q_value: f64,
    pub convention: super::CdConvention,
}

impl DiagramData {
    pub fn new(f: &FriedmanResult, n: &NemenyiResult) -> Result<Self> {
        let k = f.algorithms.len();
        if k != n.num_algorithms || f.average_ranks.len() != k || k < 2 {
            return Err(Error::DimensionMismatch {
                expected: n.num_algorithms,
                got: k,
            });
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            f.average_ranks[a]
                .total_cmp(&f.average_ranks[b])
                .then_with(|| f.algorithms[a].cmp(&f.algorithms[b]))
        });
        let best = f.average_ranks[order[0]];
        let limit = best + n.cd;
        Ok(Self {
            algorithms: order.iter().map(|&j| f.algorithms[j].clone()).collect(),
            average_ranks: order.iter().map(|&j| f.average_ranks[j]).collect(),
            best_rank: best,
            cd: n.cd,
            window: [best, limit.min(k as f64)],
            outside_window: order
                .iter()
                .filter(|&&j| f.average_ranks[j] > limit)
                .map(|&j| f.algorithms[j].clone())
                .collect(),
            friedman_q: f.q,
            p_value: f.p_value,
            alpha: n.alpha,
            q_value: n.q_value,
            convention: n.convention,
        })
    }

    pub fn to_svg(&self) -> String {
        const LEFT: f64 = 170.0;
        const WIDTH: f64 = 420.0;
        const TOP: f64 = 70.0;
        const ROW: f64 = 24.0;
        let k = self.algorithms.len();
        let x = |r: f64| LEFT + (r - 1.0) / (k as f64 - 1.0) * WIDTH;
        let bottom = TOP + ROW * k as f64;
        let total_w = LEFT + WIDTH + 40.0;
        let total_h = bottom + 20.0;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.0}" height="{total_h:.0}" viewBox="0 0 {total_w:.0} {total_h:.0}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{LEFT:.1}" y="18">CD = {:.4} (alpha = {}, {}), Friedman Q = {:.3}, p = {:.6}</text>"#,
            self.cd, self.alpha, self.convention, self.friedman_q, self.p_value
        );
        let axis_y = TOP - 25.0;
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{axis_y:.3}" x2="{:.3}" y2="{axis_y:.3}" stroke="black"/>"#,
            x(1.0),
            x(k as f64)
        );
        for r in 1..=k {
            let xr = x(r as f64);
            let _ = writeln!(
                s,
                r#"<line x1="{xr:.3}" y1="{:.3}" x2="{xr:.3}" y2="{axis_y:.3}" stroke="black"/>"#,
                axis_y - 5.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{xr:.3}" y="{:.3}" text-anchor="middle">{r}</text>"#,
                axis_y - 9.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end">mean rank</text>"#,
            LEFT - 10.0,
            axis_y + 4.0
        );

        for edge in self.window {
            let xe = x(edge);
            let _ = writeln!(
                s,
                r#"<line x1="{xe:.3}" y1="{axis_y:.3}" x2="{xe:.3}" y2="{bottom:.3}" stroke="gray" stroke-dasharray="4,3"/>"#
            );
        }

        for (i, (name, &rank)) in self.algorithms.iter().zip(&self.average_ranks).enumerate() {
            let y = TOP + ROW * i as f64 + ROW / 2.0;
            let xr = x(rank);
            let _ = writeln!(
                s,
                r#"<line x1="{LEFT:.3}" y1="{y:.3}" x2="{xr:.3}" y2="{y:.3}" stroke="lightgray"/>"#
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{} ({rank:.3})</text>"#,
                LEFT - 10.0,
                y + 4.0,
                escape(name)
            );
            let _ = writeln!(
                s,
                r#"<circle cx="{xr:.3}" cy="{y:.3}" r="4" fill="black"/>"#
            );
            if i == 0 {
                let _ = writeln!(
                    s,
                    r#"<line x1="{xr:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="black" stroke-width="3"/>"#,
                    x(self.window[1])
                );
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Writes `bytes` next to `path` and renames it into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// `out` with `.json` appended (`cd.svg` → `cd.svg.json`).
pub fn companion_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".json");
    PathBuf::from(p)
}

/// Writes the SVG to `out` and the plotted numbers to [`companion_path`].
pub fn significance_diagram(
    f: &FriedmanResult,
    n: &NemenyiResult,
    out: &Path,
) -> Result<DiagramData> {
    let data = DiagramData::new(f, n)?;
    write_atomic(out, data.to_svg().as_bytes())?;
    let json = serde_json::to_string_pretty(&data)? + "\n";
    write_atomic(&companion_path(out), json.as_bytes())?;
    Ok(data)
}
