//! Plain-text columns for generic plotting tools.
//!
//! Each [`Table`] renders as a `#`-prefixed header naming the columns,
//! followed by one whitespace-separated row per line. Blank lines separate
//! blocks (line segments, rectangles), which gnuplot and similar tools read
//! as breaks in a curve. An empty table renders as an empty string.

use std::fmt::Write as _;

use crate::greedy::GoldenDigit;
use crate::measure::PiecewiseDensity;
use crate::natext::tower::outline;
use crate::qbeta::QBeta;

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub title: String,
    pub columns: Vec<&'static str>,
    /// Rows grouped into blocks.
    pub blocks: Vec<Vec<Vec<f64>>>,
}

impl Table {
    pub fn new(title: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Table {
            title: title.into(),
            columns,
            blocks: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(Vec::is_empty)
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.blocks.iter().flatten()
    }

    pub fn render(&self) -> String {
        if self.is_empty() {
            return String::new();
        }
        let mut out = format!("# {}\n# {}\n", self.title, self.columns.join(" "));
        let mut first = true;
        for block in self.blocks.iter().filter(|b| !b.is_empty()) {
            if !first {
                out.push('\n');
            }
            first = false;
            for row in block {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{}", cells.join(" ")).expect("writing to a String");
            }
        }
        out
    }
}

/// The three branches of the golden map, one segment each, followed by a
/// block with the branch breakpoints on the x-axis.
pub fn map_graph() -> Table {
    let mut t = Table::new("golden map T(x) = βx - j on Δ(j)", vec!["x", "y"]);
    let beta = QBeta::beta();
    for j in GoldenDigit::ALL {
        let br = j.branch();
        let y = |x: &QBeta| (&beta * x - j.as_qbeta()).to_f64();
        // right ends are open; the row gives the limit
        t.blocks.push(vec![
            vec![br.left.to_f64(), y(&br.left)],
            vec![br.right.to_f64(), y(&br.right)],
        ]);
    }
    let mut cuts: Vec<Vec<f64>> = GoldenDigit::ALL
        .iter()
        .map(|j| vec![j.branch().left.to_f64(), 0.0])
        .collect();
    cuts.push(vec![2.0, 0.0]);
    t.blocks.push(cuts);
    t
}

/// Step function of a density: one row per breakpoint, carrying the value
/// on the piece to its right; the last row repeats the final value.
pub fn density_steps(h: &PiecewiseDensity) -> Table {
    let mut t = Table::new("density step function", vec!["x", "h"]);
    let bps = h.breakpoints();
    let vals = h.values();
    if vals.is_empty() {
        return t;
    }
    let rows = bps
        .iter()
        .enumerate()
        .map(|(i, x)| vec![x.to_f64(), vals[i.min(vals.len() - 1)].to_f64()])
        .collect();
    t.blocks.push(rows);
    t
}

/// Strips of the tower up to `max_level` in each stack, as closed
/// rectangle outlines `(x, y)` with the strip's tag and level in front.
pub fn tower_outline(max_level: u32) -> Table {
    let mut t = Table::new("tower strips", vec!["j", "n", "x", "y"]);
    for (rect, w, s) in outline(max_level) {
        let (j, n) = (f64::from(rect.tag()), f64::from(rect.level()));
        let (x0, x1) = (w.left.to_f64(), w.right.to_f64());
        let (y0, y1) = (s.left.to_f64(), s.right.to_f64());
        t.blocks.push(
            [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]
                .iter()
                .map(|&(x, y)| vec![j, n, x, y])
                .collect(),
        );
    }
    t
}

/// Points of an orbit, one row each.
pub fn orbit_scatter(title: impl Into<String>, points: &[(f64, f64)]) -> Table {
    let mut t = Table::new(title, vec!["x", "y"]);
    if !points.is_empty() {
        t.blocks.push(points.iter().map(|&(x, y)| vec![x, y]).collect());
    }
    t
}

/// Delay embedding `(x_k, x_{k+1})` of a one-dimensional orbit.
pub fn delay_pairs(orbit: &[f64]) -> Vec<(f64, f64)> {
    orbit.windows(2).map(|w| (w[0], w[1])).collect()
}
