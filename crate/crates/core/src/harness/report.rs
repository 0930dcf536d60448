//! Coverage tables and their CSV/JSON serializations.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{ExperimentConfig, Result, Scenario};
use crate::bootstrap::Method;

pub const CSV_HEADER: [&str; 10] = [
    "scenario",
    "method",
    "B",
    "n",
    "p",
    "coordinate",
    "coverage",
    "binomial_se",
    "mean_width",
    "excluded_reps",
];

const BOXPLOT_HEADER: [&str; 9] = [
    "scenario",
    "method",
    "B",
    "statistic",
    "min",
    "q1",
    "median",
    "q3",
    "max",
];

/// 17 significant digits, enough to round-trip any f64.
pub(crate) fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn binomial_se(coverage: f64, reps: u64) -> f64 {
    (coverage * (1.0 - coverage) / reps as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateStats {
    pub coordinate: usize,
    pub cover_count: u64,
    pub repetitions: u64,
    pub coverage: f64,
    pub mean_width: f64,
    pub binomial_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub method: Method,
    #[serde(rename = "B")]
    pub b: usize,
    pub coordinates: Vec<CoordinateStats>,
    pub mean_coverage: f64,
    pub mean_width: f64,
    pub mean_binomial_se: f64,
}

/// A (method, B) pair that needs more replicates than B; shown as "N.A.".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotApplicable {
    pub method: Method,
    #[serde(rename = "B")]
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepFailure {
    pub repetition: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub scenario: Scenario,
    pub n: usize,
    pub p: usize,
    pub alpha: f64,
    pub requested_repetitions: usize,
    pub excluded_reps: usize,
    pub failures: Vec<RepFailure>,
    pub not_applicable: Vec<NotApplicable>,
    pub cells: Vec<CellReport>,
}

pub(crate) struct Accumulator {
    pub used: u64,
    covers: Vec<Vec<u64>>,
    widths: Vec<Vec<f64>>,
}

impl Accumulator {
    pub fn new(combos: usize, dim: usize) -> Self {
        Self {
            used: 0,
            covers: vec![vec![0; dim]; combos],
            widths: vec![vec![0.0; dim]; combos],
        }
    }

    pub fn add(&mut self, outcome: &[Vec<(bool, f64)>]) {
        self.used += 1;
        for (c, per_coord) in outcome.iter().enumerate() {
            for (j, &(hit, w)) in per_coord.iter().enumerate() {
                self.covers[c][j] += hit as u64;
                self.widths[c][j] += w;
            }
        }
    }
}

impl CoverageReport {
    pub(crate) fn from_accumulator(
        config: &ExperimentConfig,
        combos: &[(Method, usize)],
        acc: Accumulator,
        not_applicable: Vec<NotApplicable>,
        failures: Vec<RepFailure>,
    ) -> Self {
        let reps = acc.used;
        let coord_labels: Vec<usize> = match &config.target_coords {
            Some(c)
                if !matches!(
                    config.scenario,
                    Scenario::Ellipsoidal | Scenario::Sinusoidal | Scenario::Netsim
                ) =>
            {
                c.clone()
            }
            _ => (0..acc.covers.first().map_or(0, Vec::len)).collect(),
        };
        let cells = combos
            .iter()
            .enumerate()
            .map(|(c, &(method, b))| {
                let coordinates: Vec<CoordinateStats> = coord_labels
                    .iter()
                    .enumerate()
                    .map(|(j, &label)| {
                        let coverage = acc.covers[c][j] as f64 / reps as f64;
                        CoordinateStats {
                            coordinate: label,
                            cover_count: acc.covers[c][j],
                            repetitions: reps,
                            coverage,
                            mean_width: acc.widths[c][j] / reps as f64,
                            binomial_se: binomial_se(coverage, reps),
                        }
                    })
                    .collect();
                let d = coordinates.len() as f64;
                let mean_coverage = coordinates.iter().map(|s| s.coverage).sum::<f64>() / d;
                let mean_width = coordinates.iter().map(|s| s.mean_width).sum::<f64>() / d;
                CellReport {
                    method,
                    b,
                    coordinates,
                    mean_coverage,
                    mean_width,
                    mean_binomial_se: binomial_se(mean_coverage, reps),
                }
            })
            .collect();
        Self {
            scenario: config.scenario,
            n: config.n,
            p: config.p,
            alpha: config.alpha,
            requested_repetitions: config.repetitions,
            excluded_reps: failures.len(),
            failures,
            not_applicable,
            cells,
        }
    }

    pub fn cell(&self, method: Method, b: usize) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.method == method && c.b == b)
    }

    pub fn excluded_fraction(&self) -> f64 {
        self.excluded_reps as f64 / self.requested_repetitions as f64
    }

    fn row(
        &self,
        cell: &CellReport,
        coordinate: String,
        coverage: f64,
        se: f64,
        width: f64,
    ) -> [String; 10] {
        [
            self.scenario.to_string(),
            cell.method.to_string(),
            cell.b.to_string(),
            self.n.to_string(),
            self.p.to_string(),
            coordinate,
            num(coverage),
            num(se),
            num(width),
            self.excluded_reps.to_string(),
        ]
    }

    /// Per-coordinate rows, then one `mean` row per (method, B).
    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for cell in &self.cells {
            for s in &cell.coordinates {
                w.write_record(self.row(
                    cell,
                    s.coordinate.to_string(),
                    s.coverage,
                    s.binomial_se,
                    s.mean_width,
                ))?;
            }
            w.write_record(self.row(
                cell,
                "mean".into(),
                cell.mean_coverage,
                cell.mean_binomial_se,
                cell.mean_width,
            ))?;
        }
        finish(w)
    }

    /// Quartiles of per-coordinate coverage and width for each (method, B).
    pub fn boxplot_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(BOXPLOT_HEADER)?;
        for cell in &self.cells {
            for (stat, values) in [
                (
                    "coverage",
                    cell.coordinates
                        .iter()
                        .map(|s| s.coverage)
                        .collect::<Vec<_>>(),
                ),
                (
                    "width",
                    cell.coordinates.iter().map(|s| s.mean_width).collect(),
                ),
            ] {
                let q = quartiles(&values);
                let mut rec = vec![
                    self.scenario.to_string(),
                    cell.method.to_string(),
                    cell.b.to_string(),
                    stat.to_string(),
                ];
                rec.extend(q.iter().map(|v| num(*v)));
                w.write_record(rec)?;
            }
        }
        finish(w)
    }

    /// Coordinate-averaged results without the per-coordinate detail.
    pub fn summary_json(&self) -> serde_json::Value {
        let cells: Vec<_> = self
            .cells
            .iter()
            .map(|c| {
                json!({
                    "method": c.method,
                    "B": c.b,
                    "coverage": c.mean_coverage,
                    "binomial_se": c.mean_binomial_se,
                    "mean_width": c.mean_width,
                    "coordinates": c.coordinates.len(),
                })
            })
            .collect();
        json!({
            "scenario": self.scenario,
            "n": self.n,
            "p": self.p,
            "alpha": self.alpha,
            "requested_repetitions": self.requested_repetitions,
            "excluded_reps": self.excluded_reps,
            "failures": self.failures.iter().take(20).collect::<Vec<_>>(),
            "not_applicable": self.not_applicable,
            "cells": cells,
        })
    }

    /// Fixed-width table of coordinate-averaged coverage and width.
    pub fn summary_table(&self) -> String {
        let mut out = format!(
            "{} n={} p={} reps={} excluded={}\n{:<11} {:>4} {:>9} {:>9} {:>12}\n",
            self.scenario,
            self.n,
            self.p,
            self.requested_repetitions,
            self.excluded_reps,
            "method",
            "B",
            "coverage",
            "se",
            "mean_width"
        );
        for c in &self.cells {
            out.push_str(&format!(
                "{:<11} {:>4} {:>9.4} {:>9.4} {:>12.5e}\n",
                c.method.as_str(),
                c.b,
                c.mean_coverage,
                c.mean_binomial_se,
                c.mean_width
            ));
        }
        for na in &self.not_applicable {
            out.push_str(&format!(
                "{:<11} {:>4} {:>9} {:>9} {:>12}\n",
                na.method.as_str(),
                na.b,
                "N.A.",
                "N.A.",
                "N.A."
            ));
        }
        out
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Min, lower quartile, median, upper quartile, max with linear
/// interpolation between order statistics.
pub fn quartiles(values: &[f64]) -> [f64; 5] {
    if values.is_empty() {
        return [f64::NAN; 5];
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let at = |q: f64| {
        let h = q * (v.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    };
    [v[0], at(0.25), at(0.5), at(0.75), v[v.len() - 1]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    #[serde(rename = "B")]
    pub b: usize,
    pub n: usize,
    pub report: CoverageReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scenario: Scenario,
    pub methods: Vec<Method>,
    pub cells: Vec<SweepCell>,
    pub failures: Vec<String>,
}

impl SweepReport {
    /// One row per (cell, method), coordinate-averaged; methods that need
    /// more replicates than the cell's B get "N.A." fields.
    pub fn rows(&self) -> Vec<[String; 10]> {
        let mut rows = Vec::new();
        for cell in &self.cells {
            let r = &cell.report;
            for &m in &self.methods {
                let fields = match r.cell(m, cell.b) {
                    Some(c) => [
                        num(c.mean_coverage),
                        num(c.mean_binomial_se),
                        num(c.mean_width),
                    ],
                    None => ["N.A.".into(), "N.A.".into(), "N.A.".into()],
                };
                let [coverage, se, width] = fields;
                rows.push([
                    r.scenario.to_string(),
                    m.to_string(),
                    cell.b.to_string(),
                    cell.n.to_string(),
                    r.p.to_string(),
                    "mean".into(),
                    coverage,
                    se,
                    width,
                    r.excluded_reps.to_string(),
                ]);
            }
        }
        rows
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for row in self.rows() {
            w.write_record(row)?;
        }
        finish(w)
    }

    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "scenario": self.scenario,
            "cells": self.cells.iter().map(|c| json!({"B": c.b, "n": c.n, "summary": c.report.summary_json()})).collect::<Vec<_>>(),
            "failures": self.failures,
        })
    }

    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            out.push_str(&c.report.summary_table());
        }
        for f in &self.failures {
            out.push_str(&format!("failed cell {f}\n"));
        }
        out
    }

    pub fn requested_repetitions(&self) -> usize {
        self.cells
            .iter()
            .map(|c| c.report.requested_repetitions)
            .sum()
    }

    pub fn excluded_reps(&self) -> usize {
        self.cells.iter().map(|c| c.report.excluded_reps).sum()
    }
}
