//! Report rows, aggregates and rendering.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;
use submax_core::TraceNode;

use crate::config::{Algorithm, OutputFormat};

pub const CSV_HEADER: &str = "instance,m,algorithm,epsilon,depth,value,opt,ratio,queries,moves,verified";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub instance: String,
    pub m: usize,
    pub algorithm: Algorithm,
    pub epsilon: Option<f64>,
    pub depth: Option<usize>,
    pub value: Option<f64>,
    pub opt: Option<f64>,
    pub ratio: Option<f64>,
    /// Oracle queries; the per-trial mean for the randomized baseline.
    pub queries: Option<u64>,
    pub moves: Option<usize>,
    /// `None` when verification was off or infeasible for this cell.
    pub verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceNode>,
    #[serde(skip)]
    pub wall_ms: f64,
}

impl Row {
    pub fn new(instance: &str, m: usize, algorithm: Algorithm, epsilon: Option<f64>) -> Self {
        Row {
            instance: instance.to_owned(),
            m,
            algorithm,
            epsilon,
            depth: algorithm.depth(),
            value: None,
            opt: None,
            ratio: None,
            queries: None,
            moves: None,
            verified: None,
            trials: None,
            std: None,
            error: None,
            failures: Vec::new(),
            trace: None,
            wall_ms: 0.0,
        }
    }

    /// True when the cell errored or failed verification.
    pub fn is_failure(&self) -> bool {
        self.error.is_some() || self.verified == Some(false)
    }

    fn sort_key_cmp(&self, other: &Row) -> Ordering {
        self.instance
            .cmp(&other.instance)
            .then_with(|| self.algorithm.to_string().cmp(&other.algorithm.to_string()))
            .then_with(|| match (self.epsilon, other.epsilon) {
                (None, None) => Ordering::Equal,
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some(a), Some(b)) => a.total_cmp(&b),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub algorithm: Algorithm,
    pub epsilon: Option<f64>,
    pub cells: usize,
    pub min_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
    /// Slope of `ln(queries)` against `ln(m)`; needs two distinct sizes.
    pub query_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingEntry {
    pub instance: String,
    pub algorithm: Algorithm,
    pub epsilon: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub rows: Vec<Row>,
    pub aggregates: Vec<Aggregate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Vec<TimingEntry>>,
}

impl RunReport {
    /// Sorts the rows and recomputes aggregates (and timing, when `timing`).
    pub fn assemble(mut rows: Vec<Row>, timing: bool) -> Self {
        rows.sort_by(Row::sort_key_cmp);
        let aggregates = aggregate(&rows);
        let timing = timing.then(|| {
            rows.iter()
                .map(|r| TimingEntry {
                    instance: r.instance.clone(),
                    algorithm: r.algorithm,
                    epsilon: r.epsilon,
                    wall_ms: r.wall_ms,
                })
                .collect()
        });
        RunReport {
            rows,
            aggregates,
            timing,
        }
    }

    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(Row::is_failure)
    }

    /// 0 when every cell ran and verified, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.has_failures() {
            1
        } else {
            0
        }
    }
}

fn aggregate(rows: &[Row]) -> Vec<Aggregate> {
    let mut keys: Vec<(Algorithm, Option<f64>)> = Vec::new();
    for r in rows {
        if !keys
            .iter()
            .any(|&(a, e)| a == r.algorithm && e.map(f64::to_bits) == r.epsilon.map(f64::to_bits))
        {
            keys.push((r.algorithm, r.epsilon));
        }
    }
    keys.sort_by(|a, b| {
        a.0.to_string()
            .cmp(&b.0.to_string())
            .then_with(|| a.1.unwrap_or(-1.0).total_cmp(&b.1.unwrap_or(-1.0)))
    });
    keys.into_iter()
        .map(|(algorithm, epsilon)| {
            let cell: Vec<&Row> = rows
                .iter()
                .filter(|r| r.algorithm == algorithm && r.epsilon.map(f64::to_bits) == epsilon.map(f64::to_bits))
                .collect();
            let ratios: Vec<f64> = cell.iter().filter_map(|r| r.ratio).collect();
            let (min_ratio, mean_ratio) = if ratios.is_empty() {
                (None, None)
            } else {
                let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                (Some(min), Some(ratios.iter().sum::<f64>() / ratios.len() as f64))
            };
            let points: Vec<(f64, f64)> = cell
                .iter()
                .filter_map(|r| match r.queries {
                    Some(q) if q > 0 && r.m > 0 => Some(((r.m as f64).ln(), (q as f64).ln())),
                    _ => None,
                })
                .collect();
            let distinct = points.iter().any(|p| p.0 != points[0].0);
            let query_exponent = distinct.then(|| crate::scaling::least_squares(&points).0);
            Aggregate {
                algorithm,
                epsilon,
                cells: cell.len(),
                min_ratio,
                mean_ratio,
                query_exponent,
            }
        })
        .collect()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_display<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn cells(r: &Row) -> [String; 11] {
    let verified = match (&r.error, r.verified) {
        (Some(_), _) => "error".to_owned(),
        (None, v) => opt_display(v),
    };
    [
        r.instance.clone(),
        r.m.to_string(),
        r.algorithm.to_string(),
        opt_f64(r.epsilon),
        opt_display(r.depth),
        opt_f64(r.value),
        opt_f64(r.opt),
        opt_f64(r.ratio),
        opt_display(r.queries),
        opt_display(r.moves),
        verified,
    ]
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn emit(report: &RunReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => emit_csv(report),
        OutputFormat::Markdown => emit_markdown(report),
        OutputFormat::Json => emit_json(report, true),
    }
}

pub fn emit_csv(report: &RunReport) -> String {
    let timing = report.timing.is_some();
    let mut out = String::from(CSV_HEADER);
    if timing {
        out.push_str(",wall_ms");
    }
    out.push('\n');
    for r in &report.rows {
        let line: Vec<String> = cells(r).iter().map(|c| csv_field(c)).collect();
        out.push_str(&line.join(","));
        if timing {
            let _ = write!(out, ",{:.3}", r.wall_ms);
        }
        out.push('\n');
    }
    out
}

pub fn emit_markdown(report: &RunReport) -> String {
    let timing = report.timing.is_some();
    let mut header: Vec<&str> = CSV_HEADER.split(',').collect();
    if timing {
        header.push("wall_ms");
    }
    let mut out = format!("| {} |\n", header.join(" | "));
    out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for r in &report.rows {
        let mut c = cells(r).to_vec();
        if timing {
            c.push(format!("{:.3}", r.wall_ms));
        }
        let _ = writeln!(out, "| {} |", c.join(" | ").replace('\n', " "));
    }
    if !report.aggregates.is_empty() {
        out.push_str("\n| algorithm | epsilon | cells | min_ratio | mean_ratio | query_exponent |\n");
        out.push_str("|---|---|---|---|---|---|\n");
        for a in &report.aggregates {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                a.algorithm,
                opt_f64(a.epsilon),
                a.cells,
                opt_f64(a.min_ratio),
                opt_f64(a.mean_ratio),
                opt_f64(a.query_exponent)
            );
        }
    }
    let errors: Vec<&Row> = report
        .rows
        .iter()
        .filter(|r| r.error.is_some() || !r.failures.is_empty())
        .collect();
    if !errors.is_empty() {
        out.push_str("\nProblems:\n\n");
        for r in errors {
            let what = r
                .error
                .iter()
                .chain(&r.failures)
                .cloned()
                .collect::<Vec<_>>()
                .join("; ");
            let _ = writeln!(out, "- {} / {}: {}", r.instance, r.algorithm, what);
        }
    }
    out
}

/// Pretty JSON; traces are included only if the rows carry them.
pub fn emit_json(report: &RunReport, pretty: bool) -> String {
    let mut s = if pretty {
        serde_json::to_string_pretty(report)
    } else {
        serde_json::to_string(report)
    }
    .expect("report serializes");
    s.push('\n');
    s
}
