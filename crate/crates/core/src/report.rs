//! Report documents: flat `key=value` text for machines, aligned tables for
//! people, and a JSON manifest describing each run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use crate::sir::SirBatch;

/// Flattens any serializable value to sorted-by-declaration `key=value` lines.
/// Nested structs use dotted keys; missing values print as `undefined`.
pub fn flatten<T: Serialize>(prefix: &str, value: &T) -> Vec<(String, String)> {
    let value = serde_json::to_value(value).expect("report types serialize");
    let mut out = Vec::new();
    flatten_into(prefix, &value, &mut out);
    out
}

fn flatten_into(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten_into(&join(k), v, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), "undefined".into())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(|v| v.to_string()).collect();
            out.push((prefix.to_string(), parts.join(",")));
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn lines(pairs: &[(String, String)]) -> String {
    pairs.iter().fold(String::new(), |mut s, (k, v)| {
        let _ = writeln!(s, "{k}={v}");
        s
    })
}

/// Machine-readable metrics: one `key=value` line per field.
pub fn machine_metrics(report: &MetricsReport) -> String {
    lines(&flatten("", report))
}

/// Summary of one SIR batch as machine lines, keyed by `p`.
#[derive(Debug, Clone, Serialize)]
pub struct SirSummary {
    pub p: f64,
    pub runs: usize,
    pub component_size: usize,
    pub mean_recovered_fraction: f64,
    pub recovered_sem: f64,
    pub mean_steps: f64,
}

impl From<&SirBatch> for SirSummary {
    fn from(b: &SirBatch) -> Self {
        Self {
            p: b.p,
            runs: b.runs.len(),
            component_size: b.component_size,
            mean_recovered_fraction: b.mean_recovered_fraction(),
            recovered_sem: b.recovered_sem(),
            mean_steps: b.mean_steps(),
        }
    }
}

pub fn machine_sir(batches: &[SirBatch]) -> String {
    let mut pairs = Vec::new();
    for (i, b) in batches.iter().enumerate() {
        pairs.extend(flatten(&format!("sir.{i}"), &SirSummary::from(b)));
    }
    lines(&pairs)
}

fn fmt_count(x: usize) -> String {
    let digits = x.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

fn fmt_opt<T>(x: Option<T>, f: impl Fn(T) -> String) -> String {
    x.map_or_else(|| "undefined".to_string(), f)
}

fn fmt_seconds(s: f64) -> String {
    if s < 60.0 {
        format!("{s:.1}s")
    } else if s < 3600.0 {
        format!("{:.1}min", s / 60.0)
    } else {
        format!("{:.1}h", s / 3600.0)
    }
}

fn render_table(header: &[String], rows: &[(String, Vec<String>)]) -> String {
    let label_width = rows.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0);
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for (_, cells) in rows {
        for (w, c) in widths.iter_mut().zip(cells) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut s = String::new();
    let _ = write!(s, "{:label_width$}", "");
    for (h, w) in header.iter().zip(&widths) {
        let _ = write!(s, "  {h:>w$}");
    }
    s.push('\n');
    for (label, cells) in rows {
        let pad = label_width - label.chars().count();
        let _ = write!(s, "{label}{}", " ".repeat(pad));
        for (c, w) in cells.iter().zip(&widths) {
            let _ = write!(s, "  {c:>w$}");
        }
        s.push('\n');
    }
    s
}

/// Aligned table with one column per graph, rows in the usual order
/// (starred rows are measured on the largest weakly connected component).
pub fn human_metrics(columns: &[(&str, &MetricsReport)]) -> String {
    let header: Vec<String> = columns.iter().map(|(n, _)| n.to_string()).collect();
    let row = |label: &str, f: &dyn Fn(&MetricsReport) -> String| {
        (label.to_string(), columns.iter().map(|(_, r)| f(r)).collect())
    };
    let rho = |x: Option<f64>| fmt_opt(x, |v| format!("{v:.3}"));
    let rows = vec![
        row("Nodes", &|r| fmt_count(r.nodes)),
        row("Edges", &|r| fmt_count(r.edges)),
        row("Density", &|r| format!("{:.4}", r.density)),
        row("LSCC", &|r| fmt_count(r.lscc_size)),
        row("LWCC", &|r| fmt_count(r.lwcc_size)),
        row("Density*", &|r| format!("{:.4}", r.density_lwcc)),
        row("ASPL* (directed)", &|r| format!("{:.2}", r.aspl_lwcc)),
        row("Diameter* (directed)", &|r| bound(r.diameter_lwcc, r.paths_exact)),
        row("ASPL* (undirected)", &|r| fmt_opt(r.aspl_lwcc_undirected, |v| format!("{v:.2}"))),
        row("Diameter* (undirected)", &|r| {
            fmt_opt(r.diameter_lwcc_undirected, |v| bound(v, r.paths_exact))
        }),
        row("Average CC*", &|r| format!("{:.3}", r.avg_cc_lwcc)),
        row("rho1", &|r| rho(r.rho1)),
        row("rho2", &|r| rho(r.rho2)),
        row("rho3", &|r| rho(r.rho3)),
        row("Runtime", &|r| fmt_opt(r.generation_seconds, fmt_seconds)),
    ];
    render_table(&header, &rows)
}

fn bound(d: u32, exact: bool) -> String {
    if exact {
        d.to_string()
    } else {
        format!(">={d}")
    }
}

/// Recovered percentage and mean steps per transmission probability, one
/// column per graph. Every graph must have been simulated with the same `p` list.
pub fn human_sir(columns: &[(&str, &[SirBatch])]) -> String {
    let header: Vec<String> = columns.iter().map(|(n, _)| n.to_string()).collect();
    let mut rows = Vec::new();
    let ps: Vec<f64> = columns
        .first()
        .map(|(_, b)| b.iter().map(|b| b.p).collect())
        .unwrap_or_default();
    for (i, p) in ps.iter().enumerate() {
        rows.push((
            format!("p={p} recovered"),
            columns
                .iter()
                .map(|(_, b)| format!("{:.1}%", 100.0 * b[i].mean_recovered_fraction()))
                .collect(),
        ));
        rows.push((
            format!("p={p} steps"),
            columns.iter().map(|(_, b)| format!("{:.2}", b[i].mean_steps())).collect(),
        ));
    }
    render_table(&header, &rows)
}

/// Wall-clock seconds per stage; stages that did not run are absent.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct StageTimings {
    pub sampling: Option<f64>,
    pub reciprocal_wiring: Option<f64>,
    pub directed_wiring: Option<f64>,
    pub metrics: Option<f64>,
    pub sir: Option<f64>,
}

/// Everything needed to reproduce and locate the outputs of one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Option<RunConfig>,
    pub seed: Option<u64>,
    pub seed_from_command_line: bool,
    pub timings: StageTimings,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config: None,
            seed: None,
            seed_from_command_line: false,
            timings: StageTimings::default(),
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// Writes the manifest, listing itself among the outputs.
    pub fn write(&mut self, path: &Path) -> Result<()> {
        if !self.outputs.iter().any(|p| p == path) {
            self.outputs.push(path.to_path_buf());
        }
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Writes any serializable value as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report types serialize");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DirectedGraph;
    use crate::metrics::{full_report, AnalysisOptions};
    use crate::sir::{SirBatch, SirOutcome};

    fn cycle_report() -> MetricsReport {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]);
        full_report(&g, None, None, &AnalysisOptions::default())
    }

    #[test]
    fn machine_keys_are_unique_and_complete() {
        let text = machine_metrics(&cycle_report());
        let keys: Vec<&str> = text.lines().map(|l| l.split_once('=').unwrap().0).collect();
        let mut dedup = keys.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), keys.len());
        for key in [
            "nodes",
            "edges",
            "density",
            "lscc_size",
            "lwcc_size",
            "density_lwcc",
            "aspl_lwcc",
            "diameter_lwcc",
            "aspl_lwcc_undirected",
            "diameter_lwcc_undirected",
            "avg_cc_lwcc",
            "rho1",
            "rho2",
            "rho3",
            "generation_seconds",
            "path_mode",
            "paths_exact",
            "path_sources",
            "wiring",
        ] {
            assert!(keys.contains(&key), "missing {key}");
        }
        assert!(text.contains("aspl_lwcc=1.5\n"));
        assert!(text.contains("diameter_lwcc=2\n"));
        assert!(text.contains("rho1=undefined\n"));
        assert!(text.contains("path_mode=directed\n"));
    }

    #[test]
    fn human_table_rows() {
        let r = cycle_report();
        let t = human_metrics(&[("a", &r), ("b", &r)]);
        let labels: Vec<&str> = t.lines().skip(1).map(|l| l.split("  ").next().unwrap().trim()).collect();
        assert_eq!(labels[0], "Nodes");
        assert_eq!(labels[10], "Average CC*");
        assert!(t.contains("1.50"));
        assert_eq!(fmt_count(27_429_367), "27,429,367");
        assert_eq!(fmt_count(459), "459");
    }

    #[test]
    fn sir_block() {
        let b = SirBatch {
            p: 0.01,
            component_size: 10,
            runs: vec![
                SirOutcome { recovered_fraction: 0.5, steps: 3 },
                SirOutcome { recovered_fraction: 0.7, steps: 5 },
            ],
        };
        let t = human_sir(&[("g", std::slice::from_ref(&b))]);
        assert!(t.contains("60.0%"));
        assert!(t.contains("4.00"));
        let m = machine_sir(std::slice::from_ref(&b));
        assert!(m.contains("sir.0.p=0.01\n"));
        assert!(m.contains("sir.0.mean_steps=4.0\n"));
    }

    #[test]
    fn manifest_lists_itself() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        let mut m = RunManifest::new("generate");
        m.seed = Some(3);
        m.write(&path).unwrap();
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["seed"], 3);
        assert_eq!(v["outputs"][0], path.to_str().unwrap());
    }
}
