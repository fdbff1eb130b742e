//! Report rendering: `report.csv` and the text summary.
//!
//! CSV columns are `metric,value,mc_se,n_reps,seed`, one row per metric.
//! Numeric fields use Rust's shortest-round-trip float rendering, so a
//! re-parse recovers the exact values and byte-identical reports certify
//! byte-identical runs.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::dump_config;
use crate::error::Result;
use crate::sim::{Metric, SimReport};

/// Render metric rows as CSV.
pub fn render_csv(metrics: &[Metric], n_reps: u64, seed: u64) -> String {
    let mut out = String::from("metric,value,mc_se,n_reps,seed\n");
    for m in metrics {
        let _ = writeln!(out, "{},{},{},{n_reps},{seed}", m.name, m.value, m.mc_se);
    }
    out
}

/// Render a report's CSV.
pub fn report_csv(report: &SimReport) -> String {
    render_csv(
        &report.metrics,
        report.scenario.n_reps,
        report.scenario.seed,
    )
}

/// Write metric rows to a CSV file.
pub fn write_csv(path: &Path, metrics: &[Metric], n_reps: u64, seed: u64) -> Result<()> {
    std::fs::write(path, render_csv(metrics, n_reps, seed))?;
    Ok(())
}

/// Render a metric table for human eyes.
pub fn render_table(metrics: &[Metric]) -> String {
    let width = metrics.iter().map(|m| m.name.len()).max().unwrap_or(6).max(6);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>14}  {:>12}", "metric", "value", "mc_se");
    for m in metrics {
        let _ = writeln!(
            out,
            "{:<width$}  {:>14.8} {:>13.8}",
            m.name, m.value, m.mc_se
        );
    }
    out
}

/// Full text summary of a scenario run.
pub fn render_summary(report: &SimReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario {} | seed {} | n_reps {}",
        report.scenario.kind.name(),
        report.scenario.seed,
        report.scenario.n_reps
    );
    for line in dump_config(&report.scenario).lines().skip(1) {
        let _ = writeln!(out, "  {line}");
    }
    let _ = writeln!(out);
    out.push_str(&render_table(&report.metrics));
    let _ = writeln!(out);
    if report.audit_passed() {
        let _ = writeln!(out, "audit: all guarantees within 3*mc_se tolerance");
    } else {
        let _ = writeln!(out, "audit: FAILED");
        for f in &report.audit_failures {
            let _ = writeln!(out, "  - {f}");
        }
    }
    out
}
