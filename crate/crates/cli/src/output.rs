//! Result files: per-run and aggregate CSVs, the experiment manifest, the
//! region CSV, and gnuplot-ready column files.
//!
//! Schemas are stable: fixed column order, one header row, rates in
//! bits/symbol, SINR in dB, powers in the simulation's linear power unit.
//! All values are written with Rust's shortest round-trip float formatting,
//! so a re-run from the manifest reproduces every byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use dtfdd_core::{RegionPoint, RunMetrics};

use crate::error::{CliError, Result};
use crate::spec::ExperimentSpec;

pub const RUNS_CSV: &str = "runs.csv";
pub const AGGREGATE_CSV: &str = "aggregate.csv";
pub const REGION_CSV: &str = "region.csv";
pub const MANIFEST_JSON: &str = "manifest.json";

pub const RUNS_HEADER: &str = "scheme,sinr_db,replicate,seed,stream,slots,outage_rate,outage_slots,tx_fail_slots,silent_slots,throughput_1,throughput_2,active_fraction_1,active_fraction_2,tx_power_1,tx_power_2,realized_power_1,realized_power_2,gamma_i1_e,gamma_i2_e,eps_bar_1,eps_bar_2";
pub const AGGREGATE_HEADER: &str =
    "scheme,sinr_db,outage_rate,ci_halfwidth,slots,replicates,throughput_1,throughput_2,tx_power_1,tx_power_2";
pub const REGION_HEADER: &str =
    "scheme,mu,rate,sinr_db,throughput_1,throughput_2,outage_rate,slots,seed,stream";

/// One finished run row.
#[derive(Debug, Clone)]
pub struct RunRow {
    pub scheme: String,
    pub sinr_db: f64,
    pub replicate: u32,
    pub metrics: RunMetrics,
}

fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "nan".to_string()
    }
}

/// Renders the per-run CSV.
pub fn render_runs_csv(rows: &[RunRow]) -> String {
    let mut out = String::new();
    out.push_str(RUNS_HEADER);
    out.push('\n');
    for row in rows {
        let m = &row.metrics;
        let (g1, g2, e1, e2) = match &m.estimator {
            Some(rep) => (
                fmt_f64(rep.final_state.link_1.gamma_i_e),
                fmt_f64(rep.final_state.link_2.gamma_i_e),
                fmt_f64(rep.final_state.link_1.eps_bar),
                fmt_f64(rep.final_state.link_2.eps_bar),
            ),
            None => (String::new(), String::new(), String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.scheme,
            fmt_f64(row.sinr_db),
            row.replicate,
            m.seed,
            m.stream,
            m.slots_measured,
            fmt_f64(m.outage_rate),
            m.outage_slots,
            m.tx_fail_slots,
            m.silent_slots,
            fmt_f64(m.throughput_1),
            fmt_f64(m.throughput_2),
            fmt_f64(m.active_fraction_1),
            fmt_f64(m.active_fraction_2),
            fmt_f64(m.tx_power_1),
            fmt_f64(m.tx_power_2),
            fmt_f64(m.realized_power_1),
            fmt_f64(m.realized_power_2),
            g1,
            g2,
            e1,
            e2,
        );
    }
    out
}

/// One aggregated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub scheme: String,
    pub sinr_db: f64,
    /// Pooled outage rate over all replicates.
    pub outage_rate: f64,
    /// 95% binomial half-width, 1.96 * sqrt(p (1-p) / N).
    pub ci_halfwidth: f64,
    /// Pooled measured slots.
    pub slots: u64,
    pub replicates: u32,
    pub throughput_1: f64,
    pub throughput_2: f64,
    pub tx_power_1: f64,
    pub tx_power_2: f64,
}

/// Pools replicates per (scheme, grid point), preserving spec order.
pub fn aggregate(rows: &[RunRow]) -> Vec<AggregateRow> {
    let mut out: Vec<AggregateRow> = Vec::new();
    for row in rows {
        let m = &row.metrics;
        match out
            .iter_mut()
            .find(|a| a.scheme == row.scheme && a.sinr_db == row.sinr_db)
        {
            Some(agg) => {
                let n_old = agg.slots as f64;
                let n_new = m.slots_measured as f64;
                let total = n_old + n_new;
                agg.outage_rate = (agg.outage_rate * n_old + m.outage_rate * n_new) / total;
                agg.throughput_1 = (agg.throughput_1 * n_old + m.throughput_1 * n_new) / total;
                agg.throughput_2 = (agg.throughput_2 * n_old + m.throughput_2 * n_new) / total;
                agg.tx_power_1 = (agg.tx_power_1 * n_old + m.tx_power_1 * n_new) / total;
                agg.tx_power_2 = (agg.tx_power_2 * n_old + m.tx_power_2 * n_new) / total;
                agg.slots += m.slots_measured;
                agg.replicates += 1;
            }
            None => out.push(AggregateRow {
                scheme: row.scheme.clone(),
                sinr_db: row.sinr_db,
                outage_rate: m.outage_rate,
                ci_halfwidth: 0.0,
                slots: m.slots_measured,
                replicates: 1,
                throughput_1: m.throughput_1,
                throughput_2: m.throughput_2,
                tx_power_1: m.tx_power_1,
                tx_power_2: m.tx_power_2,
            }),
        }
    }
    for agg in &mut out {
        let p = agg.outage_rate;
        agg.ci_halfwidth = 1.96 * (p * (1.0 - p) / agg.slots as f64).sqrt();
    }
    out
}

pub fn render_aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::new();
    out.push_str(AGGREGATE_HEADER);
    out.push('\n');
    for a in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            a.scheme,
            fmt_f64(a.sinr_db),
            fmt_f64(a.outage_rate),
            fmt_f64(a.ci_halfwidth),
            a.slots,
            a.replicates,
            fmt_f64(a.throughput_1),
            fmt_f64(a.throughput_2),
            fmt_f64(a.tx_power_1),
            fmt_f64(a.tx_power_2),
        );
    }
    out
}

/// Parses an aggregate CSV back into rows (for the fitting subcommand).
pub fn parse_aggregate_csv(text: &str) -> Result<Vec<AggregateRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::runtime("aggregate csv: empty file"))?;
    if header != AGGREGATE_HEADER {
        return Err(CliError::runtime(format!(
            "aggregate csv: unexpected header `{header}`"
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 10 {
            return Err(CliError::runtime(format!(
                "aggregate csv: row {} has {} columns",
                i + 2,
                cols.len()
            )));
        }
        let f = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| CliError::runtime(format!("aggregate csv: bad number `{s}`")))
        };
        rows.push(AggregateRow {
            scheme: cols[0].to_string(),
            sinr_db: f(cols[1])?,
            outage_rate: f(cols[2])?,
            ci_halfwidth: f(cols[3])?,
            slots: cols[4]
                .parse()
                .map_err(|_| CliError::runtime("aggregate csv: bad slot count"))?,
            replicates: cols[5]
                .parse()
                .map_err(|_| CliError::runtime("aggregate csv: bad replicate count"))?,
            throughput_1: f(cols[6])?,
            throughput_2: f(cols[7])?,
            tx_power_1: f(cols[8])?,
            tx_power_2: f(cols[9])?,
        });
    }
    Ok(rows)
}

pub fn render_region_csv(scheme: &str, sinr_db: f64, points: &[RegionPoint]) -> String {
    let mut out = String::new();
    out.push_str(REGION_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            scheme,
            fmt_f64(p.mu),
            fmt_f64(p.rate),
            fmt_f64(sinr_db),
            fmt_f64(p.throughput_1),
            fmt_f64(p.throughput_2),
            fmt_f64(p.metrics.outage_rate),
            p.metrics.slots_measured,
            p.metrics.seed,
            p.metrics.stream,
        );
    }
    out
}

/// The manifest: toolkit version plus the fully resolved spec. Re-running
/// a manifest reproduces every CSV byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub toolkit_version: String,
    pub spec: ExperimentSpec,
}

impl Manifest {
    pub fn new(spec: &ExperimentSpec) -> Self {
        Self {
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            spec: spec.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| CliError::validation(format!("manifest parse: {e}")))
    }
}

/// Writes experiment outputs under `dir`.
pub fn write_experiment_outputs(
    dir: &Path,
    spec: &ExperimentSpec,
    rows: &[RunRow],
) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
    fs::write(dir.join(RUNS_CSV), render_runs_csv(rows))?;
    fs::write(dir.join(AGGREGATE_CSV), render_aggregate_csv(&aggregate(rows)))?;
    fs::write(dir.join(MANIFEST_JSON), Manifest::new(spec).to_json())?;
    Ok(())
}

/// Writes region outputs under `dir`.
pub fn write_region_outputs(
    dir: &Path,
    spec: &ExperimentSpec,
    scheme: &str,
    sinr_db: f64,
    points: &[RegionPoint],
) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
    fs::write(dir.join(REGION_CSV), render_region_csv(scheme, sinr_db, points))?;
    fs::write(dir.join(MANIFEST_JSON), Manifest::new(spec).to_json())?;
    Ok(())
}

/// Pivots an aggregate CSV into one gnuplot-ready `.dat` file per scheme:
/// space-separated columns `sinr_db outage ci throughput_sum`.
pub fn export_gnuplot(rows: &[AggregateRow], dir: &Path) -> Result<Vec<String>> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
    let mut schemes: Vec<String> = Vec::new();
    for r in rows {
        if !schemes.contains(&r.scheme) {
            schemes.push(r.scheme.clone());
        }
    }
    let mut written = Vec::new();
    for scheme in &schemes {
        let mut text = String::from("# sinr_db outage_rate ci_halfwidth throughput_sum\n");
        for r in rows.iter().filter(|r| &r.scheme == scheme) {
            let _ = writeln!(
                text,
                "{} {} {} {}",
                fmt_f64(r.sinr_db),
                fmt_f64(r.outage_rate),
                fmt_f64(r.ci_halfwidth),
                fmt_f64(r.throughput_1 + r.throughput_2),
            );
        }
        let name = format!("{scheme}.dat");
        fs::write(dir.join(&name), text)?;
        written.push(name);
    }
    Ok(written)
}
