//! `curves.csv` / `curves.json` and `summary.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::checks::Check;
use crate::config::FileConfig;
use crate::error::{CliError, CliResult};
use crate::runner::{PointSummary, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub const CSV_HEADER: [&str; 8] = [
    "sweep_value",
    "label",
    "p_sim",
    "ci_half",
    "p_exact",
    "p_highsnr",
    "trials",
    "seed",
];

/// Six significant digits.
pub fn probability(p: f64) -> String {
    format!("{p:.5e}")
}

fn optional(p: Option<f64>) -> String {
    p.map_or_else(|| "null".to_string(), probability)
}

fn rounded(p: f64) -> f64 {
    probability(p).parse().expect("formatted float parses")
}

pub fn curves_csv(report: &RunReport) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in &report.rows {
        w.write_record([
            r.sweep_value.to_string(),
            r.label.to_string(),
            probability(r.p_sim),
            probability(r.ci_half),
            optional(r.p_exact),
            optional(r.p_highsnr),
            r.trials.to_string(),
            r.seed.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Validation(format!("csv: {e}")))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Validation(format!("csv: {e}"))
}

#[derive(Serialize)]
struct JsonRow {
    sweep_value: f64,
    label: &'static str,
    p_sim: f64,
    ci_half: f64,
    p_exact: Option<f64>,
    p_highsnr: Option<f64>,
    trials: u64,
    seed: u64,
}

pub fn curves_json(report: &RunReport) -> CliResult<Vec<u8>> {
    let rows: Vec<JsonRow> = report
        .rows
        .iter()
        .map(|r| JsonRow {
            sweep_value: r.sweep_value,
            label: r.label,
            p_sim: rounded(r.p_sim),
            ci_half: rounded(r.ci_half),
            p_exact: r.p_exact.map(rounded),
            p_highsnr: r.p_highsnr.map(rounded),
            trials: r.trials,
            seed: r.seed,
        })
        .collect();
    let mut bytes = serde_json::to_vec_pretty(&rows).map_err(json_error)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn json_error(e: serde_json::Error) -> CliError {
    CliError::Validation(format!("json: {e}"))
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a FileConfig,
    trials: u64,
    seed: u64,
    threads: usize,
    resamples: &'a [PointSummary],
    total_resamples: u64,
    wall_time_s: f64,
    invariants: &'a [Check],
    invariants_passed: bool,
}

pub fn summary_json(report: &RunReport, config: &FileConfig, threads: usize) -> CliResult<Vec<u8>> {
    let summary = Summary {
        config,
        trials: report.trials,
        seed: report.seed,
        threads,
        resamples: &report.points,
        total_resamples: report.points.iter().map(|p| p.resamples).sum(),
        wall_time_s: report.wall_time_s,
        invariants: &report.checks,
        invariants_passed: report.all_passed(),
    };
    let mut bytes = serde_json::to_vec_pretty(&summary).map_err(json_error)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes the curve file and the summary into `dir`, returning the paths.
pub fn write_outputs(
    dir: &Path,
    report: &RunReport,
    config: &FileConfig,
    format: Format,
    threads: usize,
) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let (name, curves) = match format {
        Format::Csv => ("curves.csv", curves_csv(report)?),
        Format::Json => ("curves.json", curves_json(report)?),
    };
    let curves_path = dir.join(name);
    fs::write(&curves_path, curves)?;
    let summary_path = dir.join("summary.json");
    fs::write(&summary_path, summary_json(report, config, threads)?)?;
    Ok(vec![curves_path, summary_path])
}
