//! Sweeps a scenario over its grid and collects one row per (value, output).

use std::time::Instant;

use serde::Serialize;

use sa_noma::sim::{estimate_events, AllocationMode, Event};
use sa_noma::SystemConfig;

use crate::checks::Check;
use crate::config::LoadedConfig;
use crate::error::{CliError, CliResult};
use crate::labels::UplinkCase;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub sweep_value: f64,
    pub label: &'static str,
    pub p_sim: f64,
    pub ci_half: f64,
    pub p_exact: Option<f64>,
    pub p_highsnr: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    #[serde(skip)]
    pub outages: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointSummary {
    pub sweep_value: f64,
    pub resamples: u64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub rows: Vec<Row>,
    pub points: Vec<PointSummary>,
    pub trials: u64,
    pub seed: u64,
    pub wall_time_s: f64,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn with_case(system: &SystemConfig, case: Option<UplinkCase>) -> SystemConfig {
    let allocation = match case {
        None => system.allocation,
        Some(UplinkCase::One) => AllocationMode::CognitiveUplinkCaseI,
        Some(UplinkCase::Two) => AllocationMode::CognitiveUplinkCaseII,
    };
    SystemConfig {
        allocation,
        ..*system
    }
}

/// Simulates and evaluates every requested output at one grid value.
pub fn evaluate_point(
    config: &LoadedConfig,
    value: f64,
    trials: Option<u64>,
    seed: Option<u64>,
) -> CliResult<(Vec<Row>, u64)> {
    let system = config.system_at(value, trials, seed)?;
    let mut groups: Vec<(Option<UplinkCase>, Vec<Event>)> = Vec::new();
    for output in &config.outputs {
        let (event, case) = output.event();
        match groups.iter_mut().find(|(c, _)| *c == case) {
            Some((_, events)) if !events.contains(&event) => events.push(event),
            Some(_) => {}
            None => groups.push((case, vec![event])),
        }
    }
    let mut resamples = 0;
    let mut estimates = Vec::new();
    for (case, events) in &groups {
        let batch = estimate_events(&with_case(&system, *case), events)?;
        resamples += batch.resamples;
        for (event, est) in events.iter().zip(batch.estimates) {
            estimates.push((*case, *event, est));
        }
    }
    let rows = config
        .outputs
        .iter()
        .map(|output| {
            let (event, case) = output.event();
            let est = &estimates
                .iter()
                .find(|(c, e, _)| *c == case && *e == event)
                .expect("every output was simulated")
                .2;
            let (p_exact, p_highsnr) = output.analytic(&with_case(&system, case))?;
            for (what, v) in [("exact", p_exact), ("high-SNR", p_highsnr)] {
                if let Some(v) = v {
                    if !v.is_finite() {
                        return Err(CliError::Numerical(format!(
                            "{} {what} value is {v} at {value}",
                            output.label()
                        )));
                    }
                }
            }
            Ok(Row {
                sweep_value: value,
                label: output.label(),
                p_sim: est.p_hat,
                ci_half: est.half_width,
                p_exact,
                p_highsnr,
                trials: system.trials,
                seed: system.seed,
                outages: est.outages,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok((rows, resamples))
}

pub fn run(config: &LoadedConfig, trials: Option<u64>, seed: Option<u64>) -> CliResult<RunReport> {
    if trials == Some(0) {
        return Err(CliError::Validation("--trials must be at least 1".into()));
    }
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &value in &config.file.sweep.values {
        let (mut point_rows, resamples) = evaluate_point(config, value, trials, seed)?;
        rows.append(&mut point_rows);
        points.push(PointSummary {
            sweep_value: value,
            resamples,
        });
    }
    let checks = crate::checks::run_checks(config, &rows);
    Ok(RunReport {
        rows,
        points,
        trials: trials.unwrap_or(config.file.run.trials),
        seed: seed.unwrap_or(config.file.run.seed),
        wall_time_s: start.elapsed().as_secs_f64(),
        checks,
    })
}
