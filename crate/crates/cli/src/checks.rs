//! Invariant checks: cheap ones on every run, a fuller battery for `verify`.

use std::f64::consts::PI;

use serde::Serialize;

use sa_noma::analytic::{lemma1_exact, upsilon1, upsilon2};
use sa_noma::linalg::{norm_sqr, CMatrix};
use sa_noma::sim::{
    draw_trial, modified_outage_flags, simulate_downlink_trial, simulate_uplink_trial,
    AllocationMode,
};
use sa_noma::special::integrate_1d;
use sa_noma::{QuadratureSpec, SystemConfig, ThresholdSet};

use crate::config::LoadedConfig;
use crate::error::CliResult;
use crate::runner::Row;

const VERIFY_TRIALS: u64 = 2000;
const OUTAGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

fn outages(rows: &[Row], value: f64, label: &str) -> Option<u64> {
    rows.iter()
        .find(|r| r.sweep_value == value && r.label == label)
        .map(|r| r.outages)
}

/// Checks that only need the aggregated rows of a run.
pub fn run_checks(config: &LoadedConfig, rows: &[Row]) -> Vec<Check> {
    let mut checks = Vec::new();
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| {
            let unit = |p: f64| (0.0..=1.0).contains(&p);
            !unit(r.p_sim)
                || !unit(r.ci_half)
                || r.p_exact.is_some_and(|p| !unit(p))
                || r.p_highsnr.is_some_and(|p| !(p >= 0.0))
        })
        .map(|r| format!("{}@{}", r.label, r.sweep_value))
        .collect();
    checks.push(Check::new(
        "probabilities_in_range",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} rows", rows.len())
        } else {
            format!("out of range: {}", bad.join(", "))
        },
    ));
    let s = &config.file.scenario;
    let mut pairs = Vec::new();
    for &value in &config.file.sweep.values {
        let Ok(system) = config.system_at(value, None, None) else {
            continue;
        };
        pairs.clear();
        if system.rho_i == 0.0 || system.density == 0.0 {
            pairs.push(("uplink_case2_far", "uplink_case2_near", true));
        }
        if s.delta >= system.user_antennas as f64 {
            pairs.push(("downlink_far", "downlink_far_modified", false));
            pairs.push(("downlink_near", "downlink_near_modified", false));
        }
        if s.delta >= system.bs_antennas as f64 {
            pairs.push(("uplink_sum", "uplink_sum_modified", false));
        }
        for &(a, b, equal) in &pairs {
            if let (Some(x), Some(y)) = (outages(rows, value, a), outages(rows, value, b)) {
                let (name, passed) = if equal {
                    ("case2_users_share_outcomes", x == y)
                } else {
                    ("modified_event_dominates", x <= y)
                };
                checks.push(Check::new(
                    name,
                    passed,
                    format!("{a} = {x}, {b} = {y} at {value}"),
                ));
            }
        }
    }
    checks
}

#[derive(Default)]
struct Worst {
    value: f64,
    failures: u64,
}

impl Worst {
    fn record(&mut self, v: f64) {
        if !(v <= self.value) {
            self.value = if v.is_nan() { f64::INFINITY } else { v };
        }
    }

    fn fail_if(&mut self, failed: bool) {
        self.failures += u64::from(failed);
    }
}

fn fails(sinr: f64, eps: f64) -> bool {
    sinr < eps * (1.0 - OUTAGE_SLACK)
}

fn worst_check(name: &str, worst: &Worst, tol: f64) -> Check {
    Check::new(
        name,
        worst.value <= tol,
        format!("max {:.3e} (tolerance {tol:.0e})", worst.value),
    )
}

fn count_check(name: &str, worst: &Worst, trials: u64) -> Check {
    Check::new(
        name,
        worst.failures == 0,
        format!("{} violations in {trials} trials", worst.failures),
    )
}

/// Per-trial linear-algebra and power-control invariants at one grid point.
fn verify_point(system: &SystemConfig, label: &str) -> CliResult<Vec<Check>> {
    let variant = |allocation| SystemConfig {
        allocation,
        ..*system
    };
    let case1 = variant(AllocationMode::CognitiveUplinkCaseI);
    let case2 = variant(AllocationMode::CognitiveUplinkCaseII);
    let m = system.bs_antennas;
    let n = system.user_antennas as f64;
    let mut residual = Worst::default();
    let mut combiner = Worst::default();
    let mut zero_forcing = Worst::default();
    let mut trace = Worst::default();
    let mut down_dom = Worst::default();
    let mut up_dom = Worst::default();
    let mut shared = Worst::default();
    let mut budget = Worst::default();
    let mut order = Worst::default();
    for t in 0..system.trials {
        let draw = draw_trial(system, t)?;
        for (link, channel) in draw.links.iter().zip(&draw.channels) {
            let scale = 1.0 + channel.near.frobenius_norm() + channel.far.frobenius_norm();
            residual.record(link.alignment_residual(channel)? / scale);
            combiner.record((norm_sqr(&link.near_vector) + norm_sqr(&link.far_vector) - 2.0).abs());
        }
        let product = draw
            .precoder
            .effective_channel
            .matmul(&draw.precoder.precoder)?;
        let expected = CMatrix::from_fn(m, m, |i, j| {
            if i == j {
                draw.precoder.scaling[i].into()
            } else {
                0.0.into()
            }
        });
        let peak = draw.precoder.scaling.iter().fold(1.0_f64, |a, &b| a.max(b));
        zero_forcing.record(product.sub(&expected).frobenius_norm() / peak);
        let power: f64 = (0..m).map(|i| norm_sqr(&draw.precoder.column(i))).sum();
        trace.record((power - m as f64).abs() / m as f64);
        if system.allocation.is_downlink_capable() {
            for r in simulate_downlink_trial(system, &draw)? {
                let bound = modified_outage_flags(&r, system.rho, n, &system.rates);
                down_dom.fail_if((r.outage_far && !bound.far) || (r.outage_near && !bound.near));
            }
        }
        if system.allocation.is_uplink_capable() {
            for r in simulate_uplink_trial(system, &draw)? {
                let signal =
                    system.rho * (r.h_near * r.allocation.near + r.h_far * r.allocation.far);
                let bound = fails(signal / (m as f64 * r.i_bs + 1.0), system.rates.eps_sum());
                up_dom.fail_if(r.outage_sum && !bound);
            }
        }
        for config in [&case1, &case2] {
            for r in simulate_uplink_trial(config, &draw)? {
                budget.fail_if(!(r.tx_power <= 2.0 * system.rho * (1.0 + 1e-12)));
                let (a, b) = (r.sum_rate_near_first(), r.sum_rate_far_first());
                order.record((a - b).abs() / a.abs().max(1.0));
                if config.allocation == AllocationMode::CognitiveUplinkCaseII {
                    shared.fail_if(r.outage_far != r.outage_near);
                }
            }
        }
    }
    let trials = system.trials;
    let mut checks = vec![
        worst_check("alignment_residual", &residual, 1e-9),
        worst_check("combiner_norm", &combiner, 1e-9),
        worst_check("zero_forcing", &zero_forcing, 1e-8),
        worst_check("precoder_trace", &trace, 1e-9),
    ];
    if system.allocation.is_downlink_capable() {
        checks.push(count_check(
            "downlink_bound_with_delta_n",
            &down_dom,
            trials,
        ));
    }
    if system.allocation.is_uplink_capable() {
        checks.push(count_check("uplink_bound_with_delta_m", &up_dom, trials));
    }
    // the rule ignores interference, so the users only share outcomes without it
    if system.rho_i == 0.0 || system.density == 0.0 {
        checks.push(count_check("case2_users_share_outcomes", &shared, trials));
    }
    checks.push(count_check("uplink_power_budget", &budget, trials));
    checks.push(worst_check("decoding_order_sum_rate", &order, 1e-12));
    for c in &mut checks {
        c.name = format!("{}@{label}", c.name);
    }
    Ok(checks)
}

/// `λ∫(1 − e^{−β/max(u,r0)^α}) du` over the plane.
fn pgfl_exponent(
    density: f64,
    beta: f64,
    r0: f64,
    alpha: f64,
    spec: &QuadratureSpec,
) -> CliResult<f64> {
    if beta == 0.0 || density == 0.0 {
        return Ok(0.0);
    }
    let disc = -(-beta / r0.powf(alpha)).exp_m1() * r0 * r0 / 2.0;
    let cut = 1e4 * r0;
    let body = integrate_1d(|u| -(-beta / u.powf(alpha)).exp_m1() * u, r0, cut, spec)?.value;
    let tail = beta * cut.powf(2.0 - alpha) / (alpha - 2.0);
    Ok(2.0 * PI * density * (disc + body + tail))
}

/// Closed forms against direct quadrature of their defining integrals.
fn verify_closed_forms(system: &SystemConfig) -> CliResult<Vec<Check>> {
    let region = &system.region;
    let alpha = system.alpha;
    let spec = QuadratureSpec::new(1e-12, 1e-15)?;
    let (r0, r1, r) = (
        region.min_distance,
        region.inner_radius,
        region.outer_radius,
    );
    let mut ups = Worst::default();
    for c in [0.01, 0.3, 3.0] {
        let y = c / r.powf(alpha);
        let direct1 = integrate_1d(|x| (-y * x.powf(alpha)).exp() * x, r1, r, &spec)?.value * 2.0
            / (r * r - r1 * r1);
        let z = c / r1.powf(alpha);
        let head = (-z * r0.powf(alpha)).exp() * r0 * r0 / 2.0;
        let direct2 =
            (head + integrate_1d(|x| (-z * x.powf(alpha)).exp() * x, r0, r1, &spec)?.value) * 2.0
                / (r1 * r1);
        ups.record((upsilon1(region, alpha, y)? - direct1).abs());
        ups.record((upsilon2(region, alpha, z)? - direct2).abs());
    }
    let far = match system.allocation {
        AllocationMode::Fixed { far } => far,
        _ => 0.75,
    };
    let thresholds = ThresholdSet::new(system.rho, 1.0 - far, far, &system.rates);
    let scenario = system.scenario();
    let closed = lemma1_exact(&scenario, &thresholds)?;
    let phi = thresholds.phi_far;
    let mut failure = None;
    let success = if thresholds.feasible {
        integrate_1d(
            |x| {
                let l = scenario.path_loss(x);
                let beta = 2.0 * phi * system.delta * system.rho_i * l;
                match pgfl_exponent(system.density, beta, r0, alpha, &spec) {
                    Ok(e) => (-2.0 * phi * l - e).exp() * x,
                    Err(e) => {
                        failure = Some(e);
                        0.0
                    }
                }
            },
            r1,
            r,
            &spec,
        )?
        .value
            * 2.0
            / (r * r - r1 * r1)
    } else {
        0.0
    };
    if let Some(e) = failure {
        return Err(e);
    }
    let mut lemma = Worst::default();
    lemma.record((closed - (1.0 - success)).abs());
    Ok(vec![
        worst_check("upsilon_vs_quadrature", &ups, 1e-9),
        worst_check("far_outage_vs_nested_quadrature", &lemma, 1e-7),
    ])
}

/// Runs the verification battery at the first and last grid values.
pub fn verify(
    config: &LoadedConfig,
    trials: Option<u64>,
    seed: Option<u64>,
) -> CliResult<Vec<Check>> {
    let trials = trials.unwrap_or(config.file.run.trials).min(VERIFY_TRIALS);
    let values = &config.file.sweep.values;
    let mut grid = vec![values[0]];
    if values.len() > 1 {
        grid.push(values[values.len() - 1]);
    }
    let mut checks = Vec::new();
    for value in grid {
        let system = config.system_at(value, Some(trials), seed)?;
        checks.extend(verify_point(&system, &value.to_string())?);
        let mut closed = verify_closed_forms(&system)?;
        for c in &mut closed {
            c.name = format!("{}@{value}", c.name);
        }
        checks.extend(closed);
    }
    Ok(checks)
}
