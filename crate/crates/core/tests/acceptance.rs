//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sa_noma::analytic::{
    lemma1_exact, lemma2_exact, lemma4_exact, uplink_cr_case1, uplink_cr_case2, uplink_sum_exact,
    upsilon1, upsilon2,
};
use sa_noma::linalg::{inner, norm_sqr, sum};
use sa_noma::sim::{
    count_trials, draw_trial, estimate_events, modified_outage_flags, simulate_downlink_trial,
    simulate_uplink_trial, AllocationMode, Event, SelectionMode,
};
use sa_noma::special::lower_incomplete_gamma;

use common::{db, ks_critical, ks_statistic, loglog_slope as slope, simpson};
use sa_noma::{OutageEstimate, QuadratureSpec, RateTargets, Region, SystemConfig, ThresholdSet};

const NEAR: f64 = 0.4375;
const FAR: f64 = 0.5625;

enum Status {
    Pass,
    Fail,
    Soft,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        let status = if pass { Status::Pass } else { Status::Fail };
        Self { status, detail }
    }
}

fn rates(near: f64, far: f64) -> RateTargets {
    RateTargets::new(near, far).unwrap()
}

fn fig3(rho: f64, rho_i: f64, trials: u64) -> SystemConfig {
    SystemConfig {
        bs_antennas: 2,
        user_antennas: 2,
        region: Region::new(1.0, 10.0, 20.0).unwrap(),
        alpha: 3.0,
        rho,
        rho_i,
        density: 1e-4,
        delta: 1.0,
        rates: rates(1.0, 1.0),
        allocation: AllocationMode::Fixed { far: FAR },
        selection: SelectionMode::RandomX,
        truncation_radius: None,
        trials,
        seed: 20_240_601,
        quadrature: QuadratureSpec::default(),
    }
}

fn quiet(cfg: SystemConfig) -> SystemConfig {
    SystemConfig {
        rho_i: 0.0,
        density: 0.0,
        ..cfg
    }
}

/// Distance of the estimate from `exact` in units of a 95% half-width; the
/// half-width is the larger of the empirical one and the one implied by `exact`.
fn ci_ratio(est: &OutageEstimate, exact: f64) -> f64 {
    let n = est.trials as f64;
    let model = 1.96 * (exact * (1.0 - exact) / n).sqrt();
    let hw = est.half_width.max(model);
    let diff = (est.p_hat - exact).abs();
    if diff == 0.0 {
        0.0
    } else if hw == 0.0 {
        f64::INFINITY
    } else {
        diff / hw
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn direct_interference(cfg: &SystemConfig, points: &[sa_noma::Point], at: &sa_noma::Point) -> f64 {
    points
        .iter()
        .map(|p| cfg.rho_i / p.distance(at).max(cfg.region.min_distance).powf(cfg.alpha))
        .sum()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cfg = fig3(db(60.0), db(40.0), 500);
    let mut worst = 0.0_f64;
    for t in 0..cfg.trials {
        let draw = draw_trial(&cfg, t).unwrap();
        let down = simulate_downlink_trial(&cfg, &draw).unwrap();
        let up = simulate_uplink_trial(&cfg, &draw).unwrap();
        let p: Vec<_> = (0..cfg.bs_antennas)
            .map(|i| draw.precoder.column(i))
            .collect();
        let i_bs = direct_interference(&cfg, &draw.field.points, &sa_noma::Point::origin());
        let mut up_coeff = vec![vec![(0.0, 0.0); cfg.bs_antennas]; cfg.bs_antennas];
        for m in 0..cfg.bs_antennas {
            let pos = &draw.positions[m];
            let link = &draw.links[m];
            let ch = &draw.channels[m];
            let users = [
                (&ch.near, &link.near_vector, pos.near, pos.near_distance()),
                (&ch.far, &link.far_vector, pos.far, pos.far_distance()),
            ];
            let mut sinr = Vec::new();
            for (k, (g, v, at, d)) in users.iter().enumerate() {
                let loss = d.max(cfg.region.min_distance).powf(cfg.alpha);
                let coeff: Vec<f64> = p
                    .iter()
                    .map(|pi| inner(v, &g.mul_vec(pi).unwrap()).norm_sqr() / loss)
                    .collect();
                for (i, c) in coeff.iter().enumerate() {
                    if k == 0 {
                        up_coeff[i][m].0 = *c;
                    } else {
                        up_coeff[i][m].1 = *c;
                    }
                }
                let leak: f64 = (0..cfg.bs_antennas)
                    .filter(|&i| i != m)
                    .map(|i| cfg.rho * coeff[i])
                    .sum();
                let noise = norm_sqr(v)
                    + sum(v).norm_sqr() * direct_interference(&cfg, &draw.field.points, at)
                    + leak;
                let own = cfg.rho * coeff[m];
                if k == 0 {
                    sinr.push(own * FAR / (own * NEAR + noise));
                    sinr.push(own * NEAR / noise);
                } else {
                    sinr.push(own * FAR / (own * NEAR + noise));
                }
            }
            let rec = &down[m];
            worst = worst
                .max(rel(sinr[0], rec.sinr_near_sic))
                .max(rel(sinr[1], rec.sinr_near))
                .max(rel(sinr[2], rec.sinr_far));
        }
        for m in 0..cfg.bs_antennas {
            let pm = &p[m];
            // `p_mᴴ G_kᴴ v_k` has the same modulus as `v_kᴴ G_k p_m`.
            let leak: f64 = (0..cfg.bs_antennas)
                .filter(|&i| i != m)
                .map(|i| cfg.rho * (NEAR * up_coeff[m][i].0 + FAR * up_coeff[m][i].1))
                .sum();
            let noise = norm_sqr(pm) + sum(pm).norm_sqr() * i_bs + leak;
            let s_near = cfg.rho * NEAR * up_coeff[m][m].0;
            let s_far = cfg.rho * FAR * up_coeff[m][m].1;
            let rate = ((s_near + s_far) / noise).ln_1p() / std::f64::consts::LN_2;
            worst = worst.max(rel(rate, up[m].sum_rate_near_first())).max(rel(
                (s_far / (s_near + noise)).ln_1p() / std::f64::consts::LN_2,
                up[m].rate_far_first,
            ));
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst <= 1e-8 && elapsed < Duration::from_secs(10),
        format!(
            "500 realizations, worst relative gap {worst:.2e} (tol 1e-8), {:.2} s (limit 10 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let rho_i = db(80.0);
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for s in [100.0, 110.0, 120.0, 130.0, 140.0, 150.0] {
        let cfg = fig3(db(s), rho_i, 100_000);
        let batch = estimate_events(
            &cfg,
            &[Event::DownlinkFarModified, Event::DownlinkNearModified],
        )
        .unwrap();
        let th = ThresholdSet::new(cfg.rho, NEAR, FAR, &cfg.rates);
        let far = lemma1_exact(&cfg.scenario(), &th).unwrap();
        let near = lemma2_exact(&cfg.scenario(), &th).unwrap();
        let (zf, zn) = (
            ci_ratio(&batch.estimates[0], far),
            ci_ratio(&batch.estimates[1], near),
        );
        worst = worst.max(zf).max(zn);
        rows.push(format!(
            "{s:.0}dB far {:.3e}/{far:.3e} near {:.3e}/{near:.3e}",
            batch.estimates[0].p_hat, batch.estimates[1].p_hat
        ));
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst <= 3.0 && elapsed < Duration::from_secs(300),
        format!(
            "worst |p_sim - exact| = {worst:.2} CI (limit 3), {:.0} s (limit 300 s); sim/exact: {}",
            elapsed.as_secs_f64(),
            rows.join("; ")
        ),
    )
}

fn criterion_3() -> Outcome {
    let cfg = SystemConfig {
        delta: 2.0,
        ..fig3(db(110.0), db(80.0), 100_000)
    };
    let down = count_trials(&cfg, |draw| {
        let recs = simulate_downlink_trial(&cfg, draw)?;
        Ok(recs.iter().any(|r| {
            let m = modified_outage_flags(r, cfg.rho, cfg.delta, &cfg.rates);
            (r.outage_far && !m.far) || (r.outage_near && !m.near)
        }))
    })
    .unwrap();
    let up = count_trials(&cfg, |draw| {
        let recs = simulate_uplink_trial(&cfg, draw)?;
        Ok(recs.iter().any(|r| r.outage_sum && !r.outage_sum_modified))
    })
    .unwrap();
    Outcome::new(
        down == 0 && up == 0,
        format!(
            "violations over {} trials: downlink (delta=N) {down}, uplink (delta=M) {up}",
            cfg.trials
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut rows = Vec::new();
    for far_rate in [1.5, 3.0] {
        let cfg = SystemConfig {
            rates: rates(1.0, far_rate),
            ..fig3(db(150.0), db(20.0), 10_000)
        };
        let th = ThresholdSet::new(cfg.rho, NEAR, FAR, &cfg.rates);
        let l1 = lemma1_exact(&cfg.scenario(), &th).unwrap();
        let l2 = lemma2_exact(&cfg.scenario(), &th).unwrap();
        let batch = estimate_events(
            &cfg,
            &[
                Event::DownlinkFar,
                Event::DownlinkNear,
                Event::DownlinkFarModified,
                Event::DownlinkNearModified,
            ],
        )
        .unwrap();
        let sims: Vec<f64> = batch.estimates.iter().map(|e| e.p_hat).collect();
        ok &= !th.feasible && l1 == 1.0 && l2 == 1.0 && sims.iter().all(|&p| p == 1.0);
        rows.push(format!("R'={far_rate}: exact {l1}/{l2}, sim {sims:?}"));
    }
    Outcome::new(ok, rows.join("; "))
}

fn criterion_5() -> Outcome {
    // Interference power scaled with the transmit power keeps the interference
    // to signal ratio fixed, which is what produces the floor.
    let ratio = 1e-4;
    let limit_cfg = fig3(1e40, 1e40 * ratio, 1);
    let limit = lemma1_exact(
        &limit_cfg.scenario(),
        &ThresholdSet::new(limit_cfg.rho, NEAR, FAR, &limit_cfg.rates),
    )
    .unwrap();
    let mut sims = Vec::new();
    let mut last = None;
    for s in [120.0, 135.0, 150.0] {
        let cfg = fig3(db(s), db(s) * ratio, 100_000);
        let est = estimate_events(&cfg, &[Event::DownlinkFarModified])
            .unwrap()
            .estimates
            .remove(0);
        sims.push(format!("{s:.0}dB {:.4e}±{:.1e}", est.p_hat, est.half_width));
        last = Some(est);
    }
    let last = last.unwrap();
    let z = ci_ratio(&last, limit);
    Outcome::new(
        limit > 0.0 && last.p_hat > 0.0 && z <= 3.0,
        format!(
            "rho_I/rho = {ratio:e}; floor {limit:.4e}; sim {}; gap {z:.2} CI (limit 3)",
            sims.join(", ")
        ),
    )
}

fn fig5(rho: f64, allocation: AllocationMode<f64>, trials: u64) -> SystemConfig {
    SystemConfig {
        rates: rates(1.0, 0.5),
        allocation,
        ..quiet(fig3(rho, 0.0, trials))
    }
}

fn criterion_6() -> Outcome {
    let grid = [55.0, 60.0, 65.0, 70.0, 75.0, 80.0];
    let mut far_worst: f64 = 0.0;
    let mut near_worst: f64 = 0.0;
    let mut rows = Vec::new();
    for s in grid {
        let cog = estimate_events(
            &fig5(db(s), AllocationMode::CognitiveDownlink, 100_000),
            &[Event::DownlinkFar],
        )
        .unwrap()
        .estimates
        .remove(0);
        let single = estimate_events(
            &fig5(db(s), AllocationMode::Fixed { far: 1.0 }, 100_000),
            &[Event::DownlinkFar],
        )
        .unwrap()
        .estimates
        .remove(0);
        let joint = (cog.half_width.powi(2) + single.half_width.powi(2)).sqrt();
        let gap = (cog.p_hat - single.p_hat).abs();
        far_worst = far_worst.max(if gap == 0.0 { 0.0 } else { gap / joint });
        let cfg = fig5(db(s), AllocationMode::CognitiveDownlinkSimplified, 100_000);
        let near = estimate_events(&cfg, &[Event::DownlinkNearModified])
            .unwrap()
            .estimates
            .remove(0);
        let exact = lemma4_exact(&cfg.scenario(), &cfg.rates).unwrap();
        near_worst = near_worst.max(ci_ratio(&near, exact));
        rows.push(format!("{s:.0}dB {:.3e}/{exact:.3e}", near.p_hat));
    }
    let top: Vec<f64> = [70.0, 80.0]
        .iter()
        .map(|&s| {
            let cfg = fig5(
                db(s),
                AllocationMode::CognitiveDownlinkSimplified,
                1_000_000,
            );
            estimate_events(&cfg, &[Event::DownlinkNearModified])
                .unwrap()
                .estimates[0]
                .p_hat
        })
        .collect();
    let k = slope(&[db(70.0), db(80.0)], &top);
    Outcome::new(
        far_worst <= 1.0 && near_worst <= 3.0 && (k + 1.0).abs() <= 0.1,
        format!(
            "far vs single-user {far_worst:.2} joint CI (limit 1); near vs closed form {near_worst:.2} CI (limit 3); near slope {k:.3} (-1 ± 0.1); near sim/exact: {}",
            rows.join("; ")
        ),
    )
}

fn fig6(rho: f64, trials: u64) -> SystemConfig {
    fig3(rho, db(20.0), trials)
}

fn criterion_7() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    let mut order_gap: f64 = 0.0;
    for s in [50.0, 55.0, 60.0, 65.0, 70.0, 75.0] {
        let cfg = fig6(db(s), 100_000);
        let est = estimate_events(&cfg, &[Event::UplinkSumModified])
            .unwrap()
            .estimates
            .remove(0);
        let exact = uplink_sum_exact(&cfg.scenario(), NEAR, FAR, &cfg.rates).unwrap();
        worst = worst.max(ci_ratio(&est, exact));
        rows.push(format!("{s:.0}dB {:.3e}/{exact:.3e}", est.p_hat));
        if s == 60.0 {
            for t in 0..cfg.trials {
                let draw = draw_trial(&cfg, t).unwrap();
                for r in simulate_uplink_trial(&cfg, &draw).unwrap() {
                    order_gap = order_gap.max(rel(r.sum_rate_near_first(), r.sum_rate_far_first()));
                }
            }
        }
    }
    let grid = [db(90.0), db(95.0), db(100.0)];
    let exact: Vec<f64> = grid
        .iter()
        .map(|&rho| {
            let cfg = fig6(rho, 1);
            uplink_sum_exact(&cfg.scenario(), NEAR, FAR, &cfg.rates).unwrap()
        })
        .collect();
    let k = slope(&grid, &exact);
    Outcome::new(
        worst <= 3.0 && order_gap <= 1e-12 && (k + 1.0).abs() <= 0.05,
        format!(
            "worst {worst:.2} CI (limit 3); decoding-order gap {order_gap:.1e} (tol 1e-12); exact slope {k:.3} (-1 ± 0.05); sim/exact: {}",
            rows.join("; ")
        ),
    )
}

fn fig7(rho: f64, allocation: AllocationMode<f64>, trials: u64) -> SystemConfig {
    SystemConfig {
        region: Region::new(1.0, 2.0, 4.0).unwrap(),
        allocation,
        ..quiet(fig3(rho, 0.0, trials))
    }
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ordering = true;
    let mut unequal = 0;
    let mut rows = Vec::new();
    for s in [15.0, 20.0, 25.0, 30.0, 35.0, 40.0] {
        let c1 = fig7(db(s), AllocationMode::CognitiveUplinkCaseI, 100_000);
        let c2 = fig7(db(s), AllocationMode::CognitiveUplinkCaseII, 100_000);
        let e1 = uplink_cr_case1(&c1.scenario(), &c1.rates).unwrap();
        let e2 = uplink_cr_case2(&c2.scenario(), &c2.rates).unwrap();
        let s1 = estimate_events(&c1, &[Event::UplinkFar, Event::UplinkNear])
            .unwrap()
            .estimates;
        let s2 = estimate_events(&c2, &[Event::UplinkFar, Event::UplinkNear])
            .unwrap()
            .estimates;
        worst = worst
            .max(ci_ratio(&s1[0], e1.far))
            .max(ci_ratio(&s1[1], e1.near))
            .max(ci_ratio(&s2[0], e2))
            .max(ci_ratio(&s2[1], e2));
        ordering &= e1.far <= e2 && e1.near >= e2;
        unequal += count_trials(&c2, |draw| {
            Ok(simulate_uplink_trial(&c2, draw)?
                .iter()
                .any(|r| r.outage_far != r.outage_near))
        })
        .unwrap();
        rows.push(format!(
            "{s:.0}dB I {:.3e}/{:.3e} {:.3e}/{:.3e} II {:.3e}/{:.3e}/{e2:.3e}",
            s1[0].p_hat, e1.far, s1[1].p_hat, e1.near, s2[0].p_hat, s2[1].p_hat
        ));
    }
    Outcome::new(
        worst <= 3.0 && ordering && unequal == 0,
        format!(
            "worst {worst:.2} CI (limit 3); Case II unequal trials {unequal}; orderings hold: {ordering}; sim/exact: {}",
            rows.join("; ")
        ),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let run = |selection, grid: &[f64], trials| -> Vec<f64> {
        grid.iter()
            .map(|&s| {
                let cfg = SystemConfig {
                    selection,
                    ..quiet(fig3(db(s), 0.0, trials))
                };
                estimate_events(&cfg, &[Event::DownlinkFar])
                    .unwrap()
                    .estimates[0]
                    .p_hat
            })
            .collect()
    };
    let alg_grid = [65.0, 67.5, 70.0, 72.5, 75.0];
    let alg = run(SelectionMode::Algorithm1, &alg_grid, 1_000_000);
    let rnd_grid = [65.0, 67.5, 70.0, 72.5, 75.0];
    let rnd = run(SelectionMode::RandomX, &rnd_grid, 200_000);
    let rho = |g: &[f64]| g.iter().map(|&s| db(s)).collect::<Vec<_>>();
    let k_alg = slope(&rho(&alg_grid), &alg);
    let k_rnd = slope(&rho(&rnd_grid), &rnd);
    let in_band = alg.iter().all(|&p| (1e-5..=1e-2).contains(&p));
    let elapsed = start.elapsed();
    Outcome::new(
        (-2.4..=-1.6).contains(&k_alg) && (-1.3..=-0.7).contains(&k_rnd) && in_band && elapsed < Duration::from_secs(1800),
        format!(
            "Algorithm 1 slope {k_alg:.3} in [-2.4, -1.6] (outage {:.2e}..{:.2e}); random x slope {k_rnd:.3} in [-1.3, -0.7]; {:.0} s (limit 1800 s)",
            alg[0],
            alg[alg.len() - 1],
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_10() -> Outcome {
    let g = lower_incomplete_gamma(1.0_f64, 1.0).unwrap();
    let g_err = (g - (1.0 - (-1.0f64).exp())).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let regions = [
        Region::new(1.0, 10.0, 20.0).unwrap(),
        Region::new(1.0, 2.0, 4.0).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let region = regions[i % 2];
        let alpha = if i % 3 == 0 { 4.0 } else { 3.0 };
        let arg = 10f64.powf(rng.random_range(-6.0..0.0)) / region.outer_radius.powf(alpha - 2.0);
        let (r0, r1, r) = (
            region.min_distance,
            region.inner_radius,
            region.outer_radius,
        );
        let u1 =
            2.0 / (r * r - r1 * r1) * simpson(|x| (-arg * x.powf(alpha)).exp() * x, r1, r, 1e-14);
        let u2 = 2.0 / (r1 * r1)
            * ((-arg * r0.powf(alpha)).exp() * r0 * r0 / 2.0
                + simpson(|x| (-arg * x.powf(alpha)).exp() * x, r0, r1, 1e-14));
        worst = worst
            .max((upsilon1(&region, alpha, arg).unwrap() - u1).abs())
            .max((upsilon2(&region, alpha, arg).unwrap() - u2).abs());
    }
    Outcome::new(
        g_err <= 1e-10 && worst <= 1e-8,
        format!("|gamma(1,1) - (1 - 1/e)| = {g_err:.1e} (tol 1e-10); Upsilon vs integrals at 20 arguments {worst:.1e} (tol 1e-8)"),
    )
}

fn criterion_11() -> Outcome {
    let cfg = quiet(fig3(1.0, 0.0, 100_000));
    let mut second = 0.0;
    let mut count = 0usize;
    let mut gains = Vec::with_capacity(cfg.trials as usize);
    for t in 0..cfg.trials {
        let draw = draw_trial(&cfg, t).unwrap();
        for z in &draw.links[0].effective {
            second += z.norm_sqr();
            count += 1;
        }
        gains.push(draw.precoder.effective_gains[0]);
    }
    let variance = second / count as f64;
    gains.sort_by(|a, b| a.total_cmp(b));
    let n = gains.len() as f64;
    let scale = gains.iter().sum::<f64>() / n;
    let critical = ks_critical(gains.len());
    let d_unit = ks_statistic(&gains, |x| 1.0 - (-x).exp());
    let d_scaled = ks_statistic(&gains, |x| 1.0 - (-x / scale).exp());
    let detail = format!(
        "component variance {variance:.4} (target 1 ± 2%); effective gain KS vs Exp(1) D = {d_unit:.4}, fitted scale {scale:.4}, KS vs Exp(scale) D = {d_scaled:.4} (critical {critical:.4} at 0.01)"
    );
    let status = if (variance - 1.0).abs() <= 0.02 && d_unit <= critical {
        Status::Pass
    } else if d_scaled <= critical {
        Status::Soft
    } else {
        Status::Fail
    };
    Outcome { status, detail }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("decomposition oracle", criterion_1),
        ("fixed-allocation downlink agreement", criterion_2),
        ("bound domination", criterion_3),
        ("infeasibility wall", criterion_4),
        ("error floor", criterion_5),
        ("cognitive downlink", criterion_6),
        ("uplink sum rate", criterion_7),
        ("uplink cognitive cases", criterion_8),
        ("diversity of detection-vector selection", criterion_9),
        ("special functions", criterion_10),
        ("statistical suites", criterion_11),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = match outcome.status {
            Status::Pass => "PASS",
            Status::Soft => "SOFT",
            Status::Fail => {
                failures += 1;
                "FAIL"
            }
        };
        println!("[{tag}] {:>2}. {name}: {}", i + 1, outcome.detail);
    }
    println!(
        "acceptance: {} of {} criteria failed",
        failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
