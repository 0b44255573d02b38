//! Monte Carlo engine: one joint draw of positions, fading and interferers per
//! trial, followed by the downlink or uplink SIC outage events.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::Scenario;
use crate::channel::{
    align_pair, build_precoder_from_links, random_combiner, sample_pair_channel,
    select_detection_vectors, AlignedLink, PairChannel, PrecoderSet,
};
use crate::error::{Error, Result};
use crate::geometry::{
    path_loss_unchecked, sample_interference_field, sample_user_pair_positions, InterferenceField,
    PairPositions, Point, Region,
};
use crate::linalg::{norm_sqr, sum};
use crate::power::{
    cognitive_downlink_alloc, cognitive_downlink_alloc_simplified, cognitive_uplink_case1_alloc,
    cognitive_uplink_case2_alloc, PowerAllocation, RateTargets,
};
use crate::rng::TrialRngs;
use crate::scalar::Real;
use crate::special::QuadratureSpec;

/// Relative slack on SINR thresholds, so that allocations meeting a target
/// with equality are not reported as outages because of rounding.
pub const OUTAGE_SLACK: f64 = 1e-9;

/// Default interferer truncation radius as a multiple of the outer radius.
pub const DEFAULT_TRUNCATION_FACTOR: f64 = 100.0;

/// Consecutive degenerate draws tolerated within one trial.
pub const MAX_RESAMPLES: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionMode {
    /// Isotropic combiner per pair.
    RandomX,
    /// Max-min basis-combiner selection.
    Algorithm1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AllocationMode<T> {
    /// Constant split with `α_m'² = far`.
    Fixed {
        far: T,
    },
    /// Downlink cognitive rule with the realized noise and interference terms.
    CognitiveDownlink,
    /// Downlink cognitive rule with the constant 2 in place of those terms.
    CognitiveDownlinkSimplified,
    CognitiveUplinkCaseI,
    CognitiveUplinkCaseII,
}

impl<T: Real> AllocationMode<T> {
    pub fn is_downlink_capable(&self) -> bool {
        matches!(
            self,
            AllocationMode::Fixed { .. }
                | AllocationMode::CognitiveDownlink
                | AllocationMode::CognitiveDownlinkSimplified
        )
    }

    pub fn is_uplink_capable(&self) -> bool {
        matches!(
            self,
            AllocationMode::Fixed { .. }
                | AllocationMode::CognitiveUplinkCaseI
                | AllocationMode::CognitiveUplinkCaseII
        )
    }
}

/// Every parameter of one simulated scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig<T> {
    /// `M`.
    pub bs_antennas: usize,
    /// `N`.
    pub user_antennas: usize,
    pub region: Region<T>,
    pub alpha: T,
    /// Linear transmit SNR `ρ`.
    pub rho: T,
    /// Linear interferer power `ρ_I`.
    pub rho_i: T,
    /// Interferer density `λ_I` per m².
    pub density: T,
    pub delta: T,
    pub rates: RateTargets<T>,
    pub allocation: AllocationMode<T>,
    pub selection: SelectionMode,
    /// Interferer disc radius; `None` uses 100 times the outer radius.
    pub truncation_radius: Option<T>,
    pub trials: u64,
    pub seed: u64,
    pub quadrature: QuadratureSpec<T>,
}

impl<T: Real> SystemConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.region.validate()?;
        if self.bs_antennas == 0 || self.user_antennas == 0 {
            return Err(Error::Config("antenna counts must be at least 1".into()));
        }
        if 2 * self.user_antennas <= self.bs_antennas {
            return Err(Error::Config(format!(
                "signal alignment needs N > M/2 (N = {}, M = {})",
                self.user_antennas, self.bs_antennas
            )));
        }
        if !(self.alpha > T::c(2.0)) || !self.alpha.is_finite() {
            return Err(Error::Config(format!(
                "path-loss exponent must exceed 2 (got {})",
                self.alpha
            )));
        }
        if !(self.rho > T::zero()) || !self.rho.is_finite() {
            return Err(Error::Config(format!(
                "SNR must be positive (got {})",
                self.rho
            )));
        }
        if !(self.rho_i >= T::zero()) || !self.rho_i.is_finite() {
            return Err(Error::Config(format!(
                "interference power must be nonnegative (got {})",
                self.rho_i
            )));
        }
        if !(self.density >= T::zero()) || !self.density.is_finite() {
            return Err(Error::Config(format!(
                "interferer density must be nonnegative (got {})",
                self.density
            )));
        }
        if !(self.delta >= T::one()) {
            return Err(Error::Config(format!(
                "delta must be at least 1 (got {})",
                self.delta
            )));
        }
        if let AllocationMode::Fixed { far } = self.allocation {
            PowerAllocation::fixed(far)?;
        }
        if let Some(radius) = self.truncation_radius {
            if !(radius >= self.region.outer_radius) || !radius.is_finite() {
                return Err(Error::Config(format!(
                    "truncation radius must be at least the outer radius (got {radius})"
                )));
            }
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        self.quadrature.validate()
    }

    pub fn truncation(&self) -> T {
        self.truncation_radius
            .unwrap_or(self.region.outer_radius * T::c(DEFAULT_TRUNCATION_FACTOR))
    }

    /// Analytic view of the same parameters.
    pub fn scenario(&self) -> Scenario<T> {
        Scenario {
            region: self.region,
            alpha: self.alpha,
            rho: self.rho,
            rho_i: self.rho_i,
            density: self.density,
            delta: self.delta,
            quadrature: self.quadrature,
        }
    }

    pub fn with_rho(&self, rho: T) -> Self {
        Self { rho, ..*self }
    }

    fn path_loss(&self, d: T) -> T {
        path_loss_unchecked(d, self.region.min_distance, self.alpha)
    }
}

/// One joint realization of every random quantity of a trial.
#[derive(Debug, Clone)]
pub struct TrialDraw<T> {
    pub positions: Vec<PairPositions<T>>,
    pub channels: Vec<PairChannel<T>>,
    pub links: Vec<AlignedLink<T>>,
    pub precoder: PrecoderSet<T>,
    pub field: InterferenceField<T>,
    /// Index of the chosen basis combiner when selection is enabled.
    pub selected: Option<usize>,
    /// Degenerate fading draws discarded before this one.
    pub resamples: u32,
}

/// Draws trial `trial` of `config` from its derived streams.
pub fn draw_trial<T: Real>(config: &SystemConfig<T>, trial: u64) -> Result<TrialDraw<T>> {
    let mut rngs = TrialRngs::new(config.seed, trial);
    let m = config.bs_antennas;
    let n = config.user_antennas;
    let positions: Vec<_> = (0..m)
        .map(|_| sample_user_pair_positions(&config.region, &mut rngs.positions))
        .collect();
    let field = sample_interference_field(
        config.density,
        config.rho_i,
        config.truncation(),
        &mut rngs.interference,
    )?;
    let mut resamples = 0;
    loop {
        let channels: Vec<_> = positions
            .iter()
            .map(|p| sample_pair_channel(n, m, p, &mut rngs.fading))
            .collect();
        let attempt = match config.selection {
            SelectionMode::Algorithm1 => {
                select_detection_vectors(&channels).map(|s| (s.links, s.precoder, Some(s.index)))
            }
            SelectionMode::RandomX => channels
                .iter()
                .map(|c| align_pair(c, random_combiner(2 * n - m, &mut rngs.combiner)))
                .collect::<Result<Vec<_>>>()
                .and_then(|links| build_precoder_from_links(&links).map(|p| (links, p, None))),
        };
        match attempt {
            Ok((links, precoder, selected)) => {
                return Ok(TrialDraw {
                    positions,
                    channels,
                    links,
                    precoder,
                    field,
                    selected,
                    resamples,
                })
            }
            Err(e) if e.is_degenerate_draw() && resamples < MAX_RESAMPLES => resamples += 1,
            Err(e) => return Err(e),
        }
    }
}

fn fails<T: Real>(sinr: T, eps: T) -> bool {
    sinr < eps * (T::one() - T::c(OUTAGE_SLACK))
}

/// Downlink quantities and outage flags of one pair in one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DownlinkRecord<T> {
    /// `1/(G⁻¹G⁻ᴴ)_{m,m}`.
    pub gain: T,
    /// `|h_m|²`.
    pub h_near: T,
    /// `|h_m'|²`.
    pub h_far: T,
    pub v_near_norm_sqr: T,
    pub v_near_sum_sqr: T,
    pub v_far_norm_sqr: T,
    pub v_far_sum_sqr: T,
    pub i_near: T,
    pub i_far: T,
    pub allocation: PowerAllocation<T>,
    /// `SINR_m'` at the far user.
    pub sinr_far: T,
    /// `SINR_{m,m'}`: far-user message at the near user.
    pub sinr_near_sic: T,
    /// `SINR_m` after cancellation.
    pub sinr_near: T,
    pub outage_far: bool,
    pub outage_near_sic: bool,
    pub outage_near: bool,
}

/// Outage flags with the noise-plus-interference terms replaced by `2 + 2δI`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModifiedDownlinkFlags {
    pub far: bool,
    pub near: bool,
}

/// Downlink pipeline for every pair of `draw`.
pub fn simulate_downlink_trial<T: Real>(
    config: &SystemConfig<T>,
    draw: &TrialDraw<T>,
) -> Result<Vec<DownlinkRecord<T>>> {
    if !config.allocation.is_downlink_capable() {
        return Err(Error::Config("allocation mode is uplink-only".into()));
    }
    let rho = config.rho;
    let eps_near = config.rates.eps_near();
    let eps_far = config.rates.eps_far();
    (0..config.bs_antennas)
        .map(|m| {
            let link = &draw.links[m];
            let pos = &draw.positions[m];
            let gain = draw.precoder.effective_gains[m];
            let h_near = gain / config.path_loss(pos.near_distance());
            let h_far = gain / config.path_loss(pos.far_distance());
            let v_near_norm_sqr = norm_sqr(&link.near_vector);
            let v_near_sum_sqr = sum(&link.near_vector).norm_sqr();
            let v_far_norm_sqr = norm_sqr(&link.far_vector);
            let v_far_sum_sqr = sum(&link.far_vector).norm_sqr();
            let i_near =
                draw.field
                    .aggregate_at(&pos.near, config.region.min_distance, config.alpha);
            let i_far = draw
                .field
                .aggregate_at(&pos.far, config.region.min_distance, config.alpha);
            let pen_near = v_near_norm_sqr + v_near_sum_sqr * i_near;
            let pen_far = v_far_norm_sqr + v_far_sum_sqr * i_far;
            let allocation = match config.allocation {
                AllocationMode::Fixed { far } => PowerAllocation::fixed(far)?,
                AllocationMode::CognitiveDownlink => cognitive_downlink_alloc(
                    rho,
                    h_far,
                    v_far_norm_sqr,
                    v_far_sum_sqr,
                    i_far,
                    eps_far,
                ),
                AllocationMode::CognitiveDownlinkSimplified => {
                    cognitive_downlink_alloc_simplified(rho, h_far, eps_far)
                }
                _ => unreachable!(),
            };
            let (a_n, a_f) = (allocation.near, allocation.far);
            let sinr_far = rho * h_far * a_f / (rho * h_far * a_n + pen_far);
            let sinr_near_sic = rho * h_near * a_f / (rho * h_near * a_n + pen_near);
            let sinr_near = rho * h_near * a_n / pen_near;
            let outage_far = fails(sinr_far, eps_far);
            let outage_near_sic = fails(sinr_near_sic, eps_far);
            let outage_near = outage_near_sic || fails(sinr_near, eps_near);
            Ok(DownlinkRecord {
                gain,
                h_near,
                h_far,
                v_near_norm_sqr,
                v_near_sum_sqr,
                v_far_norm_sqr,
                v_far_sum_sqr,
                i_near,
                i_far,
                allocation,
                sinr_far,
                sinr_near_sic,
                sinr_near,
                outage_far,
                outage_near_sic,
                outage_near,
            })
        })
        .collect()
}

/// Downlink outage flags with the bound `2 + 2δI` in place of the exact terms.
pub fn modified_outage_flags<T: Real>(
    record: &DownlinkRecord<T>,
    rho: T,
    delta: T,
    rates: &RateTargets<T>,
) -> ModifiedDownlinkFlags {
    let two = T::c(2.0);
    let (a_n, a_f) = (record.allocation.near, record.allocation.far);
    let eps_near = rates.eps_near();
    let eps_far = rates.eps_far();
    let pen_far = two + two * delta * record.i_far;
    let pen_near = two + two * delta * record.i_near;
    let far = fails(
        rho * record.h_far * a_f / (rho * record.h_far * a_n + pen_far),
        eps_far,
    );
    let sic = fails(
        rho * record.h_near * a_f / (rho * record.h_near * a_n + pen_near),
        eps_far,
    );
    let near = sic || fails(rho * record.h_near * a_n / pen_near, eps_near);
    ModifiedDownlinkFlags { far, near }
}

/// Uplink quantities and outage flags of one pair in one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UplinkRecord<T> {
    pub gain: T,
    pub h_near: T,
    pub h_far: T,
    pub allocation: PowerAllocation<T>,
    /// `|p_mᴴ1_M|²`.
    pub p_sum_sqr: T,
    /// `ρ_I Σ 1/L(d_j)` at the base station.
    pub i_bs: T,
    /// `R_{m,BS}` with the near user decoded first, then `R_{m',BS}` after cancellation.
    pub rate_near_first: T,
    pub rate_far_after: T,
    /// `R_{m',BS}` with the far user decoded first, then `R_{m,BS}` after cancellation.
    pub rate_far_first: T,
    pub rate_near_after: T,
    /// Pair transmit power `ρ(α_m²‖v_m‖² + α_m'²‖v_m'‖²)`.
    pub tx_power: T,
    /// `R_s < R_m + R_m'`.
    pub outage_sum: bool,
    /// Sum-rate event with `δ I + 1` in place of `|p_mᴴ1_M|² I + 1`.
    pub outage_sum_modified: bool,
    /// Per-user flags under the decoding order implied by the allocation mode
    /// (far user first unless the mode is Case II).
    pub outage_far: bool,
    pub outage_near: bool,
}

impl<T: Real> UplinkRecord<T> {
    pub fn sum_rate_near_first(&self) -> T {
        self.rate_near_first + self.rate_far_after
    }

    pub fn sum_rate_far_first(&self) -> T {
        self.rate_far_first + self.rate_near_after
    }
}

/// Uplink pipeline for every pair of `draw`, with the noise after detection normalized to 1.
pub fn simulate_uplink_trial<T: Real>(
    config: &SystemConfig<T>,
    draw: &TrialDraw<T>,
) -> Result<Vec<UplinkRecord<T>>> {
    if !config.allocation.is_uplink_capable() {
        return Err(Error::Config("allocation mode is downlink-only".into()));
    }
    let rho = config.rho;
    let one = T::one();
    let eps_near = config.rates.eps_near();
    let eps_far = config.rates.eps_far();
    let eps_sum = config.rates.eps_sum();
    let i_bs = draw
        .field
        .aggregate_at(&Point::origin(), config.region.min_distance, config.alpha);
    (0..config.bs_antennas)
        .map(|m| {
            let link = &draw.links[m];
            let pos = &draw.positions[m];
            let gain = draw.precoder.effective_gains[m];
            let h_near = gain / config.path_loss(pos.near_distance());
            let h_far = gain / config.path_loss(pos.far_distance());
            let p_sum_sqr = sum(&draw.precoder.column(m)).norm_sqr();
            let noise = one + p_sum_sqr * i_bs;
            let allocation = match config.allocation {
                AllocationMode::Fixed { far } => PowerAllocation::fixed(far)?,
                AllocationMode::CognitiveUplinkCaseI => {
                    cognitive_uplink_case1_alloc(rho, h_near, h_far, eps_far)
                }
                AllocationMode::CognitiveUplinkCaseII => {
                    cognitive_uplink_case2_alloc(rho, h_far, eps_far)
                }
                _ => unreachable!(),
            };
            let s_near = rho * h_near * allocation.near;
            let s_far = rho * h_far * allocation.far;
            let sinr_near_first = s_near / (s_far + noise);
            let sinr_far_after = s_far / noise;
            let sinr_far_first = s_far / (s_near + noise);
            let sinr_near_after = s_near / noise;
            let sum_sinr = (s_near + s_far) / noise;
            let sum_sinr_modified = (s_near + s_far) / (config.delta * i_bs + one);
            let (outage_far, outage_near) = match config.allocation {
                AllocationMode::CognitiveUplinkCaseII => {
                    let near = fails(sinr_near_first, eps_near);
                    (near || fails(sinr_far_after, eps_far), near)
                }
                _ => {
                    let far = fails(sinr_far_first, eps_far);
                    (far, far || fails(sinr_near_after, eps_near))
                }
            };
            Ok(UplinkRecord {
                gain,
                h_near,
                h_far,
                allocation,
                p_sum_sqr,
                i_bs,
                rate_near_first: sinr_near_first.ln_1p() / T::LN_2(),
                rate_far_after: sinr_far_after.ln_1p() / T::LN_2(),
                rate_far_first: sinr_far_first.ln_1p() / T::LN_2(),
                rate_near_after: sinr_near_after.ln_1p() / T::LN_2(),
                tx_power: rho
                    * (allocation.near * norm_sqr(&link.near_vector)
                        + allocation.far * norm_sqr(&link.far_vector)),
                outage_sum: fails(sum_sinr, eps_sum),
                outage_sum_modified: fails(sum_sinr_modified, eps_sum),
                outage_far,
                outage_near,
            })
        })
        .collect()
}

/// Outage events that can be estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Event {
    DownlinkFar,
    DownlinkNear,
    /// `P̃_m'` with the configured `δ`.
    DownlinkFarModified,
    /// `P̃_m` with the configured `δ`.
    DownlinkNearModified,
    UplinkSum,
    /// `P̃_s` with the configured `δ`.
    UplinkSumModified,
    UplinkFar,
    UplinkNear,
    /// Always true.
    Certain,
}

impl Event {
    pub fn label(self) -> &'static str {
        match self {
            Event::DownlinkFar => "downlink_far",
            Event::DownlinkNear => "downlink_near",
            Event::DownlinkFarModified => "downlink_far_modified",
            Event::DownlinkNearModified => "downlink_near_modified",
            Event::UplinkSum => "uplink_sum",
            Event::UplinkSumModified => "uplink_sum_modified",
            Event::UplinkFar => "uplink_far",
            Event::UplinkNear => "uplink_near",
            Event::Certain => "certain",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|e| e.label() == label)
    }

    pub const ALL: [Event; 9] = [
        Event::DownlinkFar,
        Event::DownlinkNear,
        Event::DownlinkFarModified,
        Event::DownlinkNearModified,
        Event::UplinkSum,
        Event::UplinkSumModified,
        Event::UplinkFar,
        Event::UplinkNear,
        Event::Certain,
    ];

    fn is_downlink(self) -> bool {
        matches!(
            self,
            Event::DownlinkFar
                | Event::DownlinkNear
                | Event::DownlinkFarModified
                | Event::DownlinkNearModified
        )
    }

    fn is_uplink(self) -> bool {
        matches!(
            self,
            Event::UplinkSum | Event::UplinkSumModified | Event::UplinkFar | Event::UplinkNear
        )
    }
}

/// Monte Carlo outage estimate with a 95% normal-approximation interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageEstimate<T> {
    pub event_label: String,
    pub outages: u64,
    pub trials: u64,
    pub p_hat: T,
    pub half_width: T,
}

impl<T: Real> OutageEstimate<T> {
    pub fn from_counts(event_label: impl Into<String>, outages: u64, trials: u64) -> Self {
        let n = T::c(trials as f64);
        let p_hat = T::c(outages as f64) / n;
        let half_width = T::c(1.96) * (p_hat * (T::one() - p_hat) / n).sqrt();
        Self {
            event_label: event_label.into(),
            outages,
            trials,
            p_hat,
            half_width,
        }
    }

    /// True when `value` lies within `k` half-widths, or within `floor` absolutely.
    pub fn agrees_with(&self, value: T, k: T, floor: T) -> bool {
        (self.p_hat - value).abs() <= (k * self.half_width).max(floor)
    }
}

/// Aggregated output of a batch of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult<T> {
    pub estimates: Vec<OutageEstimate<T>>,
    /// Degenerate draws discarded over the batch.
    pub resamples: u64,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    counts: Vec<u64>,
    resamples: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        if self.counts.is_empty() {
            return other;
        }
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.resamples += other.resamples;
        self
    }
}

/// Event flags of pair 0 in trial `trial`.
pub fn trial_flags<T: Real>(
    config: &SystemConfig<T>,
    trial: u64,
    events: &[Event],
) -> Result<(Vec<bool>, u32)> {
    let draw = draw_trial(config, trial)?;
    let down = if events.iter().any(|e| e.is_downlink()) {
        Some(simulate_downlink_trial(config, &draw)?[0])
    } else {
        None
    };
    let up = if events.iter().any(|e| e.is_uplink()) {
        Some(simulate_uplink_trial(config, &draw)?[0])
    } else {
        None
    };
    let modified = down.map(|d| modified_outage_flags(&d, config.rho, config.delta, &config.rates));
    let flags = events
        .iter()
        .map(|e| match e {
            Event::DownlinkFar => down.map(|d| d.outage_far),
            Event::DownlinkNear => down.map(|d| d.outage_near),
            Event::DownlinkFarModified => modified.map(|f| f.far),
            Event::DownlinkNearModified => modified.map(|f| f.near),
            Event::UplinkSum => up.map(|u| u.outage_sum),
            Event::UplinkSumModified => up.map(|u| u.outage_sum_modified),
            Event::UplinkFar => up.map(|u| u.outage_far),
            Event::UplinkNear => up.map(|u| u.outage_near),
            Event::Certain => Some(true),
        })
        .map(|f| f.expect("record computed for every requested direction"))
        .collect();
    Ok((flags, draw.resamples))
}

/// Estimates every event over `config.trials` trials in parallel; the result
/// does not depend on the number of worker threads.
pub fn estimate_events<T: Real>(
    config: &SystemConfig<T>,
    events: &[Event],
) -> Result<BatchResult<T>> {
    config.validate()?;
    let tally = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let (flags, resamples) = trial_flags(config, t, events)?;
            Ok(Tally {
                counts: flags.into_iter().map(u64::from).collect(),
                resamples: u64::from(resamples),
            })
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    let counts = if tally.counts.is_empty() {
        vec![0; events.len()]
    } else {
        tally.counts
    };
    Ok(BatchResult {
        estimates: events
            .iter()
            .zip(counts)
            .map(|(e, c)| OutageEstimate::from_counts(e.label(), c, config.trials))
            .collect(),
        resamples: tally.resamples,
    })
}

pub fn estimate_outage<T: Real>(
    config: &SystemConfig<T>,
    event: Event,
) -> Result<OutageEstimate<T>> {
    Ok(estimate_events(config, &[event])?.estimates.remove(0))
}

/// Counts trials for which `predicate` holds on the full draw, in parallel.
pub fn count_trials<T: Real, F>(config: &SystemConfig<T>, predicate: F) -> Result<u64>
where
    F: Fn(&TrialDraw<T>) -> Result<bool> + Sync,
{
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let draw = draw_trial(config, t)?;
            predicate(&draw).map(u64::from)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn base_config() -> SystemConfig<f64> {
        SystemConfig {
            bs_antennas: 2,
            user_antennas: 2,
            region: Region::new(1.0, 10.0, 20.0).unwrap(),
            alpha: 3.0,
            rho: 1e12,
            rho_i: 0.0,
            density: 1e-4,
            delta: 1.0,
            rates: RateTargets::new(1.0, 1.0).unwrap(),
            allocation: AllocationMode::Fixed { far: 0.5625 },
            selection: SelectionMode::RandomX,
            truncation_radius: None,
            trials: 200,
            seed: 42,
            quadrature: QuadratureSpec::default(),
        }
    }

    #[test]
    fn validation() {
        let c = base_config();
        assert!(c.validate().is_ok());
        assert!(SystemConfig { delta: 0.5, ..c }.validate().is_err());
        assert!(SystemConfig {
            user_antennas: 1,
            ..c
        }
        .validate()
        .is_err());
        assert!(SystemConfig { trials: 0, ..c }.validate().is_err());
        assert!(SystemConfig { rho: -1.0, ..c }.validate().is_err());
    }

    #[test]
    fn certain_event() {
        let est = estimate_outage(&base_config(), Event::Certain).unwrap();
        assert_eq!(est.p_hat, 1.0);
        assert_eq!(est.half_width, 0.0);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let c = SystemConfig {
            rho: 1e10,
            ..base_config()
        };
        let a = estimate_events(&c, &[Event::DownlinkFar, Event::DownlinkNear]).unwrap();
        let b = estimate_events(&c, &[Event::DownlinkFar, Event::DownlinkNear]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn direction_mismatch_rejected() {
        let c = SystemConfig {
            allocation: AllocationMode::CognitiveUplinkCaseI,
            ..base_config()
        };
        assert!(estimate_outage(&c, Event::DownlinkFar).is_err());
    }

    #[test]
    fn sic_structure() {
        let c = SystemConfig {
            rho: 1e9,
            ..base_config()
        };
        for t in 0..50 {
            let draw = draw_trial(&c, t).unwrap();
            for r in simulate_downlink_trial(&c, &draw).unwrap() {
                if !r.outage_near {
                    assert!(!r.outage_near_sic);
                    assert!(r.sinr_near >= c.rates.eps_near() * (1.0 - OUTAGE_SLACK));
                }
            }
        }
    }
}
