//! Scenario files: a flat TOML layout with units in the key names.

use serde::{Deserialize, Serialize};

use sa_noma::sim::{AllocationMode, SelectionMode};
use sa_noma::{rate_threshold, QuadratureSpec, RateTargets, Region, SystemConfig};

use crate::error::{CliError, CliResult};
use crate::labels::Output;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: ScenarioSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub bs_antennas: usize,
    pub user_antennas: usize,
    pub min_distance_m: f64,
    pub inner_radius_m: f64,
    pub outer_radius_m: f64,
    pub path_loss_exponent: f64,
    pub noise_power_dbm: f64,
    pub tx_power_dbm: f64,
    /// Absent means no co-channel interference.
    #[serde(default)]
    pub interference_power_dbm: Option<f64>,
    #[serde(default)]
    pub interferer_density_per_m2: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub rate_near_bpcu: f64,
    pub rate_far_bpcu: f64,
    pub allocation: AllocationKind,
    /// `α_m'²` for the fixed allocation.
    #[serde(default)]
    pub far_power_fraction: Option<f64>,
    #[serde(default)]
    pub selection: SelectionKind,
    #[serde(default)]
    pub truncation_radius_m: Option<f64>,
}

fn default_delta() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationKind {
    Fixed,
    CognitiveDownlink,
    CognitiveDownlinkSimplified,
    CognitiveUplinkCase1,
    CognitiveUplinkCase2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionKind {
    #[default]
    Random,
    Algorithm1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    TxPowerDbm,
    InterferencePowerDbm,
    InterfererDensityPerM2,
    UserAntennas,
    /// Both rate targets at once.
    RateBpcu,
    RateNearBpcu,
    RateFarBpcu,
}

impl SweepParameter {
    pub fn key(self) -> &'static str {
        match self {
            SweepParameter::TxPowerDbm => "tx_power_dbm",
            SweepParameter::InterferencePowerDbm => "interference_power_dbm",
            SweepParameter::InterfererDensityPerM2 => "interferer_density_per_m2",
            SweepParameter::UserAntennas => "user_antennas",
            SweepParameter::RateBpcu => "rate_bpcu",
            SweepParameter::RateNearBpcu => "rate_near_bpcu",
            SweepParameter::RateFarBpcu => "rate_far_bpcu",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_trials() -> u64 {
    10_000
}

fn default_seed() -> u64 {
    1
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            seed: default_seed(),
        }
    }
}

/// A parsed scenario file plus the text it came from, for line-numbered messages.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub file: FileConfig,
    pub outputs: Vec<Output>,
    source: String,
}

/// 1-based line of the first assignment to `key`, if any.
fn line_of(source: &str, key: &str) -> Option<usize> {
    source
        .lines()
        .position(|l| {
            let t = l.trim_start();
            t.strip_prefix(key)
                .map(|rest| rest.trim_start().starts_with('='))
                .unwrap_or(false)
        })
        .map(|i| i + 1)
}

impl LoadedConfig {
    pub fn parse(source: &str) -> CliResult<Self> {
        let file: FileConfig = toml::from_str(source).map_err(|e| {
            let line = e
                .span()
                .map(|s| source[..s.start.min(source.len())].lines().count().max(1));
            match line {
                Some(l) => CliError::Validation(format!("line {l}: {}", e.message())),
                None => CliError::Validation(e.message().to_string()),
            }
        })?;
        let outputs = file
            .sweep
            .outputs
            .iter()
            .map(|s| Output::parse(s))
            .collect::<Option<Vec<_>>>();
        let loaded = Self {
            outputs: outputs.unwrap_or_default(),
            file,
            source: source.to_string(),
        };
        loaded.validate()?;
        Ok(loaded)
    }

    pub fn load(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn invalid(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        match line_of(&self.source, key) {
            Some(l) => CliError::Validation(format!("line {l}: {key}: {msg}")),
            None => CliError::Validation(format!("{key}: {msg}")),
        }
    }

    fn validate(&self) -> CliResult<()> {
        let s = &self.file.scenario;
        let sweep = &self.file.sweep;
        if sweep.values.is_empty() {
            return Err(self.invalid("values", "sweep grid is empty"));
        }
        if sweep.values.iter().any(|v| !v.is_finite()) {
            return Err(self.invalid("values", "sweep values must be finite"));
        }
        if sweep.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(self.invalid("values", "sweep values must be strictly increasing"));
        }
        if sweep.outputs.is_empty() {
            return Err(self.invalid("outputs", "no outputs requested"));
        }
        if let Some(bad) = sweep.outputs.iter().find(|o| Output::parse(o).is_none()) {
            return Err(self.invalid("outputs", format!("unknown output label `{bad}`")));
        }
        if s.bs_antennas == 0 {
            return Err(self.invalid("bs_antennas", "must be at least 1"));
        }
        let antennas: Vec<usize> = if sweep.parameter == SweepParameter::UserAntennas {
            if sweep.values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
                return Err(self.invalid("values", "antenna counts must be positive integers"));
            }
            sweep.values.iter().map(|&v| v as usize).collect()
        } else {
            vec![s.user_antennas]
        };
        if let Some(n) = antennas.iter().find(|&&n| 2 * n <= s.bs_antennas) {
            return Err(self.invalid(
                "user_antennas",
                format!(
                    "signal alignment needs N > M/2 (N = {n}, M = {})",
                    s.bs_antennas
                ),
            ));
        }
        if !(s.delta >= 1.0) {
            return Err(self.invalid("delta", format!("must be at least 1 (got {})", s.delta)));
        }
        if !(s.min_distance_m > 0.0
            && s.min_distance_m <= s.inner_radius_m
            && s.inner_radius_m < s.outer_radius_m
            && s.outer_radius_m.is_finite())
        {
            return Err(self.invalid(
                "outer_radius_m",
                "radii must satisfy 0 < min_distance_m <= inner_radius_m < outer_radius_m",
            ));
        }
        if !(s.path_loss_exponent > 2.0) || !s.path_loss_exponent.is_finite() {
            return Err(self.invalid("path_loss_exponent", "must exceed 2"));
        }
        if !(s.interferer_density_per_m2 >= 0.0) || !s.interferer_density_per_m2.is_finite() {
            return Err(self.invalid("interferer_density_per_m2", "must be nonnegative"));
        }
        if !(s.rate_near_bpcu >= 0.0) || !(s.rate_far_bpcu >= 0.0) {
            return Err(self.invalid("rate_near_bpcu", "rates must be nonnegative"));
        }
        match (s.allocation, s.far_power_fraction) {
            (AllocationKind::Fixed, None) => {
                return Err(self.invalid("allocation", "fixed allocation needs far_power_fraction"))
            }
            (AllocationKind::Fixed, Some(f)) if !(0.5..=1.0).contains(&f) => {
                return Err(self.invalid("far_power_fraction", "must lie in [0.5, 1]"))
            }
            _ => {}
        }
        if let Some(r) = s.truncation_radius_m {
            if !(r >= s.outer_radius_m) || !r.is_finite() {
                return Err(self.invalid("truncation_radius_m", "must be at least outer_radius_m"));
            }
        }
        if self.file.run.trials == 0 {
            return Err(self.invalid("trials", "must be at least 1"));
        }
        for &v in &sweep.values {
            let system = self.system_at(v, None, None)?;
            system.validate()?;
            if let Some(reason) = self
                .outputs
                .iter()
                .find_map(|o| o.incompatibility(system.allocation))
            {
                return Err(self.invalid("outputs", reason));
            }
        }
        Ok(())
    }

    /// The simulator configuration at one grid value.
    pub fn system_at(
        &self,
        value: f64,
        trials: Option<u64>,
        seed: Option<u64>,
    ) -> CliResult<SystemConfig> {
        let s = &self.file.scenario;
        let mut tx = s.tx_power_dbm;
        let mut interference = s.interference_power_dbm;
        let mut density = s.interferer_density_per_m2;
        let mut users = s.user_antennas;
        let (mut near_rate, mut far_rate) = (s.rate_near_bpcu, s.rate_far_bpcu);
        match self.file.sweep.parameter {
            SweepParameter::TxPowerDbm => tx = value,
            SweepParameter::InterferencePowerDbm => interference = Some(value),
            SweepParameter::InterfererDensityPerM2 => density = value,
            SweepParameter::UserAntennas => users = value as usize,
            SweepParameter::RateBpcu => (near_rate, far_rate) = (value, value),
            SweepParameter::RateNearBpcu => near_rate = value,
            SweepParameter::RateFarBpcu => far_rate = value,
        }
        let allocation = match s.allocation {
            AllocationKind::Fixed => AllocationMode::Fixed {
                far: s.far_power_fraction.unwrap_or(1.0),
            },
            AllocationKind::CognitiveDownlink => AllocationMode::CognitiveDownlink,
            AllocationKind::CognitiveDownlinkSimplified => {
                AllocationMode::CognitiveDownlinkSimplified
            }
            AllocationKind::CognitiveUplinkCase1 => AllocationMode::CognitiveUplinkCaseI,
            AllocationKind::CognitiveUplinkCase2 => AllocationMode::CognitiveUplinkCaseII,
        };
        Ok(SystemConfig {
            bs_antennas: s.bs_antennas,
            user_antennas: users,
            region: Region::new(s.min_distance_m, s.inner_radius_m, s.outer_radius_m)?,
            alpha: s.path_loss_exponent,
            rho: sa_noma::snr_from_dbm(tx, s.noise_power_dbm),
            rho_i: interference.map_or(0.0, |p| sa_noma::snr_from_dbm(p, s.noise_power_dbm)),
            density,
            delta: s.delta,
            rates: RateTargets::new(near_rate, far_rate)?,
            allocation,
            selection: match s.selection {
                SelectionKind::Random => SelectionMode::RandomX,
                SelectionKind::Algorithm1 => SelectionMode::Algorithm1,
            },
            truncation_radius: s.truncation_radius_m,
            trials: trials.unwrap_or(self.file.run.trials),
            seed: seed.unwrap_or(self.file.run.seed),
            quadrature: QuadratureSpec::default(),
        })
    }
}

/// `2^R − 1`, re-exported for callers that report thresholds.
pub fn threshold(rate: f64) -> f64 {
    rate_threshold(rate)
}
