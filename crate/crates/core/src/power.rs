//! NOMA power-allocation coefficients: fixed split and the cognitive-radio rules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Channel gains below this are treated as zero.
pub const GAIN_FLOOR: f64 = 1e-300;

/// Target rates in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTargets<T> {
    /// `R_m`, near user.
    pub near: T,
    /// `R_m'`, far user.
    pub far: T,
}

impl<T: Real> RateTargets<T> {
    pub fn new(near: T, far: T) -> Result<Self> {
        if !(near >= T::zero() && far >= T::zero()) || !near.is_finite() || !far.is_finite() {
            return Err(Error::Config(format!(
                "rates must be finite and nonnegative (got {near}, {far})"
            )));
        }
        Ok(Self { near, far })
    }

    pub fn eps_near(&self) -> T {
        crate::rate_threshold(self.near)
    }

    pub fn eps_far(&self) -> T {
        crate::rate_threshold(self.far)
    }

    /// `2^{R_m + R_m'} − 1`.
    pub fn eps_sum(&self) -> T {
        crate::rate_threshold(self.near + self.far)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Fixed,
    CognitiveDownlink,
    CognitiveUplinkCaseI,
    CognitiveUplinkCaseII,
}

/// Squared power coefficients of one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation<T> {
    /// `α_m²`.
    pub near: T,
    /// `α_m'²`.
    pub far: T,
    pub mode: Mode,
}

impl<T: Real> PowerAllocation<T> {
    /// Fixed split with `α_m'² = far`, requiring `α_m² ≤ α_m'²`.
    pub fn fixed(far: T) -> Result<Self> {
        let half = T::c(0.5);
        if !(far >= half && far <= T::one()) {
            return Err(Error::Config(format!(
                "fixed allocation needs 1/2 <= a_far^2 <= 1 (got {far})"
            )));
        }
        Ok(Self {
            near: T::one() - far,
            far,
            mode: Mode::Fixed,
        })
    }

    fn split_near(near: T, mode: Mode) -> Self {
        let near = near.max(T::zero()).min(T::one());
        Self {
            near,
            far: T::one() - near,
            mode,
        }
    }

    fn split_far(far: T, mode: Mode) -> Self {
        let far = far.max(T::zero()).min(T::one());
        Self {
            near: T::one() - far,
            far,
            mode,
        }
    }

    /// `α_m'² > α_m² ε_m'`: the far user's first-stage SINR can exceed its threshold.
    pub fn is_feasible(&self, eps_far: T) -> bool {
        self.far > self.near * eps_far
    }
}

/// Fixed-allocation feasibility predicate `α_m'² > α_m² ε_m'`.
pub fn fixed_is_feasible<T: Real>(near: T, far: T, eps_far: T) -> bool {
    far > near * eps_far
}

fn is_zero_gain<T: Real>(h: T) -> bool {
    !(h >= T::c(GAIN_FLOOR))
}

/// Cognitive downlink rule: the far user gets exactly the power needed to meet
/// its rate under its realized noise and interference, the rest goes to the near user.
///
/// `v_far_norm_sqr` is `‖v_m'‖²`, `v_far_sum_sqr` is `|v_m'ᴴ1_N|²`.
pub fn cognitive_downlink_alloc<T: Real>(
    rho: T,
    gain_far: T,
    v_far_norm_sqr: T,
    v_far_sum_sqr: T,
    interference: T,
    eps_far: T,
) -> PowerAllocation<T> {
    let penalty = v_far_norm_sqr + v_far_sum_sqr * interference;
    downlink_rule(rho, gain_far, penalty, eps_far)
}

/// Cognitive downlink rule with the noise-plus-interference term replaced by 2
/// and no interference.
pub fn cognitive_downlink_alloc_simplified<T: Real>(
    rho: T,
    gain_far: T,
    eps_far: T,
) -> PowerAllocation<T> {
    downlink_rule(rho, gain_far, T::c(2.0), eps_far)
}

fn downlink_rule<T: Real>(rho: T, gain_far: T, penalty: T, eps_far: T) -> PowerAllocation<T> {
    if is_zero_gain(gain_far) {
        return PowerAllocation::split_near(T::zero(), Mode::CognitiveDownlink);
    }
    let signal = rho * gain_far;
    let near = (signal - eps_far * penalty) / ((T::one() + eps_far) * signal);
    PowerAllocation::split_near(near.max(T::zero()), Mode::CognitiveDownlink)
}

/// Uplink Case I (far user decoded first): the smallest `α_m'²` meeting the far
/// user's first-stage target, capped at 1.
pub fn cognitive_uplink_case1_alloc<T: Real>(
    rho: T,
    gain_near: T,
    gain_far: T,
    eps_far: T,
) -> PowerAllocation<T> {
    let gain_near = if is_zero_gain(gain_near) {
        T::zero()
    } else {
        gain_near
    };
    let gain_far = if is_zero_gain(gain_far) {
        T::zero()
    } else {
        gain_far
    };
    let num = eps_far + rho * eps_far * gain_near;
    let den = rho * gain_far + eps_far * rho * gain_near;
    let far = if num <= T::zero() {
        T::zero()
    } else if den <= T::zero() {
        T::one()
    } else {
        (num / den).min(T::one())
    };
    PowerAllocation::split_far(far, Mode::CognitiveUplinkCaseI)
}

/// Uplink Case II (near user decoded first): `α_m'² = min(1, ε_m'/(ρ|h_m'|²))`.
pub fn cognitive_uplink_case2_alloc<T: Real>(
    rho: T,
    gain_far: T,
    eps_far: T,
) -> PowerAllocation<T> {
    let far = if eps_far <= T::zero() {
        T::zero()
    } else if is_zero_gain(gain_far) {
        T::one()
    } else {
        (eps_far / (rho * gain_far)).min(T::one())
    };
    PowerAllocation::split_far(far, Mode::CognitiveUplinkCaseII)
}
