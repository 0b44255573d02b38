//! Signal-alignment MIMO-NOMA: Monte Carlo link simulation and closed-form
//! outage probabilities under Poisson interference.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

// `!(x > y)` rejects NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod analytic;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod power;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Region = geometry::Region<f64>;
pub type Point = geometry::Point<f64>;
pub type InterferenceField = geometry::InterferenceField<f64>;
pub type PairChannel = channel::PairChannel<f64>;
pub type AlignedLink = channel::AlignedLink<f64>;
pub type PrecoderSet = channel::PrecoderSet<f64>;
pub type RateTargets = power::RateTargets<f64>;
pub type PowerAllocation = power::PowerAllocation<f64>;
pub type ThresholdSet = analytic::ThresholdSet<f64>;
pub type Scenario = analytic::Scenario<f64>;
pub type SystemConfig = sim::SystemConfig<f64>;
pub type OutageEstimate = sim::OutageEstimate<f64>;
pub type QuadratureSpec = special::QuadratureSpec<f64>;

/// Converts a transmit power in dBm to linear SNR against `noise_dbm`.
pub fn snr_from_dbm<T: Real>(power_dbm: T, noise_dbm: T) -> T {
    T::c(10.0).powf((power_dbm - noise_dbm) / T::c(10.0))
}

/// `2^R − 1`.
pub fn rate_threshold<T: Real>(rate: T) -> T {
    T::c(2.0).powf(rate) - T::one()
}
