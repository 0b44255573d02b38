//! Closed-form and quadrature outage probabilities, with their high-SNR forms.
//!
//! All expressions assume a unit-mean exponential effective fading gain and an
//! interferer PPP on the whole plane.

use crate::error::{Error, Result};
use crate::geometry::{path_loss_unchecked, Region};
use crate::power::RateTargets;
use crate::scalar::Real;
use crate::special::{integrate_1d, integrate_2d, lower_incomplete_gamma, QuadratureSpec, Rect};

/// Scenario parameters that enter the analytic expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario<T> {
    pub region: Region<T>,
    /// Path-loss exponent, must exceed 2.
    pub alpha: T,
    /// Linear transmit SNR `ρ`.
    pub rho: T,
    /// Linear interferer power `ρ_I`.
    pub rho_i: T,
    /// Interferer density `λ_I` per m².
    pub density: T,
    /// Interference-bound coefficient `δ`.
    pub delta: T,
    pub quadrature: QuadratureSpec<T>,
}

impl<T: Real> Scenario<T> {
    pub fn validate(&self) -> Result<()> {
        self.region.validate()?;
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
        if !(self.rho_i >= T::zero()) || !(self.density >= T::zero()) {
            return Err(Error::Config(
                "interference power and density must be nonnegative".into(),
            ));
        }
        if !(self.delta >= T::one()) {
            return Err(Error::Config(format!(
                "delta must be at least 1 (got {})",
                self.delta
            )));
        }
        self.quadrature.validate()
    }

    pub fn with_rho(&self, rho: T) -> Self {
        Self { rho, ..*self }
    }

    pub fn path_loss(&self, d: T) -> T {
        path_loss_unchecked(d, self.region.min_distance, self.alpha)
    }

    pub fn interference(&self) -> InterferenceFunctional<T> {
        InterferenceFunctional {
            density: self.density,
            power: self.rho_i,
            delta: self.delta,
            min_distance: self.region.min_distance,
            alpha: self.alpha,
        }
    }

    fn interference_free(&self) -> bool {
        self.rho_i == T::zero() || self.density == T::zero()
    }
}

/// Rate thresholds and the per-user SNR thresholds of a fixed allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSet<T> {
    pub eps_near: T,
    pub eps_far: T,
    /// `ε_m / (ρ α_m²)`.
    pub phi_near: T,
    /// `ε_m' / (ρ α_m'² − ρ α_m² ε_m')`.
    pub phi_far: T,
    /// `max(φ_m, φ_m')`.
    pub phi_tilde: T,
    /// `2^{R_m + R_m'} − 1`.
    pub eps_sum: T,
    pub feasible: bool,
}

impl<T: Real> ThresholdSet<T> {
    /// `near` and `far` are the squared power coefficients `α_m²`, `α_m'²`.
    pub fn new(rho: T, near: T, far: T, rates: &RateTargets<T>) -> Self {
        let eps_near = rates.eps_near();
        let eps_far = rates.eps_far();
        let feasible = far > near * eps_far;
        let inf = T::infinity();
        let (phi_near, phi_far) = if feasible {
            let phi_near = if eps_near == T::zero() {
                T::zero()
            } else if near > T::zero() {
                eps_near / (rho * near)
            } else {
                inf
            };
            (phi_near, eps_far / (rho * far - rho * near * eps_far))
        } else {
            (inf, inf)
        };
        Self {
            eps_near,
            eps_far,
            phi_near,
            phi_far,
            phi_tilde: phi_near.max(phi_far),
            eps_sum: rates.eps_sum(),
            feasible,
        }
    }
}

/// Laplace functional of the aggregate PPP interference under bounded path loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceFunctional<T> {
    pub density: T,
    pub power: T,
    pub delta: T,
    pub min_distance: T,
    pub alpha: T,
}

impl<T: Real> InterferenceFunctional<T> {
    /// `E[exp(−β Σ 1/L(d_j))] = exp(−πλ β^{2/α} γ(1 − 2/α, β/r0^α))`.
    pub fn laplace(&self, beta: T) -> Result<T> {
        Ok((-self.exponent(beta)?).exp())
    }

    /// Negative log of [`Self::laplace`].
    pub fn exponent(&self, beta: T) -> Result<T> {
        if self.density == T::zero() || beta == T::zero() {
            return Ok(T::zero());
        }
        let two = T::c(2.0);
        let s = T::one() - two / self.alpha;
        let g = lower_incomplete_gamma(s, beta / self.min_distance.powf(self.alpha))?;
        Ok(T::PI() * self.density * beta.powf(two / self.alpha) * g)
    }

    /// `β(x) = 2 φ δ ρ_I L(x)`.
    pub fn beta(&self, phi: T, path_loss: T) -> T {
        T::c(2.0) * phi * self.delta * self.power * path_loss
    }

    /// `φ_I(x)` for threshold `phi` at a user with path loss `path_loss`.
    pub fn at(&self, phi: T, path_loss: T) -> Result<T> {
        self.laplace(self.beta(phi, path_loss))
    }

    /// `θ̃ = 2πλδρ_I α r0^{2−α}/(α − 2)`; the small-argument slope of the
    /// exponent is `θ̃ φ L(x)`.
    pub fn theta_tilde(&self) -> T {
        let two = T::c(2.0);
        two * T::PI()
            * self.density
            * self.delta
            * self.power
            * self.alpha
            * self.min_distance.powf(two - self.alpha)
            / (self.alpha - two)
    }
}

fn ring_moment<T: Real>(region: &Region<T>, alpha: T) -> T {
    let p = alpha + T::c(2.0);
    (region.outer_radius.powf(p) - region.inner_radius.powf(p)) / (region.ring_area_over_pi() * p)
}

/// Far-user probability `P̃_m'` by quadrature; 1 when the allocation is infeasible.
pub fn lemma1_exact<T: Real>(scenario: &Scenario<T>, thresholds: &ThresholdSet<T>) -> Result<T> {
    if !thresholds.feasible {
        return Ok(T::one());
    }
    let phi = thresholds.phi_far;
    if phi == T::zero() {
        return Ok(T::zero());
    }
    let functional = scenario.interference();
    let two = T::c(2.0);
    let mut failure = None;
    let integral = integrate_1d(
        |x| {
            let l = scenario.path_loss(x);
            match functional.exponent(functional.beta(phi, l)) {
                Ok(c) => -(-(two * phi * l + c)).exp_m1() * x,
                Err(e) => {
                    failure = Some(e);
                    T::zero()
                }
            }
        },
        scenario.region.inner_radius,
        scenario.region.outer_radius,
        &scenario.quadrature,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(clamp_probability(
        two * integral.value / scenario.region.ring_area_over_pi(),
    ))
}

/// High-SNR form `2φ_m'(2 + θ̃)(r^{α+2} − r1^{α+2}) / ((r² − r1²)(α + 2))`.
pub fn lemma1_highsnr<T: Real>(scenario: &Scenario<T>, thresholds: &ThresholdSet<T>) -> T {
    if !thresholds.feasible {
        return T::one();
    }
    let two = T::c(2.0);
    let theta = scenario.interference().theta_tilde();
    two * thresholds.phi_far * (two + theta) * ring_moment(&scenario.region, scenario.alpha)
}

/// Near-user probability `P̃_m` by quadrature over the inner disc with threshold `φ̃_m`.
pub fn lemma2_exact<T: Real>(scenario: &Scenario<T>, thresholds: &ThresholdSet<T>) -> Result<T> {
    if !thresholds.feasible {
        return Ok(T::one());
    }
    let phi = thresholds.phi_tilde;
    if phi == T::zero() {
        return Ok(T::zero());
    }
    if !phi.is_finite() {
        return Ok(T::one());
    }
    let functional = scenario.interference();
    let two = T::c(2.0);
    let r0 = scenario.region.min_distance;
    let r1 = scenario.region.inner_radius;
    let complement = |l: T| -> Result<T> {
        let c = functional.exponent(functional.beta(phi, l))?;
        Ok(-(-(two * phi * l + c)).exp_m1())
    };
    let disc = complement(scenario.path_loss(r0))? * r0 * r0 / two;
    let mut failure = None;
    let outer = integrate_1d(
        |x| match complement(scenario.path_loss(x)) {
            Ok(v) => v * x,
            Err(e) => {
                failure = Some(e);
                T::zero()
            }
        },
        r0,
        r1,
        &scenario.quadrature,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(clamp_probability(two * (disc + outer.value) / (r1 * r1)))
}

/// High-SNR form `φ̃_m(2 + θ̃)(α r0^{α+2} + 2 r1^{α+2}) / (r1²(α + 2))`.
pub fn lemma2_highsnr<T: Real>(scenario: &Scenario<T>, thresholds: &ThresholdSet<T>) -> T {
    if !thresholds.feasible {
        return T::one();
    }
    let two = T::c(2.0);
    let a = scenario.alpha;
    let r0 = scenario.region.min_distance;
    let r1 = scenario.region.inner_radius;
    let theta = scenario.interference().theta_tilde();
    thresholds.phi_tilde * (two + theta) * (a * r0.powf(a + two) + two * r1.powf(a + two))
        / (r1 * r1 * (a + two))
}

/// `y^{−2/α}[γ(2/α+1, y b^α) − γ(2/α+1, y a^α)]`.
fn gamma_band<T: Real>(y: T, a: T, b: T, alpha: T) -> Result<T> {
    let two = T::c(2.0);
    let s = two / alpha + T::one();
    let hi = lower_incomplete_gamma(s, y * b.powf(alpha))?;
    let lo = lower_incomplete_gamma(s, y * a.powf(alpha))?;
    Ok(y.powf(-two / alpha) * (hi - lo))
}

/// `1 − Υ₁(y)`, computed without cancellation.
pub fn upsilon1_complement<T: Real>(region: &Region<T>, alpha: T, y: T) -> Result<T> {
    if y < T::zero() || y.is_nan() {
        return Err(Error::domain("upsilon1", format!("argument {y}")));
    }
    if y == T::zero() {
        return Ok(T::zero());
    }
    let (r1, r) = (region.inner_radius, region.outer_radius);
    let head = r * r * -(-y * r.powf(alpha)).exp_m1() - r1 * r1 * -(-y * r1.powf(alpha)).exp_m1();
    let band = gamma_band(y, r1, r, alpha)?;
    Ok(clamp_probability(
        (head - band) / region.ring_area_over_pi(),
    ))
}

/// `Υ₁(y) = (2/(r² − r1²)) ∫_{r1}^{r} e^{−y x^α} x dx`.
pub fn upsilon1<T: Real>(region: &Region<T>, alpha: T, y: T) -> Result<T> {
    Ok(T::one() - upsilon1_complement(region, alpha, y)?)
}

/// `1 − Υ₂(z)`, computed without cancellation.
pub fn upsilon2_complement<T: Real>(region: &Region<T>, alpha: T, z: T) -> Result<T> {
    if z < T::zero() || z.is_nan() {
        return Err(Error::domain("upsilon2", format!("argument {z}")));
    }
    if z == T::zero() {
        return Ok(T::zero());
    }
    let (r0, r1) = (region.min_distance, region.inner_radius);
    let c0 = -(-z * r0.powf(alpha)).exp_m1();
    let c1 = -(-z * r1.powf(alpha)).exp_m1();
    let band = gamma_band(z, r0, r1, alpha)?;
    let value = (r0 * r0 * c0 + r1 * r1 * c1 - r0 * r0 * c0 - band) / (r1 * r1);
    Ok(clamp_probability(value))
}

/// `Υ₂(z) = (2/r1²)[∫_0^{r0} e^{−z r0^α} x dx + ∫_{r0}^{r1} e^{−z x^α} x dx]`.
pub fn upsilon2<T: Real>(region: &Region<T>, alpha: T, z: T) -> Result<T> {
    Ok(T::one() - upsilon2_complement(region, alpha, z)?)
}

/// First-order coefficient of `1 − Υ₁(y)` as `y → 0`.
pub fn upsilon1_slope<T: Real>(region: &Region<T>, alpha: T) -> T {
    T::c(2.0) * ring_moment(region, alpha)
}

/// First-order coefficient of `1 − Υ₂(z)` as `z → 0`.
pub fn upsilon2_slope<T: Real>(region: &Region<T>, alpha: T) -> T {
    let two = T::c(2.0);
    let (r0, r1) = (region.min_distance, region.inner_radius);
    let p = alpha + two;
    (r0.powf(p) + two * (r1.powf(p) - r0.powf(p)) / p) / (r1 * r1)
}

/// `1 − Υ₁(y)Υ₂(z)`.
fn joint_outage<T: Real>(region: &Region<T>, alpha: T, y: T, z: T) -> Result<T> {
    let c1 = upsilon1_complement(region, alpha, y)?;
    let c2 = upsilon2_complement(region, alpha, z)?;
    Ok(clamp_probability(c1 + c2 - c1 * c2))
}

fn require_interference_free<T: Real>(scenario: &Scenario<T>, op: &'static str) -> Result<()> {
    if scenario.interference_free() {
        Ok(())
    } else {
        Err(Error::domain(
            op,
            "only defined without co-channel interference",
        ))
    }
}

/// Cognitive-radio downlink `P̃_m = 1 − Υ₁(2ε_m'/ρ) Υ₂(2ε_m(1+ε_m')/ρ)`.
pub fn lemma4_exact<T: Real>(scenario: &Scenario<T>, rates: &RateTargets<T>) -> Result<T> {
    require_interference_free(scenario, "lemma4_exact")?;
    let (y, z) = lemma4_arguments(scenario.rho, rates);
    joint_outage(&scenario.region, scenario.alpha, y, z)
}

/// High-SNR form of [`lemma4_exact`].
pub fn lemma4_highsnr<T: Real>(scenario: &Scenario<T>, rates: &RateTargets<T>) -> Result<T> {
    require_interference_free(scenario, "lemma4_highsnr")?;
    let (y, z) = lemma4_arguments(scenario.rho, rates);
    Ok(upsilon1_slope(&scenario.region, scenario.alpha) * y
        + upsilon2_slope(&scenario.region, scenario.alpha) * z)
}

fn lemma4_arguments<T: Real>(rho: T, rates: &RateTargets<T>) -> (T, T) {
    let two = T::c(2.0);
    let (e, ef) = (rates.eps_near(), rates.eps_far());
    (two * ef / rho, two * e * (T::one() + ef) / rho)
}

/// `ζ(x, y) = ε / (ρα_m²/L(x) + ρα_m'²/L(y))`.
fn zeta<T: Real>(scenario: &Scenario<T>, eps: T, near: T, far: T, x: T, y: T) -> T {
    eps / (scenario.rho * near / scenario.path_loss(x) + scenario.rho * far / scenario.path_loss(y))
}

/// Uplink sum-rate probability `P̃_s` by 2-D quadrature; `near`/`far` are `α_m²`, `α_m'²`.
pub fn uplink_sum_exact<T: Real>(
    scenario: &Scenario<T>,
    near: T,
    far: T,
    rates: &RateTargets<T>,
) -> Result<T> {
    let eps = rates.eps_sum();
    if eps == T::zero() {
        return Ok(T::zero());
    }
    if !(near + far > T::zero()) {
        return Ok(T::one());
    }
    let functional = scenario.interference();
    let region = scenario.region;
    let failure = std::cell::RefCell::new(None);
    let integrand = |y: T, x: T| {
        let z = zeta(scenario, eps, near, far, x, y);
        match functional.exponent(scenario.delta * scenario.rho_i * z) {
            Ok(c) => -(-(z + c)).exp_m1() * x * y,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                T::zero()
            }
        }
    };
    let mut total = T::zero();
    for (x0, x1) in [
        (T::zero(), region.min_distance),
        (region.min_distance, region.inner_radius),
    ] {
        let rect = Rect {
            x0: region.inner_radius,
            x1: region.outer_radius,
            y0: x0,
            y1: x1,
        };
        total = total + integrate_2d(integrand, rect, &scenario.quadrature)?.value;
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let r1 = region.inner_radius;
    Ok(clamp_probability(
        T::c(4.0) * total / (r1 * r1 * region.ring_area_over_pi()),
    ))
}

/// `ξ = ∫_{r1}^{r} ∫_0^{r1} xy / (α_m²/L(x) + α_m'²/L(y)) dx dy`.
pub fn uplink_xi<T: Real>(scenario: &Scenario<T>, near: T, far: T) -> Result<T> {
    let region = scenario.region;
    let integrand =
        |y: T, x: T| x * y / (near / scenario.path_loss(x) + far / scenario.path_loss(y));
    let mut total = T::zero();
    for (x0, x1) in [
        (T::zero(), region.min_distance),
        (region.min_distance, region.inner_radius),
    ] {
        let rect = Rect {
            x0: region.inner_radius,
            x1: region.outer_radius,
            y0: x0,
            y1: x1,
        };
        total = total + integrate_2d(integrand, rect, &scenario.quadrature)?.value;
    }
    Ok(total)
}

/// High-SNR sum-rate form `4ξε(1 + θ̃/2) / (ρ r1² (r² − r1²))` with a precomputed `ξ`.
pub fn uplink_sum_highsnr_with_xi<T: Real>(
    scenario: &Scenario<T>,
    xi: T,
    rates: &RateTargets<T>,
) -> T {
    let two = T::c(2.0);
    let r1 = scenario.region.inner_radius;
    let bracket = T::one() + scenario.interference().theta_tilde() / two;
    T::c(4.0) * xi * rates.eps_sum() * bracket
        / (scenario.rho * r1 * r1 * scenario.region.ring_area_over_pi())
}

pub fn uplink_sum_highsnr<T: Real>(
    scenario: &Scenario<T>,
    near: T,
    far: T,
    rates: &RateTargets<T>,
) -> Result<T> {
    let xi = uplink_xi(scenario, near, far)?;
    Ok(uplink_sum_highsnr_with_xi(scenario, xi, rates))
}

/// Outage pair `(far, near)` of a cognitive uplink rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseOutage<T> {
    pub far: T,
    pub near: T,
}

fn case1_arguments<T: Real>(rho: T, rates: &RateTargets<T>) -> (T, T, T) {
    let (e, ef) = (rates.eps_near(), rates.eps_far());
    (ef / rho, ef * (T::one() + e) / rho, e / rho)
}

fn case2_arguments<T: Real>(rho: T, rates: &RateTargets<T>) -> (T, T) {
    let (e, ef) = (rates.eps_near(), rates.eps_far());
    (ef / rho, e * (T::one() + ef) / rho)
}

/// Case I (far user decoded first): `(1 − Υ₁(ε_m'/ρ), 1 − Υ₁(ε_m'(1+ε_m)/ρ) Υ₂(ε_m/ρ))`.
pub fn uplink_cr_case1<T: Real>(
    scenario: &Scenario<T>,
    rates: &RateTargets<T>,
) -> Result<CaseOutage<T>> {
    require_interference_free(scenario, "uplink_cr_case1")?;
    let (yf, yn, zn) = case1_arguments(scenario.rho, rates);
    Ok(CaseOutage {
        far: upsilon1_complement(&scenario.region, scenario.alpha, yf)?,
        near: joint_outage(&scenario.region, scenario.alpha, yn, zn)?,
    })
}

pub fn uplink_cr_case1_highsnr<T: Real>(
    scenario: &Scenario<T>,
    rates: &RateTargets<T>,
) -> Result<CaseOutage<T>> {
    require_interference_free(scenario, "uplink_cr_case1_highsnr")?;
    let (yf, yn, zn) = case1_arguments(scenario.rho, rates);
    let s1 = upsilon1_slope(&scenario.region, scenario.alpha);
    let s2 = upsilon2_slope(&scenario.region, scenario.alpha);
    Ok(CaseOutage {
        far: s1 * yf,
        near: s1 * yn + s2 * zn,
    })
}

/// Case II (near user decoded first), shared by both users:
/// `1 − Υ₁(ε_m'/ρ) Υ₂(ε_m(1+ε_m')/ρ)`.
pub fn uplink_cr_case2<T: Real>(scenario: &Scenario<T>, rates: &RateTargets<T>) -> Result<T> {
    require_interference_free(scenario, "uplink_cr_case2")?;
    let (y, z) = case2_arguments(scenario.rho, rates);
    joint_outage(&scenario.region, scenario.alpha, y, z)
}

pub fn uplink_cr_case2_highsnr<T: Real>(
    scenario: &Scenario<T>,
    rates: &RateTargets<T>,
) -> Result<T> {
    require_interference_free(scenario, "uplink_cr_case2_highsnr")?;
    let (y, z) = case2_arguments(scenario.rho, rates);
    Ok(upsilon1_slope(&scenario.region, scenario.alpha) * y
        + upsilon2_slope(&scenario.region, scenario.alpha) * z)
}

/// Far-user bound under max-min detection-vector selection:
/// `2[M(θ + 2φ_m')]^K (r^{Kα+2} − r1^{Kα+2}) / ((r² − r1²)(Kα + 2))`, `K = 2N − M`.
pub fn lemma5_bound<T: Real>(
    scenario: &Scenario<T>,
    thresholds: &ThresholdSet<T>,
    bs_antennas: usize,
    user_antennas: usize,
) -> Result<T> {
    if 2 * user_antennas <= bs_antennas {
        return Err(Error::Config(format!(
            "signal alignment needs N > M/2 (N = {user_antennas}, M = {bs_antennas})"
        )));
    }
    if !thresholds.feasible {
        return Ok(T::one());
    }
    let k = T::c((2 * user_antennas - bs_antennas) as f64);
    let two = T::c(2.0);
    let m = T::c(bs_antennas as f64);
    let phi = thresholds.phi_far;
    let theta = phi * scenario.interference().theta_tilde();
    let p = k * scenario.alpha + two;
    let region = &scenario.region;
    Ok(two
        * (m * (theta + two * phi)).powf(k)
        * (region.outer_radius.powf(p) - region.inner_radius.powf(p))
        / (region.ring_area_over_pi() * p))
}

fn clamp_probability<T: Real>(p: T) -> T {
    p.max(T::zero()).min(T::one())
}
