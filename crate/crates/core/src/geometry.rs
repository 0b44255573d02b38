//! User placement, Poisson interferer fields and the bounded path-loss law.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cell geometry: inner disc of radius `inner_radius` for near users, ring out
/// to `outer_radius` for far users, and `min_distance` as the path-loss clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region<T> {
    pub inner_radius: T,
    pub outer_radius: T,
    pub min_distance: T,
}

impl<T: Real> Region<T> {
    pub fn new(min_distance: T, inner_radius: T, outer_radius: T) -> Result<Self> {
        let region = Self {
            inner_radius,
            outer_radius,
            min_distance,
        };
        region.validate()?;
        Ok(region)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.min_distance > T::zero()
            && self.min_distance <= self.inner_radius
            && self.inner_radius < self.outer_radius
            && self.outer_radius.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "region requires 0 < r0 <= r1 < r (got r0 = {}, r1 = {}, r = {})",
                self.min_distance, self.inner_radius, self.outer_radius
            )))
        }
    }

    /// Area of the outer ring, divided by π.
    pub fn ring_area_over_pi(&self) -> T {
        self.outer_radius * self.outer_radius - self.inner_radius * self.inner_radius
    }
}

/// Bounded path loss: `max(d, r0)^alpha`.
pub fn path_loss<T: Real>(d: T, min_distance: T, alpha: T) -> Result<T> {
    if !d.is_finite() || d < T::zero() {
        return Err(Error::domain("path_loss", format!("distance {d}")));
    }
    Ok(path_loss_unchecked(d, min_distance, alpha))
}

#[inline]
pub(crate) fn path_loss_unchecked<T: Real>(d: T, min_distance: T, alpha: T) -> T {
    if d > min_distance {
        d.powf(alpha)
    } else {
        min_distance.powf(alpha)
    }
}

/// Planar coordinates in meters, base station at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn origin() -> Self {
        Self {
            x: T::zero(),
            y: T::zero(),
        }
    }

    pub fn polar(radius: T, angle: T) -> Self {
        Self {
            x: radius * angle.cos(),
            y: radius * angle.sin(),
        }
    }

    pub fn norm(&self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point<T>) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Positions of one NOMA pair: near user `m` in the disc, far user `m'` in the ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPositions<T> {
    pub near: Point<T>,
    pub far: Point<T>,
}

impl<T: Real> PairPositions<T> {
    pub fn near_distance(&self) -> T {
        self.near.norm()
    }

    pub fn far_distance(&self) -> T {
        self.far.norm()
    }
}

fn uniform_angle<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::c(2.0) * T::PI() * T::sample_unit(rng)
}

/// Radius of a point uniform on the disc of the given radius (inverse CDF).
pub fn sample_disc_radius<T: Real, R: Rng + ?Sized>(radius: T, rng: &mut R) -> T {
    radius * T::sample_unit(rng).sqrt()
}

/// Radius of a point uniform on the ring `[inner, outer]` (inverse CDF).
pub fn sample_ring_radius<T: Real, R: Rng + ?Sized>(inner: T, outer: T, rng: &mut R) -> T {
    let u = T::sample_unit(rng);
    let r2 = inner * inner + u * (outer * outer - inner * inner);
    r2.sqrt().max(inner).min(outer)
}

/// Draws one user pair: near user uniform on the inner disc, far user uniform on the ring.
pub fn sample_user_pair_positions<T: Real, R: Rng + ?Sized>(
    region: &Region<T>,
    rng: &mut R,
) -> PairPositions<T> {
    let near_r = sample_disc_radius(region.inner_radius, rng);
    let near_a = uniform_angle(rng);
    let far_r = sample_ring_radius(region.inner_radius, region.outer_radius, rng);
    let far_a = uniform_angle(rng);
    PairPositions {
        near: Point::polar(near_r, near_a),
        far: Point::polar(far_r, far_a),
    }
}

/// One realization of the interferer PPP, truncated to a disc around the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceField<T> {
    pub points: Vec<Point<T>>,
    pub density: T,
    pub power: T,
    pub truncation_radius: T,
}

impl<T: Real> InterferenceField<T> {
    pub fn empty(power: T, truncation_radius: T) -> Self {
        Self {
            points: Vec::new(),
            density: T::zero(),
            power,
            truncation_radius,
        }
    }

    /// Aggregate received power `Σ ρ_I / L(‖p − at‖)` under the bounded path-loss law.
    pub fn aggregate_at(&self, at: &Point<T>, min_distance: T, alpha: T) -> T {
        if self.power == T::zero() {
            return T::zero();
        }
        let floor = min_distance * min_distance;
        let half = alpha / T::c(2.0);
        let gain = |q: T| -> T {
            let q = q.max(floor);
            if half == T::c(1.5) {
                T::one() / (q * q.sqrt())
            } else if half == T::c(2.0) {
                T::one() / (q * q)
            } else {
                q.powf(-half)
            }
        };
        let sum = self
            .points
            .iter()
            .map(|p| {
                let (dx, dy) = (p.x - at.x, p.y - at.y);
                gain(dx * dx + dy * dy)
            })
            .fold(T::zero(), |a, b| a + b);
        sum * self.power
    }
}

/// Samples a homogeneous PPP of the given density on the disc of radius `truncation_radius`.
/// A silent field (`power` = 0) is returned empty.
pub fn sample_interference_field<T: Real, R: Rng + ?Sized>(
    density: T,
    power: T,
    truncation_radius: T,
    rng: &mut R,
) -> Result<InterferenceField<T>> {
    if !(density >= T::zero()) || !density.is_finite() {
        return Err(Error::domain(
            "sample_interference_field",
            format!("density {density}"),
        ));
    }
    if !(truncation_radius > T::zero()) || !truncation_radius.is_finite() {
        return Err(Error::domain(
            "sample_interference_field",
            format!("truncation radius {truncation_radius}"),
        ));
    }
    let mean = (density * T::PI() * truncation_radius * truncation_radius).as_f64();
    let count = if mean > 0.0 && power != T::zero() {
        let poisson = Poisson::new(mean)
            .map_err(|e| Error::domain("sample_interference_field", e.to_string()))?;
        poisson.sample(rng) as usize
    } else {
        0
    };
    let points = (0..count)
        .map(|_| {
            let r = sample_disc_radius(truncation_radius, rng);
            Point::polar(r, uniform_angle(rng))
        })
        .collect();
    Ok(InterferenceField {
        points,
        density,
        power,
        truncation_radius,
    })
}

/// Aggregate interference of `field` at `at`.
pub fn aggregate_interference<T: Real>(
    field: &InterferenceField<T>,
    at: &Point<T>,
    min_distance: T,
    alpha: T,
) -> T {
    field.aggregate_at(at, min_distance, alpha)
}

/// Campbell mean of the aggregate interference at the origin for a PPP
/// truncated at `truncation_radius` (`None` for the full plane, needs `alpha > 2`).
pub fn mean_interference_at_origin<T: Real>(
    density: T,
    power: T,
    min_distance: T,
    alpha: T,
    truncation_radius: Option<T>,
) -> T {
    let two = T::c(2.0);
    let near = T::PI() * min_distance.powf(two - alpha);
    let tail_at = |r: T| r.powf(two - alpha) / (alpha - two);
    let far = match truncation_radius {
        Some(big_r) if big_r <= min_distance => {
            return density * power * T::PI() * big_r * big_r / min_distance.powf(alpha)
        }
        Some(big_r) => two * T::PI() * (tail_at(min_distance) - tail_at(big_r)),
        None => two * T::PI() * tail_at(min_distance),
    };
    density * power * (near + far)
}
