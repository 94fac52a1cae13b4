//! Deviation bounds from transport-entropy rates:
//!
//! `mu(A_r) <= exp[-Phi^{-1}(r - Phi(ln 1/mu(A)))]`,
//!
//! where `A_r` is the set of points at distance at least `r` from every
//! point of `A`. For half-lines on the line and distances that grow with
//! separation, `A_r` is the opposite half-line beyond the point at
//! distance `r` from the endpoint, so `mu(A_r)` is exact.

use serde::{Deserialize, Serialize};

use super::report::{InequalityKind, InequalityReport};
use crate::error::{Error, Result};
use crate::measure::PotentialMeasure;
use crate::transport::DistanceEvaluator;

/// `Phi(t) = (c t)^{1/p}`, the rate a transport-entropy inequality
/// `W_p^p <= c Ent` gives for `W_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFunction {
    pub c: f64,
    pub p: f64,
}

impl RateFunction {
    pub fn new(c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0 && p >= 1.0 && c.is_finite() && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("rate needs c > 0 and p >= 1 (got {c}, {p})")));
        }
        Ok(RateFunction { c, p })
    }

    /// `sqrt(c t)`.
    pub fn square_root(c: f64) -> Result<Self> {
        Self::new(c, 2.0)
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.c * t.max(0.0)).powf(1.0 / self.p)
    }

    /// `inf{s : Phi(s) >= u}`.
    pub fn inverse(&self, u: f64) -> f64 {
        u.max(0.0).powf(self.p) / self.c
    }
}

/// A half-line event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfLine {
    /// `(-inf, a]`.
    Below(f64),
    /// `[a, inf)`.
    Above(f64),
}

#[derive(Debug, Clone)]
pub struct DeviationSpec {
    pub rate: RateFunction,
    pub event: HalfLine,
    pub radii: Vec<f64>,
    pub distance: DistanceEvaluator,
}

/// The bound for an event of mass `e^{log_mass}` at radius `r`.
pub fn deviation_bound(rate: &RateFunction, log_mass: f64, r: f64) -> Result<f64> {
    if !(log_mass <= 0.0) {
        return Err(Error::InvalidParameter(format!("event log-mass must be <= 0, got {log_mass}")));
    }
    let threshold = rate.value(-log_mass);
    if !(r > threshold) {
        return Err(Error::RadiusTooSmall { r, threshold });
    }
    Ok((-rate.inverse(r - threshold)).exp())
}

/// Point at distance `r` from `a` on the side `dir`, or `None` if the
/// distance stays below `r`.
fn far_point(dist: &DistanceEvaluator, a: f64, dir: f64, r: f64) -> Result<Option<f64>> {
    let d = |x: f64| dist.distance_1d(a, x);
    let mut step = 1.0f64.max(a.abs() * 1e-3);
    let mut lo = a;
    let mut hi = a + dir * step;
    while d(hi)? < r {
        lo = hi;
        step *= 2.0;
        hi = a + dir * step;
        if step > 1e12 {
            return Ok(None);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if d(mid)? < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(hi))
}

/// `ln mu(A_r)` for a half-line event.
pub fn log_enlargement_mass(mu: &PotentialMeasure, event: HalfLine, r: f64, dist: &DistanceEvaluator) -> Result<f64> {
    if mu.is_radial() {
        return Err(Error::ModeUnsupported("deviation checks use half-lines on the line".into()));
    }
    match event {
        HalfLine::Below(a) => Ok(match far_point(dist, a, 1.0, r)? {
            Some(b) => mu.log_sf(b),
            None => f64::NEG_INFINITY,
        }),
        HalfLine::Above(a) => Ok(match far_point(dist, a, -1.0, r)? {
            Some(b) if b > mu.left_endpoint() => mu.log_cdf(b),
            _ => f64::NEG_INFINITY,
        }),
    }
}

/// Exact `mu(A_r)` against the bound at every radius. Radii at or below
/// the threshold are recorded with bound 1 and skipped.
pub fn deviation_check(mu: &PotentialMeasure, spec: &DeviationSpec) -> Result<InequalityReport> {
    if mu.is_radial() {
        return Err(Error::ModeUnsupported("deviation checks use half-lines on the line".into()));
    }
    let log_mass = match spec.event {
        HalfLine::Below(a) => mu.log_cdf(a),
        HalfLine::Above(a) => mu.log_sf(a),
    };
    if !(log_mass.is_finite() && log_mass < 0.0) {
        return Err(Error::InvalidParameter(format!("event mass {} must lie in (0, 1)", log_mass.exp())));
    }
    let mut rep = InequalityReport::new(InequalityKind::Deviation, None, true);
    for (k, &r) in spec.radii.iter().enumerate() {
        let lhs = log_enlargement_mass(mu, spec.event, r, &spec.distance)?.exp();
        match deviation_bound(&spec.rate, log_mass, r) {
            Ok(b) => rep.push(format!("radius:{k}"), r, lhs, b),
            Err(Error::RadiusTooSmall { .. }) => rep.push_with(format!("radius:{k}"), r, lhs, 1.0, true),
            Err(e) => return Err(e),
        }
    }
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{normalize, Potential, PotentialSpec};

    #[test]
    fn boundary_and_full_mass() {
        let rate = RateFunction::square_root(2.0).unwrap();
        let t = rate.value(2f64.ln());
        assert!((deviation_bound(&rate, -(2f64.ln()), t + 1e-9).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(deviation_bound(&rate, -(2f64.ln()), t), Err(Error::RadiusTooSmall { .. })));
        let b = deviation_bound(&rate, 0.0, 3.0).unwrap();
        assert!((b - (-4.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_half_line() {
        let g = normalize(&PotentialSpec::one_dim(Potential::gaussian(), f64::NEG_INFINITY)).unwrap();
        let spec = DeviationSpec {
            rate: RateFunction::square_root(2.0).unwrap(),
            event: HalfLine::Below(0.0),
            radii: vec![1.0, 2.0, 4.0],
            distance: DistanceEvaluator::Euclidean,
        };
        let rep = deviation_check(&g, &spec).unwrap();
        assert_eq!(rep.skipped, 1);
        assert_eq!(rep.violations, 0);
        let r = &rep.records[1];
        assert!((r.lhs - crate::special::norm_sf(2.0)).abs() < 1e-12);
    }
}
