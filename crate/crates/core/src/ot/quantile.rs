//! Transport costs on the line through the monotone (quantile) coupling.
//!
//! The coupling integral `∫_0^1 c(F^{-1}(u), G^{-1}(u)) du` is split at
//! `u = 1/2` and each half is integrated in the log variable `t = ln u` or
//! `t = ln(1 - u)`, where the quantile functions are smooth. The part with
//! `u` or `1 - u` below `1e-7` is integrated separately and reported as the
//! sliver.

use super::cost::CostFn;
use super::perturbation::DensityPerturbation;
use crate::error::{Error, Result};
use crate::measure::{Density1D, GridMeasure, PotentialMeasure};
use crate::quadrature::adaptive;
use crate::transport::{RadialGaussian, ReferenceLaw, Target, TransportMap, TruncatedGaussian};

/// `u` below which (or `1 - u` below which) the integral counts as sliver.
pub const SLIVER: f64 = 1e-7;

const REL_TOL: f64 = 1e-11;
/// Absolute accuracy of the quantiles; it bounds how well a coupling
/// integral can resolve the separation of the two laws.
const GAP_RESOLUTION: f64 = 1e-12;
/// `e^t` underflows below this.
const T_FLOOR: f64 = -740.0;

/// Quantiles taken from either end in log scale.
pub trait LogQuantile {
    /// The `x` with `ln F(x) = t`.
    fn quantile_lower(&self, t: f64) -> f64;
    /// The `x` with `ln(1 - F(x)) = t`.
    fn quantile_upper(&self, t: f64) -> f64;
}

impl LogQuantile for Density1D {
    fn quantile_lower(&self, t: f64) -> f64 {
        self.quantile_log_cdf(t)
    }

    fn quantile_upper(&self, t: f64) -> f64 {
        self.quantile_log_sf(t)
    }
}

impl LogQuantile for PotentialMeasure {
    fn quantile_lower(&self, t: f64) -> f64 {
        self.density().quantile_log_cdf(t)
    }

    fn quantile_upper(&self, t: f64) -> f64 {
        self.density().quantile_log_sf(t)
    }
}

macro_rules! reference_quantiles {
    ($($ty:ty),*) => {$(
        impl LogQuantile for $ty {
            fn quantile_lower(&self, t: f64) -> f64 {
                self.inverse_log_cdf(t)
            }

            fn quantile_upper(&self, t: f64) -> f64 {
                self.inverse_log_sf(t)
            }
        }
    )*};
}

reference_quantiles!(TruncatedGaussian, RadialGaussian, Target);

/// The image of a law under a transport map.
pub struct MappedLaw<'a, L: LogQuantile + ?Sized> {
    pub law: &'a L,
    pub map: &'a TransportMap,
}

impl<L: LogQuantile + ?Sized> LogQuantile for MappedLaw<'_, L> {
    fn quantile_lower(&self, t: f64) -> f64 {
        self.map.forward(self.law.quantile_lower(t))
    }

    fn quantile_upper(&self, t: f64) -> f64 {
        self.map.forward(self.law.quantile_upper(t))
    }
}

/// Value of a quantile-coupling cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileCost {
    /// The optimal cost, with the `1/p` root for power costs.
    pub value: f64,
    /// `∫ c du` without the root.
    pub raw: f64,
    /// The contribution of `u` or `1 - u` below [`SLIVER`] to `raw`.
    pub sliver: f64,
}

impl QuantileCost {
    fn from_raw(raw: f64, sliver: f64, root: Option<f64>) -> Self {
        let value = match root {
            Some(p) => raw.max(0.0).powf(1.0 / p),
            None => raw,
        };
        QuantileCost { value, raw, sliver }
    }
}

/// Optimal cost between two laws on the line for a cost convex in `x - y`.
pub fn w_quantile_1d<A, B>(mu: &A, nu: &B, cost: &CostFn) -> Result<QuantileCost>
where
    A: LogQuantile + ?Sized,
    B: LogQuantile + ?Sized,
{
    cost.check_monotone_optimal()?;
    let gap = |z: f64| cost.of_gap(z).unwrap_or(z * z);
    let (raw, sliver) = coupling_integral(mu, nu, |x, y| cost.between_1d(x, y), gap)?;
    Ok(QuantileCost::from_raw(raw, sliver, cost.root()))
}

/// `(∫ c(F^{-1}, G^{-1}) du, sliver part)`.
///
/// `gap(z)` is the cost of a separation `z`, or a stand-in of the same
/// growth. A first coarse pass gives the typical separation `z`; the
/// absolute tolerance is then `gap(z + GAP_RESOLUTION) - gap(z)`, the
/// noise the quantiles put into the integrand.
fn coupling_integral<A, B, C, G>(mu: &A, nu: &B, c: C, gap: G) -> Result<(f64, f64)>
where
    A: LogQuantile + ?Sized,
    B: LogQuantile + ?Sized,
    C: Fn(f64, f64) -> f64,
    G: Fn(f64) -> f64,
{
    let lower = |t: f64| {
        let v = c(mu.quantile_lower(t), nu.quantile_lower(t));
        if v == 0.0 {
            0.0
        } else {
            v * t.exp()
        }
    };
    let upper = |t: f64| {
        let v = c(mu.quantile_upper(t), nu.quantile_upper(t));
        if v == 0.0 {
            0.0
        } else {
            v * t.exp()
        }
    };
    let (a, b) = (SLIVER.ln(), 0.5f64.ln());
    let rule = crate::quadrature::gl20();
    let rough = (rule.integrate(&lower, a, b) + rule.integrate(&upper, a, b)).abs();
    let z = typical_gap(&gap, rough);
    let floor = (gap(z + GAP_RESOLUTION) - gap(z)).max(gap(GAP_RESOLUTION));
    let core = adaptive(&lower, a, b, REL_TOL, floor)?.value + adaptive(&upper, a, b, REL_TOL, floor)?.value;
    let sliver = log_tail(&lower, a, core, floor)? + log_tail(&upper, a, core, floor)?;
    let raw = core + sliver;
    if !raw.is_finite() {
        return Err(Error::QuadratureFailure("coupling integral is not finite".into()));
    }
    Ok((raw, sliver))
}

/// The `z` with `gap(z) = value`, by bisection on `[0, 1e6]`.
fn typical_gap<G: Fn(f64) -> f64>(gap: &G, value: f64) -> f64 {
    if !(value > 0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1e6f64);
    if gap(hi) <= value {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if gap(mid) < value {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `∫_{-inf}^{t0} g` by doubling panels, to an absolute accuracy well
/// below `REL_TOL * scale`, but not below the noise `floor`.
fn log_tail<G: Fn(f64) -> f64>(g: &G, t0: f64, scale: f64, floor: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut hi = t0;
    let mut w = 2.0;
    let mut small = 0;
    let abs_tol = (1e-3 * REL_TOL * scale.abs()).max(floor).max(1e-300);
    while hi > T_FLOOR {
        let lo = (hi - w).max(T_FLOOR);
        let m = adaptive(g, lo, hi, REL_TOL, abs_tol)?.value;
        sum += m;
        if m.abs() <= 1e-17 * (scale.abs() + sum.abs()) {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
        hi = lo;
        w *= 2.0;
    }
    Ok(sum)
}

/// Exact monotone coupling cost between two sorted one-dimensional grids.
pub fn w_grid_1d(a: &GridMeasure, b: &GridMeasure, cost: &CostFn) -> Result<QuantileCost> {
    cost.check_monotone_optimal()?;
    if a.angles.is_some() || b.angles.is_some() || !a.is_sorted() || !b.is_sorted() {
        return Err(Error::InvalidParameter("monotone coupling needs sorted one-dimensional grids".into()));
    }
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a.masses[0], b.masses[0]);
    let mut raw = 0.0;
    loop {
        let m = ra.min(rb);
        raw += m * cost.between_1d(a.points[i], b.points[j]);
        ra -= m;
        rb -= m;
        if ra <= rb {
            i += 1;
            if i == a.len() {
                break;
            }
            ra = a.masses[i];
        } else {
            j += 1;
            if j == b.len() {
                break;
            }
            rb = b.masses[j];
        }
    }
    Ok(QuantileCost::from_raw(raw, 0.0, cost.root()))
}

/// `W_p` between the base measure and `f^2 mu` in the metric pulled back by
/// the transport map.
///
/// In mapped coordinates the base measure is the Gaussian reference and
/// `f^2 mu` is the image of its own law, so the monotone coupling of the
/// two images is optimal. For radial measures and radial `f` the radii are
/// coupled with the direction held fixed; the cost then carries the factor
/// `C(h)^{-p/2}`.
pub fn w_pullback(pert: &DensityPerturbation, map: &TransportMap, p: f64) -> Result<QuantileCost> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("pullback distance needs p >= 1, got {p}")));
    }
    if pert.base().is_radial() != map.is_radial() {
        return Err(Error::ModeUnsupported("perturbation and map live on different spaces".into()));
    }
    let image = MappedLaw { law: pert.law(), map };
    let cost = |x: f64, y: f64| {
        let z = (x - y).abs();
        if p == 2.0 {
            z * z
        } else {
            z.powf(p)
        }
    };
    let (raw, sliver) = coupling_integral(map.target(), &image, cost, |z: f64| z.powf(p))?;
    let scale = map.angular_ratio().powf(-p / 2.0);
    Ok(QuantileCost::from_raw(raw * scale, sliver * scale, Some(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{discretize, normalize, Potential, PotentialSpec, Scheme};

    #[test]
    fn gaussian_translation() {
        let g = TruncatedGaussian::new(f64::NEG_INFINITY).unwrap();
        struct Shift(TruncatedGaussian, f64);
        impl LogQuantile for Shift {
            fn quantile_lower(&self, t: f64) -> f64 {
                self.0.inverse_log_cdf(t) + self.1
            }
            fn quantile_upper(&self, t: f64) -> f64 {
                self.0.inverse_log_sf(t) + self.1
            }
        }
        let c = CostFn::power(2.0).unwrap();
        for &m in &[0.3, -1.7, 4.0] {
            let w = w_quantile_1d(&g, &Shift(g, m), &c).unwrap();
            assert!((w.value - m.abs()).abs() < 1e-8, "m={m} w={w:?}");
            assert!(w.sliver > 0.0 && w.sliver < 1e-6 * m * m);
        }
        assert_eq!(w_quantile_1d(&g, &g, &c).unwrap().value, 0.0);
    }

    #[test]
    fn grid_merge_matches_permutation() {
        let a = GridMeasure::uniform(vec![0.0, 1.0, 3.0]).unwrap();
        let b = GridMeasure::uniform(vec![-1.0, 2.0, 2.5]).unwrap();
        let w = w_grid_1d(&a, &b, &CostFn::power(2.0).unwrap()).unwrap();
        assert!((w.raw - (1.0 + 1.0 + 0.25) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn continuous_vs_fine_grid() {
        let e = normalize(&PotentialSpec::one_dim(Potential::power(1.0, 1.0, 0.0), 0.0)).unwrap();
        let t = normalize(&PotentialSpec::one_dim(Potential::power(0.5, 1.0, 0.0), 0.0)).unwrap();
        let c = CostFn::power(2.0).unwrap();
        let exact = w_quantile_1d(&e, &t, &c).unwrap();
        // exponential rates 1 and 1/2: quantiles differ by a factor 2, W2^2 = E[X^2] = 2
        assert!((exact.raw - 2.0).abs() < 1e-9);
        let ga = discretize(&e, 2000, Scheme::EqualMass).unwrap();
        let gb = discretize(&t, 2000, Scheme::EqualMass).unwrap();
        let approx = w_grid_1d(&ga, &gb, &c).unwrap();
        assert!((approx.raw / exact.raw - 1.0).abs() < 5e-3);
    }

    #[test]
    fn rho_tilde_rejected() {
        let g = TruncatedGaussian::new(f64::NEG_INFINITY).unwrap();
        let r = w_quantile_1d(&g, &g, &CostFn::RhoTildeSq { delta_exp: 1.5 });
        assert!(matches!(r, Err(Error::NonConvexCost(_))));
    }
}
