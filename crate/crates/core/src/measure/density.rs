//! One-dimensional densities known up to a constant, with certified CDF,
//! survival function, quantiles and expectations.
//!
//! A density is given by its unnormalized log `ld(x)` on `(lower, inf)`,
//! where `lower` may be `-inf`. Construction scans outward until `ld` has
//! dropped well below its running maximum and is decreasing, integrates the
//! scanned panels adaptively, and evaluates the two far tails by doubling
//! panels taken relative to the log-density at the cut. Cumulative masses
//! are kept from both ends, so both `cdf` and `sf` retain relative accuracy
//! deep in their respective tails.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::adaptive;
use crate::roots::solve_increasing;

pub type LogDensity = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const REL_TOL: f64 = 1e-13;
const ABS_TOL: f64 = 1e-26;
const DROP: f64 = 60.0;
const FIRST_STEP: f64 = 1.0 / 16.0;
const GROWTH: f64 = 0.1;
const SCAN_LIMIT: f64 = 1e8;
const XTOL: f64 = 1e-14;

/// Relative tolerance for integrands `exp(l)` where `l` was obtained by
/// subtracting numbers of size `mag`; their rounding sets a noise floor.
fn tol_for(mag: f64) -> f64 {
    REL_TOL.max(16.0 * f64::EPSILON * mag)
}

#[derive(Clone)]
pub struct Density1D {
    ld: LogDensity,
    lower: f64,
    knots: Vec<f64>,
    shift: f64,
    cum_below: Vec<f64>,
    cum_above: Vec<f64>,
    total: f64,
    log_norm: f64,
    quad_error: f64,
}

impl fmt::Debug for Density1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density1D")
            .field("lower", &self.lower)
            .field("panels", &(self.knots.len() - 1))
            .field("core", &(self.knots[0], self.knots[self.knots.len() - 1]))
            .field("log_norm", &self.log_norm)
            .finish()
    }
}

/// Options for [`Density1D::with_options`].
#[derive(Debug, Clone, Default)]
pub struct DensityOptions {
    /// Where the two-sided scan starts when `lower = -inf`.
    pub center: f64,
    /// Extra knots, e.g. kinks of the log-density.
    pub breaks: Vec<f64>,
}

impl Density1D {
    pub fn new(ld: LogDensity, lower: f64) -> Result<Self> {
        Self::with_options(ld, lower, &DensityOptions::default())
    }

    pub fn with_options(ld: LogDensity, lower: f64, opts: &DensityOptions) -> Result<Self> {
        if lower.is_nan() || lower == f64::INFINITY {
            return Err(Error::InvalidParameter(format!("lower endpoint {lower}")));
        }
        let start = if lower.is_finite() { lower } else { opts.center };
        let mut max = f64::NEG_INFINITY;
        let v0 = ld(start);
        check_value(v0, start)?;
        max = max.max(v0);

        let reach = |dir: f64| opts.breaks.iter().map(|b| dir * (b - start)).fold(0.0, f64::max);
        let mut right = scan(&*ld, start, 1.0, reach(1.0), &mut max)?;
        let mut knots = Vec::new();
        if !lower.is_finite() {
            let mut left = scan(&*ld, start, -1.0, reach(-1.0), &mut max)?;
            left.reverse();
            knots.extend(left);
        }
        knots.push(start);
        knots.append(&mut right);
        let (lo, hi) = (knots[0], knots[knots.len() - 1]);
        for &b in &opts.breaks {
            if b > lo && b < hi {
                knots.push(b);
            }
        }
        knots.sort_by(|a, b| a.total_cmp(b));
        knots.dedup();
        refine_peaks(&*ld, &mut knots, &mut max);
        if !max.is_finite() {
            return Err(Error::NonIntegrable("log-density is -inf on the whole scan".into()));
        }

        let mut d = Density1D {
            ld,
            lower,
            knots,
            shift: max,
            cum_below: Vec::new(),
            cum_above: Vec::new(),
            total: 0.0,
            log_norm: 0.0,
            quad_error: 0.0,
        };
        let n = d.knots.len();
        let mut panels = Vec::with_capacity(n - 1);
        let tol = tol_for(d.shift.abs());
        for w in d.knots.windows(2) {
            let r = adaptive(&|x| d.weight(x), w[0], w[1], tol, ABS_TOL)?;
            d.quad_error += r.error;
            panels.push(r.value);
        }
        let left_tail = if lower.is_finite() { 0.0 } else { d.ln_tail(d.knots[0], -1.0)?.exp() };
        let right_tail = d.ln_tail(d.knots[n - 1], 1.0)?.exp();
        let mut below = Vec::with_capacity(n);
        let mut acc = left_tail;
        below.push(acc);
        for p in &panels {
            acc += p;
            below.push(acc);
        }
        let mut above = vec![0.0; n];
        let mut acc = right_tail;
        above[n - 1] = acc;
        for k in (0..n - 1).rev() {
            acc += panels[k];
            above[k] = acc;
        }
        d.total = below[n - 1] + right_tail;
        if !(d.total.is_finite() && d.total > 0.0) {
            return Err(Error::NonIntegrable(format!("total mass {}", d.total)));
        }
        d.cum_below = below;
        d.cum_above = above;
        d.log_norm = d.total.ln() + d.shift;
        Ok(d)
    }

    fn weight(&self, x: f64) -> f64 {
        let v = (self.ld)(x);
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            (v - self.shift).exp()
        }
    }

    /// `ln` of the shifted mass of `[x, inf)` (dir = 1) or `(-inf, x]` (dir = -1).
    fn ln_tail(&self, x: f64, dir: f64) -> Result<f64> {
        let base = (self.ld)(x) - self.shift;
        if base == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let g = |s: f64| {
            let v = (self.ld)(s) - self.shift - base;
            if v == f64::NEG_INFINITY {
                0.0
            } else {
                v.exp()
            }
        };
        let mut sum = 0.0;
        let mut a = x;
        let mut w = first_tail_width(&*self.ld, x, dir);
        let mut prev = base;
        let tol = tol_for(base.abs() + self.shift.abs());
        loop {
            let b = a + dir * w;
            let (lo, hi) = if dir > 0.0 { (a, b) } else { (b, a) };
            let m = adaptive(&g, lo, hi, tol, ABS_TOL)?.value;
            sum += m;
            let vb = (self.ld)(b) - self.shift;
            if vb.is_nan() || vb == f64::INFINITY {
                return Err(Error::NonIntegrable(format!("log-density {vb} at {b}")));
            }
            if m <= 1e-17 * sum && vb <= prev {
                break;
            }
            if (b - x).abs() > SCAN_LIMIT || !sum.is_finite() {
                return Err(Error::NonIntegrable(format!("tail mass does not converge beyond {x}")));
            }
            prev = vb;
            a = b;
            w *= 2.0;
        }
        Ok(sum.ln() + base)
    }

    fn panel_of(&self, x: f64) -> usize {
        let k = self.knots.partition_point(|&t| t <= x);
        k.saturating_sub(1).min(self.knots.len() - 2)
    }

    fn core(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    fn partial(&self, a: f64, b: f64) -> f64 {
        adaptive(&|x| self.weight(x), a, b, tol_for(self.shift.abs()), ABS_TOL)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    }

    /// `ln` of the shifted mass of `(lower, x]`.
    fn ln_below(&self, x: f64) -> f64 {
        let (lo, hi) = self.core();
        if x <= self.lower {
            f64::NEG_INFINITY
        } else if x < lo {
            self.ln_tail(x, -1.0).unwrap_or(f64::NAN)
        } else if x >= hi {
            let t = self.ln_tail(x, 1.0).unwrap_or(f64::NAN).exp();
            (self.total - t).ln()
        } else {
            let k = self.panel_of(x);
            (self.cum_below[k] + self.partial(self.knots[k], x)).ln()
        }
    }

    /// `ln` of the shifted mass of `[x, inf)`.
    fn ln_above(&self, x: f64) -> f64 {
        let (lo, hi) = self.core();
        if x <= self.lower {
            self.total.ln()
        } else if x < lo {
            let t = self.ln_tail(x, -1.0).unwrap_or(f64::NAN).exp();
            (self.total - t).ln()
        } else if x >= hi {
            self.ln_tail(x, 1.0).unwrap_or(f64::NAN)
        } else {
            let k = self.panel_of(x);
            (self.cum_above[k + 1] + self.partial(x, self.knots[k + 1])).ln()
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    /// `ln` of the normalizing constant `∫ e^{ld}`.
    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// Accumulated quadrature error estimate, relative to the total mass.
    pub fn quad_error(&self) -> f64 {
        self.quad_error / self.total
    }

    /// Panel boundaries of the integrated core range.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Unnormalized log-density.
    pub fn log_density_raw(&self, x: f64) -> f64 {
        if x < self.lower {
            f64::NEG_INFINITY
        } else {
            (self.ld)(x)
        }
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        self.log_density_raw(x) - self.log_norm
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    pub fn log_cdf(&self, x: f64) -> f64 {
        self.ln_below(x) - self.total.ln()
    }

    pub fn log_sf(&self, x: f64) -> f64 {
        self.ln_above(x) - self.total.ln()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.log_cdf(x).exp()
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.log_sf(x).exp()
    }

    /// Smallest `x` with `cdf(x) >= u`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::QuantileOutOfRange(u));
        }
        if u <= 0.5 {
            Ok(self.quantile_log_cdf(u.ln()))
        } else {
            Ok(self.quantile_log_sf((1.0 - u).ln()))
        }
    }

    /// Solve `log_cdf(x) = t` for `t < 0`.
    pub fn quantile_log_cdf(&self, t: f64) -> f64 {
        let target = t + self.total.ln();
        let k = self.cum_below.partition_point(|&c| c.ln() < target);
        let n = self.knots.len();
        let (lo, hi, x0) = if k == 0 {
            (self.lower, self.knots[0], self.knots[0] - 1.0)
        } else if k >= n {
            (self.knots[n - 1], f64::INFINITY, self.knots[n - 1] + 1.0)
        } else {
            let (a, b) = (self.knots[k - 1], self.knots[k]);
            let (ca, cb) = (self.cum_below[k - 1], self.cum_below[k]);
            let frac = ((target.exp() - ca) / (cb - ca)).clamp(0.0, 1.0);
            (a, b, a + frac * (b - a))
        };
        let g = |x: f64| {
            let lb = self.ln_below(x);
            (lb - target, (self.log_density_raw(x) - self.shift - lb).exp())
        };
        solve_increasing(g, x0, lo, hi, XTOL)
    }

    /// Solve `log_sf(x) = t` for `t < 0`.
    pub fn quantile_log_sf(&self, t: f64) -> f64 {
        let target = t + self.total.ln();
        // cum_above is nonincreasing
        let k = self.cum_above.partition_point(|&c| c.ln() > target);
        let n = self.knots.len();
        let (lo, hi, x0) = if k == 0 {
            (self.lower, self.knots[0], self.knots[0] - 1.0)
        } else if k >= n {
            (self.knots[n - 1], f64::INFINITY, self.knots[n - 1] + 1.0)
        } else {
            let (a, b) = (self.knots[k - 1], self.knots[k]);
            let (ca, cb) = (self.cum_above[k - 1], self.cum_above[k]);
            let frac = ((ca - target.exp()) / (ca - cb)).clamp(0.0, 1.0);
            (a, b, a + frac * (b - a))
        };
        let g = |x: f64| {
            let la = self.ln_above(x);
            (target - la, (self.log_density_raw(x) - self.shift - la).exp())
        };
        solve_increasing(g, x0, lo, hi, XTOL)
    }

    /// `E[f(X)]` under the normalized density.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let g = |x: f64| {
            let w = self.weight(x);
            if w == 0.0 {
                0.0
            } else {
                w * f(x)
            }
        };
        // panels far below the size of the whole integral need no relative accuracy
        let rule = crate::quadrature::gl20();
        let rough: f64 = self.knots.windows(2).map(|w| rule.integrate(|x| g(x).abs(), w[0], w[1])).sum();
        let floor = ABS_TOL.max(1e-15 * rough);
        let mut sum = 0.0;
        for w in self.knots.windows(2) {
            sum += adaptive(&g, w[0], w[1], tol_for(self.shift.abs()).max(1e-12), floor)?.value;
        }
        let (lo, hi) = self.core();
        sum += self.tail_integral(&g, hi, 1.0, sum, floor)?;
        if !self.lower.is_finite() {
            sum += self.tail_integral(&g, lo, -1.0, sum, floor)?;
        }
        Ok(sum / self.total)
    }

    fn tail_integral<G: Fn(f64) -> f64>(&self, g: &G, x: f64, dir: f64, scale: f64, floor: f64) -> Result<f64> {
        let mut sum = 0.0;
        let mut a = x;
        let mut w = first_tail_width(&*self.ld, x, dir);
        let mut small = 0;
        loop {
            let b = a + dir * w;
            let (lo, hi) = if dir > 0.0 { (a, b) } else { (b, a) };
            let m = adaptive(g, lo, hi, 1e-12, floor)?.value;
            sum += m;
            if m.abs() <= 1e-17 * (scale.abs() + sum.abs()) {
                small += 1;
                if small >= 2 {
                    break;
                }
            } else {
                small = 0;
            }
            if (b - x).abs() > SCAN_LIMIT || !sum.is_finite() {
                return Err(Error::QuadratureFailure(format!("tail integral does not converge beyond {x}")));
            }
            a = b;
            w *= 2.0;
        }
        Ok(sum)
    }
}

/// Initial tail panel: about 32 decay lengths of the log-density at `x`,
/// or a small fraction of `1 + |x|` where it does not decay yet.
fn first_tail_width(ld: &dyn Fn(f64) -> f64, x: f64, dir: f64) -> f64 {
    let scale = 1.0 + x.abs();
    let h = 1e-7 * scale;
    let decay = -(ld(x + dir * h) - ld(x)) / h;
    if decay.is_finite() && decay > 0.0 {
        (32.0 / decay).min(1e3 * scale)
    } else {
        1e-3 * scale
    }
}

fn check_value(v: f64, x: f64) -> Result<()> {
    if v.is_nan() || v == f64::INFINITY {
        return Err(Error::NonIntegrable(format!("log-density is {v} at {x}")));
    }
    Ok(())
}

/// Golden-section refinement of every sampled local maximum; the scan
/// steps can straddle narrow modes by far more than the panel tolerance.
fn refine_peaks(ld: &dyn Fn(f64) -> f64, knots: &mut Vec<f64>, max: &mut f64) {
    let vals: Vec<f64> = knots.iter().map(|&x| ld(x)).collect();
    let n = knots.len();
    let mut extra = Vec::new();
    for k in 0..n {
        let left = if k > 0 { vals[k - 1] } else { f64::NEG_INFINITY };
        let right = if k + 1 < n { vals[k + 1] } else { f64::NEG_INFINITY };
        if !(vals[k] >= left && vals[k] >= right && vals[k].is_finite()) {
            continue;
        }
        let mut a = if k > 0 { knots[k - 1] } else { knots[k] };
        let mut b = if k + 1 < n { knots[k + 1] } else { knots[k] };
        if b - a <= 0.0 {
            continue;
        }
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (ld(c), ld(d));
        for _ in 0..100 {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = ld(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = ld(d);
            }
            if b - a <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
                break;
            }
        }
        let (x, v) = if fc >= fd { (c, fc) } else { (d, fd) };
        if v > vals[k] && v.is_finite() {
            *max = max.max(v);
            extra.push(x);
        }
    }
    if !extra.is_empty() {
        knots.extend(extra);
        knots.sort_by(|a, b| a.total_cmp(b));
        knots.dedup();
    }
}

/// Knots from `start` in direction `dir` until the log-density has dropped
/// well below its maximum, and not before the distance `reach`. A low value
/// must be confirmed one step further, so isolated zeros do not end it.
fn scan(ld: &dyn Fn(f64) -> f64, start: f64, dir: f64, reach: f64, max: &mut f64) -> Result<Vec<f64>> {
    let mut pts = Vec::new();
    // geometric probes toward the start catch modes and singular factors there
    for j in (1..=40).rev() {
        let x = start + dir * FIRST_STEP * 0.5f64.powi(j);
        let v = ld(x);
        check_value(v, x)?;
        *max = max.max(v);
        pts.push(x);
    }
    let mut x = start;
    let mut prev = ld(start);
    loop {
        let step = FIRST_STEP.max(GROWTH * (x - start).abs());
        x += dir * step;
        if (x - start).abs() > SCAN_LIMIT {
            return Err(Error::NonIntegrable(format!(
                "log-density has not decayed by |x| = {:e}",
                SCAN_LIMIT
            )));
        }
        let v = ld(x);
        check_value(v, x)?;
        pts.push(x);
        if v > *max {
            *max = v;
        }
        if max.is_finite() && v < *max - DROP && v < prev && (x - start).abs() > reach {
            let ahead = ld(x + dir * FIRST_STEP.max(GROWTH * (x - start).abs()));
            if !(ahead >= *max - DROP) {
                break;
            }
        }
        prev = v;
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::trapezoid;
    use std::f64::consts::PI;

    fn gauss() -> Density1D {
        Density1D::new(Arc::new(|x: f64| -0.5 * x * x), f64::NEG_INFINITY).unwrap()
    }

    #[test]
    fn gaussian_normalizer() {
        let d = gauss();
        assert!((d.log_norm() - 0.5 * (2.0 * PI).ln()).abs() < 1e-12);
        assert!((d.cdf(0.0) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn exponential_closed_forms() {
        let d = Density1D::new(Arc::new(|x: f64| -x), 0.0).unwrap();
        assert!(d.log_norm().abs() < 1e-12);
        for &x in &[0.1, 1.0, 5.0, 30.0, 200.0] {
            assert!((d.log_sf(x) + x).abs() < 1e-10 * (1.0 + x), "x={x}");
        }
        assert!((d.quantile(0.5).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!((d.quantile_log_sf(-300.0) - 300.0).abs() < 1e-9);
    }

    #[test]
    fn quantile_round_trip() {
        let d = Density1D::new(Arc::new(|x: f64| -x.powi(4)), f64::NEG_INFINITY).unwrap();
        for i in 0..100 {
            let x = -1.5 + 3.0 * i as f64 / 99.0;
            let u = d.cdf(x);
            let back = d.quantile(u).unwrap();
            assert!((back - x).abs() < 1e-8, "x={x} back={back}");
        }
    }

    #[test]
    fn quartic_normalizer_against_trapezoid() {
        let d = Density1D::new(Arc::new(|x: f64| -x.powi(4)), f64::NEG_INFINITY).unwrap();
        let z = trapezoid(|x| (-x.powi(4)).exp(), -8.0, 8.0, 1_000_000);
        assert!((d.log_norm().exp() / z - 1.0).abs() < 1e-10);
    }

    #[test]
    fn expectation_of_polynomial() {
        let d = gauss();
        assert!((d.expect(|x| x * x).unwrap() - 1.0).abs() < 1e-11);
        assert!((d.expect(|x| x.powi(4)).unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn diverging_density_is_rejected() {
        let r = Density1D::new(Arc::new(|x: f64| 0.1 * x * x), f64::NEG_INFINITY);
        assert!(matches!(r, Err(Error::NonIntegrable(_))));
        let r = Density1D::new(Arc::new(|x: f64| -0.5 * (1.0 + x).ln()), 0.0);
        assert!(matches!(r, Err(Error::NonIntegrable(_))));
    }

    #[test]
    fn narrow_radial_profile() {
        let d = Density1D::new(Arc::new(|r: f64| r.ln() - 1e6 * r * r), 0.0).unwrap();
        // ∫ r e^{-c r^2} dr = 1/(2c)
        assert!((d.log_norm() - (0.5e-6f64).ln()).abs() < 1e-10);
    }
}
