//! Super Poincaré rates from Gaussian-type moments,
//!
//! `beta(r) = c0 inf_{0 < r1 < r} r1 inf_{s > 0} s^{-1} h(2K + 12/s) e^{s/r1 - 1}`,
//!
//! with `h(t) = mu(e^{t rho^2})`. For fixed `s` the inner map
//! `r1 -> ln r1 + s/r1` is minimized at `r1 = s`, so the `r1` infimum is
//! taken in closed form: `ln s + 1` when `s <= r`, else `ln r + s/r`. What
//! remains is a one-dimensional search in `ln s` on a log grid, refined by
//! golden section around the best grid point.

use std::cell::RefCell;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::beta::BetaProfile;
use crate::error::{Error, Result};
use crate::measure::{MomentMode, PotentialMeasure};

/// Search grid for `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentGrid {
    pub s_min: f64,
    pub s_max: f64,
    pub points: usize,
    /// Golden-section polish around the best grid point.
    pub refine: bool,
}

impl Default for MomentGrid {
    fn default() -> Self {
        MomentGrid { s_min: 1e-4, s_max: 1e4, points: 40, refine: true }
    }
}

struct MomentCache<'a> {
    mu: &'a PotentialMeasure,
    k: f64,
    memo: RefCell<HashMap<u64, f64>>,
}

impl MomentCache<'_> {
    /// `ln h(2K + 12/s) - ln s` at `u = ln s`.
    fn head(&self, u: f64) -> Result<f64> {
        if let Some(v) = self.memo.borrow().get(&u.to_bits()) {
            return Ok(*v);
        }
        let t = 2.0 * self.k + 12.0 * (-u).exp();
        // a moment too large to integrate never attains the infimum
        let v = match self.mu.exp_moment(t, 2.0, MomentMode::Single) {
            Ok(m) if m.finite => m.log_value - u,
            Ok(_) | Err(Error::QuadratureFailure(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        self.memo.borrow_mut().insert(u.to_bits(), v);
        Ok(v)
    }
}

/// `ln(beta(r) / c0)` contribution of a given `u = ln s`.
fn objective(head: f64, u: f64, ln_r: f64) -> f64 {
    let tail = if u <= ln_r { u + 1.0 } else { ln_r + (u - ln_r).exp() };
    head + tail - 1.0
}

/// Tabulated rate on `r_grid` (increasing). Entries whose every probe
/// diverges are `+inf`; if all are, the result is [`Error::AllInfinite`].
pub fn beta_from_moments(
    mu: &PotentialMeasure,
    k: f64,
    c0: f64,
    r_grid: &[f64],
    grid: &MomentGrid,
) -> Result<BetaProfile> {
    if !(k >= 0.0 && c0 > 0.0) {
        return Err(Error::InvalidParameter(format!("need K >= 0 and c0 > 0 (got {k}, {c0})")));
    }
    if r_grid.is_empty() || r_grid[0] <= 0.0 || r_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("radius grid must be positive and increasing".into()));
    }
    if !(grid.s_min > 0.0 && grid.s_max > grid.s_min && grid.points >= 2) {
        return Err(Error::InvalidParameter("s grid needs 0 < s_min < s_max and at least 2 points".into()));
    }
    let cache = MomentCache { mu, k, memo: RefCell::new(HashMap::new()) };
    let (a, b) = (grid.s_min.ln(), grid.s_max.ln());
    let us: Vec<f64> = (0..grid.points).map(|j| a + (b - a) * j as f64 / (grid.points - 1) as f64).collect();
    let heads = us.iter().map(|&u| cache.head(u)).collect::<Result<Vec<_>>>()?;
    let mut log_beta = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let ln_r = r.ln();
        let vals: Vec<f64> = us.iter().zip(&heads).map(|(&u, &h)| objective(h, u, ln_r)).collect();
        let (j, best) = vals
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (j, &v)| if v < acc.1 { (j, v) } else { acc });
        let mut value = best;
        if grid.refine && best.is_finite() {
            let lo = us[j.saturating_sub(1)];
            let hi = us[(j + 1).min(us.len() - 1)];
            let f = |u: f64| cache.head(u).map(|h| objective(h, u, ln_r));
            value = value.min(golden_min(&f, lo, hi)?);
        }
        log_beta.push(c0.ln() + value);
    }
    if log_beta.iter().all(|v| *v == f64::INFINITY) {
        return Err(Error::AllInfinite);
    }
    BetaProfile::table(r_grid.to_vec(), log_beta)
}

fn golden_min<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64) -> Result<f64> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-5 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(fc.min(fd))
}

/// The smallest `c > 0` with `ln beta(r) <= c (1 + r^{-1/delta})` at every
/// finite table entry, returned as the exp-power profile.
pub fn fit_exp_power(beta: &BetaProfile, delta: f64) -> Result<BetaProfile> {
    let BetaProfile::Table { r, log_beta } = beta else {
        return Err(Error::InvalidParameter("fit needs a tabulated rate".into()));
    };
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("fit needs delta > 0, got {delta}")));
    }
    let mut c = f64::MIN_POSITIVE;
    for (&x, &lb) in r.iter().zip(log_beta) {
        if lb.is_finite() {
            c = c.max(lb / (1.0 + x.powf(-1.0 / delta)));
        }
    }
    if log_beta.iter().all(|v| !v.is_finite()) {
        return Err(Error::AllInfinite);
    }
    BetaProfile::exp_power(c, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{normalize, Potential, PotentialSpec};

    #[test]
    fn closed_form_r1_infimum() {
        // ln r1 + s / r1 over r1 in (0, r]
        for &(s, r) in &[(0.5f64, 2.0f64), (3.0, 2.0), (1.0, 1.0)] {
            let brute = (1..=20000)
                .map(|k| r * k as f64 / 20000.0)
                .map(|r1| r1.ln() + s / r1)
                .fold(f64::INFINITY, f64::min);
            let exact = objective(0.0, s.ln(), r.ln()) + 1.0;
            assert!((brute - exact).abs() < 1e-6, "s={s} r={r}");
        }
    }

    #[test]
    fn gaussian_needs_large_s() {
        let g = normalize(&PotentialSpec::one_dim(Potential::gaussian(), f64::NEG_INFINITY)).unwrap();
        let grid = MomentGrid { s_min: 1e-3, s_max: 10.0, points: 8, refine: false };
        // h(12/s) is infinite for s <= 24
        assert!(matches!(beta_from_moments(&g, 0.0, 1.0, &[0.1, 1.0], &grid), Err(Error::AllInfinite)));
    }

    #[test]
    fn quartic_rate_decreases() {
        let m = normalize(&PotentialSpec::one_dim(Potential::power(1.0, 4.0, 0.0), f64::NEG_INFINITY)).unwrap();
        let rs = [1e-3, 1e-2, 1e-1];
        let grid = MomentGrid { points: 12, ..MomentGrid::default() };
        let t = beta_from_moments(&m, 0.0, 1.0, &rs, &grid).unwrap();
        let lb: Vec<f64> = rs.iter().map(|&r| t.log_value(r)).collect();
        assert!(lb[0] > lb[1] && lb[1] > lb[2]);
        let fit = fit_exp_power(&t, 1.5).unwrap();
        for &r in &rs {
            assert!(t.log_value(r) <= fit.log_value(r) * (1.0 + 1e-12));
        }
    }
}
