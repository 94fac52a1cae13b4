//! Weight profiles `alpha` for weighted log-Sobolev inequalities
//! `Ent(f^2) <= C mu(alpha |grad f|^2)`.
//!
//! Four constructions are provided:
//!
//! - from the line transport map, `alpha = (G'(y(x)) / F'(x))^2`;
//! - from the radial transport map, through the max-formula comparing the
//!   radial stretch `r^2 / ybar^2` with the squared inverse derivative;
//! - from a super Poincaré rate `beta`, as the tail supremum
//!   `alpha(s) = sup { eta(t) : t >= 1 / mu(rho >= s - 2) }`;
//! - the power envelope `c (1 + rho)^{2 - theta}`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::gauss::ReferenceLaw;
use super::map::{build_map_1d, build_map_radial, Target, TransportMap};
use crate::error::{Error, Result};
use crate::funcineq::BetaProfile;
use crate::measure::PotentialMeasure;

/// Radii below this use the finite limit of the radial formula at 0.
pub const R_MIN: f64 = 1e-6;

/// Log grid for `eta`: 40 points per decade on `[1, 1e16]` or further.
const ETA_PER_DECADE: usize = 40;
const ETA_DECADES: usize = 16;
const ETA_MAX_DECADES: usize = 300;

/// Which construction produced a profile. The short aliases are accepted in
/// configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    #[serde(alias = "thm411")]
    LineTransport,
    #[serde(alias = "thm412")]
    RadialTransport,
    #[serde(alias = "thm11")]
    TailSup,
    #[serde(alias = "cor413", alias = "cor413_envelope")]
    PowerEnvelope,
    Constant,
}

impl WeightSource {
    pub fn name(&self) -> &'static str {
        match self {
            WeightSource::LineTransport => "line_transport",
            WeightSource::RadialTransport => "radial_transport",
            WeightSource::TailSup => "tail_sup",
            WeightSource::PowerEnvelope => "power_envelope",
            WeightSource::Constant => "constant",
        }
    }
}

#[derive(Debug, Clone)]
enum Inner {
    Line(TransportMap),
    Radial {
        map: TransportMap,
        eps_grid: Option<Vec<f64>>,
        origin_limit: f64,
    },
    TailSup {
        measure: PotentialMeasure,
        beta: BetaProfile,
        ln_t: Vec<f64>,
        suffix_max: Vec<f64>,
    },
    Envelope {
        measure: PotentialMeasure,
        c: f64,
        exponent: f64,
    },
    Constant(f64),
}

#[derive(Debug, Clone)]
pub struct WeightProfile {
    source: WeightSource,
    inner: Inner,
}

/// `inf_{eps > 0} max{(1 + eps) b, a + (1 + 1/eps) g}`, or the minimum over
/// `eps_grid` when one is given.
///
/// The first branch increases in `eps` and the second decreases, so the
/// infimum sits where they cross: `b e^2 + (b - a - g) e - g = 0`. With
/// `g = 0` it is `max(a, b)`.
pub fn radial_inf(a: f64, b: f64, g: f64, eps_grid: Option<&[f64]>) -> f64 {
    let at = |e: f64| ((1.0 + e) * b).max(a + (1.0 + 1.0 / e) * g);
    if let Some(grid) = eps_grid {
        return grid.iter().map(|&e| at(e)).fold(f64::INFINITY, f64::min);
    }
    if g <= 0.0 {
        return a.max(b);
    }
    let q = b - a - g;
    let e = (-q + (q * q + 4.0 * b * g).sqrt()) / (2.0 * b);
    (1.0 + e) * b
}

/// Profile of the line map: `alpha(x) = (G'(y(x)) / F'(x))^2`.
pub fn weight_1d(mu: &PotentialMeasure) -> Result<WeightProfile> {
    let map = build_map_1d(mu)?;
    Ok(WeightProfile { source: WeightSource::LineTransport, inner: Inner::Line(map) })
}

/// Profile of the radial map, `C(h)` times the infimum over `eps` of the
/// max-formula; `eps_grid = None` takes the exact infimum.
///
/// For the supported potentials `V_r(r) + eps g(angle)` the radial
/// distribution function does not depend on the angle, so its angular
/// gradient term vanishes.
pub fn weight_radial(mu: &PotentialMeasure, eps_grid: Option<Vec<f64>>) -> Result<WeightProfile> {
    let map = build_map_radial(mu)?;
    if let Some(g) = &eps_grid {
        if g.is_empty() || g.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidParameter("eps grid must be non-empty and positive".into()));
        }
    }
    let d = mu.dim() as f64;
    let ln_h = mu.density().log_norm();
    let ln_norm = match map.target() {
        Target::Radial(g) => g.ln_normalizer(),
        Target::Line(_) => unreachable!("radial map"),
    };
    let origin_limit = (2.0 / d * (ln_h - mu.potential_at(0.0) - ln_norm)).exp();
    if !origin_limit.is_finite() {
        return Err(Error::DegenerateAtOrigin { r_min: R_MIN });
    }
    Ok(WeightProfile { source: WeightSource::RadialTransport, inner: Inner::Radial { map, eps_grid, origin_limit } })
}

/// Profile built from a super Poincaré rate.
///
/// `eta` is tabulated on a log grid over `[1, 1e16]`; it must not increase
/// over the last two decades, otherwise it is reported unbounded. Beyond the
/// grid `eta` is then decreasing and the supremum over `t >= T` is `eta(T)`.
/// For `exp[c (1 + r^{-1/delta})]`, `eta(s) = ln(2s)` until `ln(s/2) = 2c`,
/// so the grid is extended two decades past that point.
pub fn weight_from_beta(mu: &PotentialMeasure, beta: &BetaProfile) -> Result<WeightProfile> {
    let decades = match beta {
        BetaProfile::ExpPower { c, .. } => {
            let knee = (2.0 * c + std::f64::consts::LN_2) / std::f64::consts::LN_10;
            ETA_DECADES.max(knee.ceil() as usize + 2).min(ETA_MAX_DECADES)
        }
        BetaProfile::Table { .. } => ETA_DECADES,
    };
    let n = ETA_PER_DECADE * decades;
    let step = std::f64::consts::LN_10 / ETA_PER_DECADE as f64;
    let mut ln_t: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
    let mut eta: Vec<f64> = ln_t.iter().map(|&l| beta.eta_log(l)).collect();
    if let Some(k) = eta.iter().position(|v| !v.is_finite()) {
        return Err(Error::EtaUnbounded { at: ln_t[k].exp() });
    }
    let tail_start = n - 2 * ETA_PER_DECADE;
    if eta[tail_start..].windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12)) {
        return Err(Error::EtaUnbounded { at: ln_t[n].exp() });
    }
    // refine interior local maxima so the table holds the true peaks
    let peaks: Vec<(f64, f64)> = (1..n)
        .filter(|&k| eta[k] >= eta[k - 1] && eta[k] >= eta[k + 1] && eta[k] > 0.0)
        .map(|k| golden_max(|l| beta.eta_log(l), ln_t[k - 1], ln_t[k + 1]))
        .collect();
    for (l, v) in peaks {
        let k = ln_t.partition_point(|&t| t < l);
        ln_t.insert(k, l);
        eta.insert(k, v);
    }
    let mut suffix_max = eta;
    for k in (0..suffix_max.len() - 1).rev() {
        suffix_max[k] = suffix_max[k].max(suffix_max[k + 1]);
    }
    Ok(WeightProfile {
        source: WeightSource::TailSup,
        inner: Inner::TailSup { measure: mu.clone(), beta: beta.clone(), ln_t, suffix_max },
    })
}

/// Maximizer and maximum of a unimodal function on `[a, b]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `c (1 + rho(o, x))^{2 - theta}`; `theta` defaults to the power of the
/// potential.
pub fn weight_envelope(mu: &PotentialMeasure, c: f64, theta: Option<f64>) -> Result<WeightProfile> {
    let theta = match theta.or_else(|| mu.potential().power_params().map(|p| p.1)) {
        Some(t) => t,
        None => return Err(Error::InvalidParameter("envelope weight needs theta for expression potentials".into())),
    };
    if !(c > 0.0 && theta > 0.0) {
        return Err(Error::InvalidParameter(format!("envelope needs c > 0, theta > 0 (got {c}, {theta})")));
    }
    Ok(WeightProfile {
        source: WeightSource::PowerEnvelope,
        inner: Inner::Envelope { measure: mu.clone(), c, exponent: 2.0 - theta },
    })
}

impl WeightProfile {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("constant weight {c}")));
        }
        Ok(WeightProfile { source: WeightSource::Constant, inner: Inner::Constant(c) })
    }

    pub fn source(&self) -> WeightSource {
        self.source
    }

    /// The map behind a transport profile.
    pub fn map(&self) -> Option<&TransportMap> {
        match &self.inner {
            Inner::Line(m) => Some(m),
            Inner::Radial { map, .. } => Some(map),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.inner, Inner::Constant(_))
    }

    /// `alpha` at a point of the line, or at radius `x` for radial measures.
    pub fn value(&self, x: f64) -> f64 {
        match &self.inner {
            Inner::Line(map) => {
                let y = map.forward(x);
                (2.0 * (map.target().log_pdf(y) - map.measure().log_pdf(x))).exp()
            }
            Inner::Radial { map, eps_grid, origin_limit } => {
                let ch = map.angular_ratio();
                if x < R_MIN {
                    return ch * origin_limit;
                }
                let y = map.forward(x);
                let stretch = (x / y) * (x / y);
                let inv = (2.0 * (map.target().log_pdf(y) - map.measure().log_pdf(x))).exp();
                ch * radial_inf(inv, stretch, 0.0, eps_grid.as_deref())
            }
            Inner::TailSup { measure, beta, ln_t, suffix_max } => {
                let s = measure.origin_distance(x);
                let ln_thresh = (-measure.log_tail_bar(s - 2.0)).max(0.0);
                let at = beta.eta_log(ln_thresh);
                let last = ln_t[ln_t.len() - 1];
                if ln_thresh > last {
                    return at;
                }
                let k = ln_t.partition_point(|&l| l < ln_thresh);
                at.max(suffix_max[k])
            }
            Inner::Envelope { measure, c, exponent } => c * (1.0 + measure.origin_distance(x)).powf(*exponent),
            Inner::Constant(c) => *c,
        }
    }

    /// Like [`value`](Self::value), but radial transport profiles report
    /// radii below [`R_MIN`] as degenerate instead of using the limit.
    pub fn value_checked(&self, x: f64) -> Result<f64> {
        if let Inner::Radial { .. } = self.inner {
            if x < R_MIN {
                return Err(Error::DegenerateAtOrigin { r_min: R_MIN });
            }
        }
        Ok(self.value(x))
    }

    /// `alpha` at a Cartesian point.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        if x.len() == 1 {
            self.value(x[0])
        } else {
            self.value(x.iter().map(|v| v * v).sum::<f64>().sqrt())
        }
    }

    /// `sup eta` for tail-supremum profiles.
    pub fn eta_sup(&self) -> Option<f64> {
        match &self.inner {
            Inner::TailSup { suffix_max, .. } => Some(suffix_max[0]),
            _ => None,
        }
    }

    /// CSV `x,alpha` sampled at the given points.
    pub fn write_csv<W: Write>(&self, mut out: W, xs: &[f64]) -> std::io::Result<()> {
        writeln!(out, "x,alpha")?;
        for &x in xs {
            writeln!(out, "{x:.16e},{:.16e}", self.value(x))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{normalize, Potential, PotentialSpec};

    #[test]
    fn gaussian_weights_are_one() {
        let g = normalize(&PotentialSpec::one_dim(Potential::gaussian(), f64::NEG_INFINITY)).unwrap();
        let w = weight_1d(&g).unwrap();
        for i in 0..=24 {
            let x = -6.0 + 0.5 * i as f64;
            assert!((w.value(x) - 1.0).abs() < 1e-7, "x={x}");
        }
        let g2 = normalize(&PotentialSpec::radial(Potential::gaussian(), 2)).unwrap();
        let w = weight_radial(&g2, None).unwrap();
        for i in 0..=50 {
            let r = 0.1 + 0.098 * i as f64;
            assert!((w.value(r) - 1.0).abs() < 1e-6, "r={r}");
        }
        assert!((w.value(1e-9) - 1.0).abs() < 1e-12);
        assert!(w.value_checked(1e-9).is_err());
    }

    #[test]
    fn exact_infimum_below_grid() {
        let grid = [0.5, 1.0, 2.0];
        for &(a, b, g) in &[(1.0, 2.0, 0.3), (3.0, 1.0, 0.5), (1.0, 1.0, 0.0), (0.2, 5.0, 1.0)] {
            let exact = radial_inf(a, b, g, None);
            let gridded = radial_inf(a, b, g, Some(&grid));
            assert!(exact <= gridded + 1e-15);
            for &e in &grid {
                assert!(gridded <= radial_inf(a, b, g, Some(&[e])));
            }
            // crossing point: both branches equal
            if g > 0.0 {
                let q = b - a - g;
                let e = (-q + (q * q + 4.0 * b * g).sqrt()) / (2.0 * b);
                assert!(((1.0 + e) * b - (a + (1.0 + 1.0 / e) * g)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_one_eta_is_bounded_but_half_is_not() {
        let g = normalize(&PotentialSpec::one_dim(Potential::gaussian(), f64::NEG_INFINITY)).unwrap();
        assert!(weight_from_beta(&g, &BetaProfile::exp_power(1.0, 1.0).unwrap()).is_ok());
        let r = weight_from_beta(&g, &BetaProfile::exp_power(1.0, 0.5).unwrap());
        assert!(matches!(r, Err(Error::EtaUnbounded { .. })));
    }

    #[test]
    fn tail_sup_is_nonincreasing_and_bounded() {
        let q = normalize(&PotentialSpec::one_dim(Potential::power(1.0, 4.0, 0.0), f64::NEG_INFINITY)).unwrap();
        let w = weight_from_beta(&q, &BetaProfile::exp_power(1.0, 1.5).unwrap()).unwrap();
        let sup = w.eta_sup().unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let s = 0.25 * i as f64;
            let v = w.value(s);
            assert!(v <= prev + 1e-15 && v <= sup + 1e-15, "s={s} v={v} prev={prev} sup={sup}");
            prev = v;
        }
    }

    #[test]
    fn envelope_formula() {
        let q = normalize(&PotentialSpec::one_dim(Potential::power(1.0, 4.0, 0.0), f64::NEG_INFINITY)).unwrap();
        let w = weight_envelope(&q, 2.0, None).unwrap();
        assert_eq!(w.value(-3.0), 2.0 / 16.0);
    }
}
