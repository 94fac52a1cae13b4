//! Gaussian reference laws: the standard normal restricted to `[left, inf)`
//! and the law of `|X|` for a standard Gaussian vector in `R^d`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::roots::solve_increasing;
use crate::special::{ln_gamma, ln_gamma_p, ln_gamma_q, ln_norm_cdf, ln_norm_interval, ln_norm_pdf, ln_norm_sf};

const XTOL: f64 = 1e-15;

/// A continuous law on `[lower, inf)` given through log-scale functions.
///
/// The inverses solve in log space, from the lower side for `u <= 1/2` and
/// from the upper side otherwise, so quantiles keep full relative accuracy
/// in both tails.
pub trait ReferenceLaw {
    fn lower(&self) -> f64;
    fn log_cdf(&self, x: f64) -> f64;
    fn log_sf(&self, x: f64) -> f64;
    fn log_pdf(&self, x: f64) -> f64;

    fn cdf(&self, x: f64) -> f64 {
        self.log_cdf(x).exp()
    }

    fn sf(&self, x: f64) -> f64 {
        self.log_sf(x).exp()
    }

    fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// Solve `log_cdf(x) = t`.
    fn inverse_log_cdf(&self, t: f64) -> f64 {
        if t == f64::NEG_INFINITY {
            return self.lower();
        }
        if t >= 0.0 {
            return f64::INFINITY;
        }
        let g = |x: f64| {
            let l = self.log_cdf(x);
            (l - t, (self.log_pdf(x) - l).exp())
        };
        solve_increasing(g, self.start(), self.lower(), f64::INFINITY, XTOL)
    }

    /// Solve `log_sf(x) = t`.
    fn inverse_log_sf(&self, t: f64) -> f64 {
        if t == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        if t >= 0.0 {
            return self.lower();
        }
        let g = |x: f64| {
            let l = self.log_sf(x);
            (t - l, (self.log_pdf(x) - l).exp())
        };
        solve_increasing(g, self.start(), self.lower(), f64::INFINITY, XTOL)
    }

    fn inverse(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InverseOutOfRange(u));
        }
        if u <= 0.5 {
            Ok(self.inverse_log_cdf(u.ln()))
        } else {
            Ok(self.inverse_log_sf((-u).ln_1p()))
        }
    }

    /// Starting point for the inverse iterations.
    fn start(&self) -> f64 {
        let lo = self.lower();
        if lo.is_finite() {
            lo + 1.0
        } else {
            0.0
        }
    }
}

/// Standard normal conditioned on `[left, inf)`; `left = -inf` gives the
/// standard normal itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedGaussian {
    left: f64,
    ln_mass: f64,
}

impl TruncatedGaussian {
    pub fn new(left: f64) -> Result<Self> {
        if left.is_nan() || left == f64::INFINITY {
            return Err(Error::InvalidParameter(format!("left endpoint {left}")));
        }
        let ln_mass = if left.is_finite() { ln_norm_sf(left) } else { 0.0 };
        Ok(TruncatedGaussian { left, ln_mass })
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    /// `∫_left^inf e^{-s^2/2} ds`.
    pub fn normalizer(&self) -> f64 {
        (2.0 * PI).sqrt() * self.ln_mass.exp()
    }
}

impl ReferenceLaw for TruncatedGaussian {
    fn lower(&self) -> f64 {
        self.left
    }

    fn log_cdf(&self, x: f64) -> f64 {
        if x <= self.left {
            f64::NEG_INFINITY
        } else if self.left.is_finite() {
            ln_norm_interval(self.left, x) - self.ln_mass
        } else {
            ln_norm_cdf(x)
        }
    }

    fn log_sf(&self, x: f64) -> f64 {
        if x <= self.left {
            0.0
        } else {
            ln_norm_sf(x) - self.ln_mass
        }
    }

    fn log_pdf(&self, x: f64) -> f64 {
        if x < self.left {
            f64::NEG_INFINITY
        } else {
            ln_norm_pdf(x) - self.ln_mass
        }
    }
}

/// Law of the norm of a standard Gaussian vector in `R^d`:
/// `cdf(r) = P(d/2, r^2/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGaussian {
    dim: usize,
    ln_const: f64,
}

impl RadialGaussian {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let a = dim as f64 / 2.0;
        Ok(RadialGaussian { dim, ln_const: (a - 1.0) * 2f64.ln() + ln_gamma(a) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `ln` of `2^{d/2-1} Γ(d/2)`, the normalizer of `r^{d-1} e^{-r^2/2}`.
    pub fn ln_normalizer(&self) -> f64 {
        self.ln_const
    }
}

impl ReferenceLaw for RadialGaussian {
    fn lower(&self) -> f64 {
        0.0
    }

    fn log_cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            f64::NEG_INFINITY
        } else {
            ln_gamma_p(self.dim as f64 / 2.0, 0.5 * r * r)
        }
    }

    fn log_sf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            0.0
        } else {
            ln_gamma_q(self.dim as f64 / 2.0, 0.5 * r * r)
        }
    }

    fn log_pdf(&self, r: f64) -> f64 {
        if r < 0.0 {
            return f64::NEG_INFINITY;
        }
        let jac = if self.dim == 1 { 0.0 } else { (self.dim as f64 - 1.0) * r.ln() };
        jac - 0.5 * r * r - self.ln_const
    }
}

/// The two reference laws used by the transport maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussFunctions {
    pub line: TruncatedGaussian,
    pub radial: RadialGaussian,
}

pub fn gauss_functions(left: f64, dim: usize) -> Result<GaussFunctions> {
    Ok(GaussFunctions { line: TruncatedGaussian::new(left)?, radial: RadialGaussian::new(dim)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::trapezoid;

    #[test]
    fn planar_closed_form() {
        let g = RadialGaussian::new(2).unwrap();
        let r = (2.0 * 2f64.ln()).sqrt();
        assert!((g.cdf(r) - 0.5).abs() < 1e-12);
        for &r in &[0.01, 0.5, 1.0, 3.0, 7.0] {
            assert!((g.cdf(r) - (1.0 - (-0.5 * r * r).exp())).abs() < 1e-14);
        }
        assert!((g.inverse(0.5).unwrap() - r).abs() < 1e-12);
    }

    #[test]
    fn standard_normal_symmetry() {
        let g = TruncatedGaussian::new(f64::NEG_INFINITY).unwrap();
        assert!((g.cdf(0.0) - 0.5).abs() < 1e-12);
        assert!(g.inverse(0.5).unwrap().abs() < 1e-12);
        let x = g.inverse(1e-300).unwrap();
        assert!((g.log_cdf(x) - 1e-300f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn five_dim_against_trapezoid() {
        let g = RadialGaussian::new(5).unwrap();
        let norm = g.ln_normalizer().exp();
        let v = trapezoid(|r| r.powi(4) * (-0.5 * r * r).exp(), 0.0, 2.0, 10_000_000) / norm;
        assert!((g.cdf(2.0) - v).abs() < 1e-9);
    }

    #[test]
    fn truncated_boundary_and_round_trip() {
        let g = TruncatedGaussian::new(-0.7).unwrap();
        assert_eq!(g.cdf(-0.7), 0.0);
        for &u in &[1e-12, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-10] {
            let x = g.inverse(u).unwrap();
            assert!((g.cdf(x) - u).abs() < 1e-9 * u.max(1e-3), "u={u}");
        }
        assert!(matches!(g.inverse(1.0), Err(Error::InverseOutOfRange(_))));
    }

    #[test]
    fn half_line_matches_one_dim_radial() {
        let h = TruncatedGaussian::new(0.0).unwrap();
        let r = RadialGaussian::new(1).unwrap();
        for &x in &[0.1, 1.0, 2.5, 6.0] {
            assert!((h.log_cdf(x) - r.log_cdf(x)).abs() < 1e-12);
            assert!((h.log_pdf(x) - r.log_pdf(x)).abs() < 1e-12);
        }
        assert!((h.normalizer() - (PI / 2.0).sqrt()).abs() < 1e-14);
    }
}
