//! Monotone maps pushing a measure onto its Gaussian reference.
//!
//! On the line the map is `y = G^{-1} ∘ F` with `F` the distribution function
//! of the measure and `G` that of the standard normal restricted to the same
//! half-line. In the radial cases the radius is mapped the same way against
//! the radial law of the standard Gaussian and the direction is kept.

use std::io::Write;

use super::gauss::{RadialGaussian, ReferenceLaw, TruncatedGaussian};
use crate::error::{Error, Result};
use crate::measure::PotentialMeasure;

/// Angular ratios above this are treated as unbounded.
pub const ANGULAR_LIMIT: f64 = 1e6;

const LN_HALF: f64 = -std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Line(TruncatedGaussian),
    Radial(RadialGaussian),
}

impl ReferenceLaw for Target {
    fn lower(&self) -> f64 {
        match self {
            Target::Line(g) => g.lower(),
            Target::Radial(g) => g.lower(),
        }
    }

    fn log_cdf(&self, x: f64) -> f64 {
        match self {
            Target::Line(g) => g.log_cdf(x),
            Target::Radial(g) => g.log_cdf(x),
        }
    }

    fn log_sf(&self, x: f64) -> f64 {
        match self {
            Target::Line(g) => g.log_sf(x),
            Target::Radial(g) => g.log_sf(x),
        }
    }

    fn log_pdf(&self, x: f64) -> f64 {
        match self {
            Target::Line(g) => g.log_pdf(x),
            Target::Radial(g) => g.log_pdf(x),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransportMap {
    measure: PotentialMeasure,
    target: Target,
    angular_ratio: f64,
}

/// The map of a one-dimensional measure onto the standard normal on the
/// same half-line.
pub fn build_map_1d(mu: &PotentialMeasure) -> Result<TransportMap> {
    if mu.is_radial() {
        return Err(Error::ModeUnsupported("build_map_1d needs a one-dimensional measure".into()));
    }
    let target = Target::Line(TruncatedGaussian::new(mu.left_endpoint())?);
    Ok(TransportMap { measure: mu.clone(), target, angular_ratio: 1.0 })
}

/// The radial map; fails when the angular mass ratio is numerically
/// unbounded.
pub fn build_map_radial(mu: &PotentialMeasure) -> Result<TransportMap> {
    if !mu.is_radial() {
        return Err(Error::ModeUnsupported("build_map_radial needs a radial measure".into()));
    }
    let ratio = mu.angular_ratio();
    if !(ratio <= ANGULAR_LIMIT) {
        return Err(Error::AngularUnbounded { ratio, limit: ANGULAR_LIMIT });
    }
    let target = Target::Radial(RadialGaussian::new(mu.dim())?);
    Ok(TransportMap { measure: mu.clone(), target, angular_ratio: ratio })
}

/// Either map, chosen by the kind of measure.
pub fn build_map(mu: &PotentialMeasure) -> Result<TransportMap> {
    if mu.is_radial() {
        build_map_radial(mu)
    } else {
        build_map_1d(mu)
    }
}

impl TransportMap {
    pub fn measure(&self) -> &PotentialMeasure {
        &self.measure
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.target, Target::Radial(_))
    }

    /// `C(h)`, the ratio of the largest to the smallest angular mass; 1 on
    /// the line and for purely radial potentials.
    pub fn angular_ratio(&self) -> f64 {
        self.angular_ratio
    }

    /// Image of a point of the line, or of a radius.
    pub fn forward(&self, x: f64) -> f64 {
        let lo = self.measure.left_endpoint();
        if x <= lo {
            return self.target.lower();
        }
        if x == f64::INFINITY {
            return x;
        }
        let lc = self.measure.log_cdf(x);
        if lc <= LN_HALF {
            self.target.inverse_log_cdf(lc)
        } else {
            self.target.inverse_log_sf(self.measure.log_sf(x))
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        let lo = self.target.lower();
        if y <= lo {
            return self.measure.left_endpoint();
        }
        let lc = self.target.log_cdf(y);
        let d = self.measure.density();
        if lc <= LN_HALF {
            d.quantile_log_cdf(lc)
        } else {
            d.quantile_log_sf(self.target.log_sf(y))
        }
    }

    /// `ln y'(x) = ln F'(x) - ln G'(y(x))`.
    pub fn log_derivative(&self, x: f64) -> f64 {
        self.measure.log_pdf(x) - self.target.log_pdf(self.forward(x))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.log_derivative(x).exp()
    }

    /// `|G(y(x)) - F(x)|`.
    pub fn pushforward_residual(&self, x: f64) -> f64 {
        let y = self.forward(x);
        if self.measure.log_cdf(x) <= LN_HALF {
            (self.target.cdf(y) - self.measure.cdf(x)).abs()
        } else {
            (self.target.sf(y) - self.measure.sf(x)).abs()
        }
    }

    /// Image of a point given in Cartesian coordinates (radial maps), or of
    /// a one-element slice (line maps).
    pub fn map_point(&self, x: &[f64]) -> Vec<f64> {
        if !self.is_radial() {
            return vec![self.forward(x[0])];
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return vec![0.0; x.len()];
        }
        let scale = self.forward(r) / r;
        x.iter().map(|v| v * scale).collect()
    }

    /// CSV `x,y` sampled at the given points.
    pub fn write_csv<W: Write>(&self, mut out: W, xs: &[f64]) -> std::io::Result<()> {
        writeln!(out, "x,y")?;
        for &x in xs {
            writeln!(out, "{x:.16e},{:.16e}", self.forward(x))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{normalize, AngularPerturbation, AngularShape, Potential, PotentialSpec};

    #[test]
    fn gaussian_is_fixed() {
        let g = normalize(&PotentialSpec::one_dim(Potential::gaussian(), f64::NEG_INFINITY)).unwrap();
        let m = build_map_1d(&g).unwrap();
        for i in 0..=60 {
            let x = -6.0 + 0.2 * i as f64;
            assert!((m.forward(x) - x).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn truncated_gaussian_is_fixed() {
        let left = -0.5;
        let g = normalize(&PotentialSpec::one_dim(Potential::gaussian(), left)).unwrap();
        let m = build_map_1d(&g).unwrap();
        assert_eq!(m.forward(left), left);
        for i in 1..=80 {
            let x = left + 0.1 * i as f64;
            assert!((m.forward(x) - x).abs() < 1e-7, "x={x}");
        }
    }

    #[test]
    fn exponential_map_value() {
        let e = normalize(&PotentialSpec::one_dim(Potential::power(1.0, 1.0, 0.0), 0.0)).unwrap();
        let m = build_map_1d(&e).unwrap();
        let target = TruncatedGaussian::new(0.0).unwrap();
        let y = m.forward(1.0);
        assert!((target.cdf(y) - (1.0 - (-1.0f64).exp())).abs() < 1e-13);
        assert!((m.inverse(y) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn angular_ratio_and_residual() {
        let pert = AngularPerturbation { eps: 0.1, harmonic: 1, shape: AngularShape::Cos };
        let mu = normalize(&PotentialSpec::radial_angular(Potential::power(1.0, 2.0, 0.0), pert)).unwrap();
        let m = build_map_radial(&mu).unwrap();
        assert!((m.angular_ratio() - 0.2f64.exp()).abs() < 1e-12);
        for i in 1..=100 {
            let r = 0.05 * i as f64;
            assert!(m.pushforward_residual(r) < 1e-9);
        }
    }

    #[test]
    fn unbounded_angular_ratio_rejected() {
        let pert = AngularPerturbation { eps: 8.0, harmonic: 1, shape: AngularShape::Cos };
        let mu = normalize(&PotentialSpec::radial_angular(Potential::power(1.0, 2.0, 0.0), pert)).unwrap();
        assert!(matches!(build_map_radial(&mu), Err(Error::AngularUnbounded { .. })));
    }
}
