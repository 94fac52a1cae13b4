//! Normalized measures `e^V dx` with distribution functionals.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::density::{Density1D, LogDensity};
use super::potential::{MeasureKind, Potential, PotentialSpec};
use crate::error::{Error, Result};
use crate::special::{ln_gamma, log_add_exp};

/// `ln c(d)`, the log of the surface area of the unit sphere in `R^d`.
pub fn ln_sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    (2.0f64).ln() + h * PI.ln() - ln_gamma(h)
}

/// A normalized measure.
///
/// In the one-dimensional case `density` is the law on `[left_endpoint, inf)`.
/// In the radial cases it is the radial profile `r^{d-1} e^{V_r(r)}` on
/// `[0, inf)`; the additive angular term only reweights angles, so the
/// per-angle radial CDF does not depend on the angle.
#[derive(Debug, Clone)]
pub struct PotentialMeasure {
    spec: PotentialSpec,
    density: Density1D,
    log_z: f64,
    angles: Vec<f64>,
    log_h: Vec<f64>,
}

/// Outcome of an exponential moment computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpMoment {
    pub value: f64,
    pub log_value: f64,
    pub finite: bool,
}

impl ExpMoment {
    fn infinite() -> Self {
        ExpMoment { value: f64::INFINITY, log_value: f64::INFINITY, finite: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMode {
    /// `E exp(lambda * rho^p)`
    Single,
    /// `E exp(lambda * exp(p * rho))`
    Double,
}

/// Build the measure and its normalizer.
pub fn normalize(spec: &PotentialSpec) -> Result<PotentialMeasure> {
    PotentialMeasure::new(spec.clone())
}

fn profile_log_density(spec: &PotentialSpec, extra: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>) -> LogDensity {
    let pot = spec.potential.clone();
    match spec.kind {
        MeasureKind::OneDim => {
            let lower = spec.left_endpoint;
            let origin = if lower.is_finite() { lower } else { 0.0 };
            Arc::new(move |x: f64| {
                let base = pot.value(x);
                match &extra {
                    Some(e) => base + e((x - origin).abs()),
                    None => base,
                }
            })
        }
        MeasureKind::Radial | MeasureKind::RadialAngular => {
            let dm1 = spec.dim as f64 - 1.0;
            Arc::new(move |r: f64| {
                let jac = if dm1 == 0.0 { 0.0 } else { dm1 * r.ln() };
                let base = jac + pot.value(r);
                match &extra {
                    Some(e) => base + e(r),
                    None => base,
                }
            })
        }
    }
}

impl PotentialMeasure {
    pub fn new(spec: PotentialSpec) -> Result<Self> {
        spec.validate()?;
        let lower = match spec.kind {
            MeasureKind::OneDim => spec.left_endpoint,
            _ => 0.0,
        };
        let density = Density1D::new(profile_log_density(&spec, None), lower)?;
        let (angles, log_h, log_z) = match spec.kind {
            MeasureKind::OneDim => (vec![], vec![], density.log_norm()),
            MeasureKind::Radial => {
                let lh = density.log_norm();
                (vec![0.0], vec![lh], ln_sphere_area(spec.dim) + lh)
            }
            MeasureKind::RadialAngular => {
                let pert = spec.angular.expect("validated");
                let angles = spec.angles();
                let lh: Vec<f64> = angles.iter().map(|&t| density.log_norm() + pert.value(t)).collect();
                let mut acc = f64::NEG_INFINITY;
                for &v in &lh {
                    acc = log_add_exp(acc, v);
                }
                let mean = acc - (angles.len() as f64).ln();
                (angles, lh, ln_sphere_area(2) + mean)
            }
        };
        Ok(PotentialMeasure { spec, density, log_z, angles, log_h })
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn kind(&self) -> MeasureKind {
        self.spec.kind
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn potential(&self) -> &Potential {
        &self.spec.potential
    }

    pub fn left_endpoint(&self) -> f64 {
        match self.spec.kind {
            MeasureKind::OneDim => self.spec.left_endpoint,
            _ => 0.0,
        }
    }

    pub fn is_radial(&self) -> bool {
        self.spec.kind != MeasureKind::OneDim
    }

    /// The normalizing constant `Z = ∫ e^V dx`.
    pub fn z(&self) -> f64 {
        self.log_z.exp()
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    /// The one-dimensional law (1-D case) or the radial profile (radial cases).
    pub fn density(&self) -> &Density1D {
        &self.density
    }

    /// Grid angles and `ln h(angle)` (radial cases).
    pub fn angular_table(&self) -> (&[f64], &[f64]) {
        (&self.angles, &self.log_h)
    }

    /// `ln h(angle)` for any angle.
    pub fn log_h(&self, angle: f64) -> f64 {
        let base = self.density.log_norm();
        match self.spec.angular {
            Some(p) => base + p.value(angle),
            None => base,
        }
    }

    /// `C(h) = max h / min h` over the angular grid.
    pub fn angular_ratio(&self) -> f64 {
        if self.log_h.is_empty() {
            return 1.0;
        }
        let max = self.log_h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.log_h.iter().cloned().fold(f64::INFINITY, f64::min);
        (max - min).exp()
    }

    /// Distance to the reference point: `|x|` on the line, `x - left` on a
    /// half-line, `r` in the radial cases.
    pub fn origin_distance(&self, x: f64) -> f64 {
        match self.spec.kind {
            MeasureKind::OneDim if self.spec.left_endpoint.is_finite() => x - self.spec.left_endpoint,
            _ => x.abs(),
        }
    }

    /// `V` at a point of the line (1-D) or at radius `r` (radial part).
    pub fn potential_at(&self, x: f64) -> f64 {
        self.spec.potential.value(x)
    }

    /// Distribution functions of the 1-D law or of the radial profile.
    pub fn cdf(&self, x: f64) -> f64 {
        self.density.cdf(x)
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.density.sf(x)
    }

    pub fn log_cdf(&self, x: f64) -> f64 {
        self.density.log_cdf(x)
    }

    pub fn log_sf(&self, x: f64) -> f64 {
        self.density.log_sf(x)
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        self.density.quantile(u)
    }

    /// Density of the 1-D law (or of the radial profile) at `x`.
    pub fn pdf(&self, x: f64) -> f64 {
        self.density.pdf(x)
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        self.density.log_pdf(x)
    }

    /// `ln mu(rho(o, .) >= s)`.
    pub fn log_tail_bar(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self.spec.kind {
            MeasureKind::OneDim => {
                let left = self.spec.left_endpoint;
                if left.is_finite() {
                    self.density.log_sf(left + s)
                } else {
                    log_add_exp(self.density.log_sf(s), self.density.log_cdf(-s)).min(0.0)
                }
            }
            _ => self.density.log_sf(s),
        }
    }

    /// `mu(rho(o, .) >= s)`, equal to 1 for `s <= 0`.
    pub fn tail_bar(&self, s: f64) -> f64 {
        self.log_tail_bar(s).exp()
    }

    /// `E exp(lambda * rho^p)` or `E exp(lambda * e^{p rho})`.
    ///
    /// For the power family the finiteness decision is analytic: the single
    /// moment is finite iff `p < theta`, or `p = theta` and `lambda < a`;
    /// the double moment is never finite. A finite moment whose integrand
    /// peaks too far out to integrate is an error, not `infinite`.
    pub fn exp_moment(&self, lambda: f64, p: f64, mode: MomentMode) -> Result<ExpMoment> {
        if !(lambda > 0.0 && p > 0.0) {
            return Err(Error::InvalidParameter(format!("exp_moment needs lambda > 0, p > 0 (got {lambda}, {p})")));
        }
        if let Some((a, theta, _)) = self.spec.potential.power_params() {
            let finite = match mode {
                MomentMode::Single => p < theta || (p == theta && lambda < a),
                MomentMode::Double => false,
            };
            if !finite {
                return Ok(ExpMoment::infinite());
            }
        }
        if let (Some((a, theta, b)), MomentMode::Single) = (self.spec.potential.power_params(), mode) {
            if p == theta && self.origin_distance(0.0) == 0.0 {
                let spec = PotentialSpec { potential: Potential::power(a - lambda, theta, b), ..self.spec.clone() };
                let d = Density1D::new(profile_log_density(&spec, None), self.density.lower())?;
                let log_value = d.log_norm() - self.density.log_norm();
                return Ok(ExpMoment { value: log_value.exp(), log_value, finite: true });
            }
        }
        let extra: Arc<dyn Fn(f64) -> f64 + Send + Sync> = match mode {
            MomentMode::Single => Arc::new(move |rho: f64| lambda * rho.powf(p)),
            MomentMode::Double => Arc::new(move |rho: f64| lambda * (p * rho).exp()),
        };
        let ld = profile_log_density(&self.spec, Some(extra));
        let lower = self.density.lower();
        match Density1D::new(ld, lower) {
            Ok(d) => {
                let log_value = d.log_norm() - self.density.log_norm();
                Ok(ExpMoment { value: log_value.exp(), log_value, finite: true })
            }
            Err(Error::NonIntegrable(_)) if self.spec.potential.power_params().is_some() => Err(Error::QuadratureFailure(
                format!("E exp({lambda} rho^{p}) is finite but its integrand peaks beyond the quadrature range"),
            )),
            Err(Error::NonIntegrable(_)) => Ok(ExpMoment::infinite()),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::potential::{AngularPerturbation, AngularShape};

    #[test]
    fn gaussian_and_exponential_normalizers() {
        let g = normalize(&PotentialSpec::one_dim(Potential::gaussian(), f64::NEG_INFINITY)).unwrap();
        assert!((g.z() - (2.0 * PI).sqrt()).abs() < 1e-10);
        let e = normalize(&PotentialSpec::one_dim(Potential::power(1.0, 1.0, 0.0), 0.0)).unwrap();
        assert!((e.z() - 1.0).abs() < 1e-10);
        assert!((e.cdf(2f64.ln()) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn planar_quartic_normalizer() {
        // ∫_{R^2} e^{-|x|^4} dx = 2 pi * Γ(1/2)/4 = pi^{3/2}/2
        let m = normalize(&PotentialSpec::radial(Potential::power(1.0, 4.0, 0.0), 2)).unwrap();
        assert!((m.z() - PI.powf(1.5) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn angular_ratio_matches_perturbation_range() {
        let pert = AngularPerturbation { eps: 0.1, harmonic: 1, shape: AngularShape::Cos };
        let m = normalize(&PotentialSpec::radial_angular(Potential::power(1.0, 2.0, 0.0), pert)).unwrap();
        assert!((m.angular_ratio() - 0.2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn gaussian_square_moment() {
        let g = normalize(&PotentialSpec::one_dim(Potential::gaussian(), f64::NEG_INFINITY)).unwrap();
        let m = g.exp_moment(0.25, 2.0, MomentMode::Single).unwrap();
        assert!((m.value - 2f64.sqrt()).abs() < 1e-8);
        assert!(!g.exp_moment(0.6, 2.0, MomentMode::Single).unwrap().finite);
        assert!(!g.exp_moment(0.5, 2.0, MomentMode::Single).unwrap().finite);
    }

    #[test]
    fn expression_moment_detects_divergence() {
        let p = crate::measure::parse_potential("-(1+r^2)").unwrap();
        let g = normalize(&PotentialSpec::one_dim(p, f64::NEG_INFINITY)).unwrap();
        assert!(g.exp_moment(0.5, 2.0, MomentMode::Single).unwrap().finite);
        assert!(!g.exp_moment(1.5, 2.0, MomentMode::Single).unwrap().finite);
    }

    #[test]
    fn tail_bar_is_complement_of_radius_cdf() {
        let g = normalize(&PotentialSpec::one_dim(Potential::gaussian(), f64::NEG_INFINITY)).unwrap();
        for &s in &[0.5, 1.0, 2.0, 3.0] {
            let radius_cdf = g.cdf(s) - g.cdf(-s);
            assert!((g.tail_bar(s) - (1.0 - radius_cdf)).abs() < 1e-12);
        }
        assert_eq!(g.tail_bar(0.0), 1.0);
        assert_eq!(g.tail_bar(-1.0), 1.0);
    }
}
