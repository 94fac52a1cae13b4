//! Densities `f^2` relative to a base measure, with entropy and energy
//! functionals.
//!
//! A perturbation is given by `psi = ln f^2` (up to an additive constant)
//! and its derivative. The law `f^2 mu` is built as its own [`Density1D`]
//! from `ln(dmu/dx) + psi`, which normalizes `mu(f^2) = 1` for free and
//! gives
//!
//! - `Ent = mu(f^2 ln f^2) = E_nu[psi_hat]`,
//! - `mu(alpha |f'|^2) = E_nu[alpha (psi'/2)^2]`,
//!
//! with `nu = f^2 mu` and `psi_hat` the normalized log-density. Radial
//! measures take `f` as a function of the radius.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::{Density1D, DensityOptions, PotentialMeasure};
use crate::transport::WeightProfile;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct DensityPerturbation {
    base: PotentialMeasure,
    log_sq: ScalarFn,
    dlog_sq: ScalarFn,
    breaks: Vec<f64>,
    log_mass: f64,
    law: Density1D,
}

impl fmt::Debug for DensityPerturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityPerturbation")
            .field("log_mass", &self.log_mass)
            .field("law", &self.law)
            .finish()
    }
}

impl DensityPerturbation {
    /// `log_sq` is `ln f^2` up to a constant, `dlog_sq` its derivative;
    /// `breaks` lists kinks of `log_sq`.
    pub fn new(base: &PotentialMeasure, log_sq: ScalarFn, dlog_sq: ScalarFn, breaks: Vec<f64>) -> Result<Self> {
        let b = base.density().clone();
        let l = log_sq.clone();
        let ld = Arc::new(move |x: f64| {
            let v = b.log_density_raw(x);
            if v == f64::NEG_INFINITY {
                v
            } else {
                v + l(x)
            }
        });
        let opts = DensityOptions { center: 0.0, breaks: breaks.clone() };
        let law = Density1D::with_options(ld, base.density().lower(), &opts)?;
        let log_mass = law.log_norm() - base.density().log_norm();
        if !log_mass.is_finite() {
            return Err(Error::NonIntegrable("perturbation has zero or infinite mass".into()));
        }
        Ok(DensityPerturbation { base: base.clone(), log_sq, dlog_sq, breaks, log_mass, law })
    }

    /// The unit perturbation `f = 1`.
    pub fn unit(base: &PotentialMeasure) -> Result<Self> {
        Self::new(base, Arc::new(|_| 0.0), Arc::new(|_| 0.0), vec![])
    }

    pub fn base(&self) -> &PotentialMeasure {
        &self.base
    }

    /// The law of `f^2 mu` (1-D) or its radial profile.
    pub fn law(&self) -> &Density1D {
        &self.law
    }

    /// `ln mu(f^2)` of the unnormalized input.
    pub fn log_mass(&self) -> f64 {
        self.log_mass
    }

    /// Normalized `ln f^2(x)`.
    pub fn log_density_ratio(&self, x: f64) -> f64 {
        (self.log_sq)(x) - self.log_mass
    }

    /// Normalized `f(x)`.
    pub fn f(&self, x: f64) -> f64 {
        (0.5 * self.log_density_ratio(x)).exp()
    }

    /// `f'(x)` of the normalized `f`.
    pub fn df(&self, x: f64) -> f64 {
        let f = self.f(x);
        if f == 0.0 {
            0.0
        } else {
            f * 0.5 * (self.dlog_sq)(x)
        }
    }

    /// `f'/f`.
    pub fn grad_log_f(&self, x: f64) -> f64 {
        0.5 * (self.dlog_sq)(x)
    }

    /// `mu(f^2 ln f^2)` with `mu(f^2) = 1`.
    pub fn entropy(&self) -> Result<f64> {
        let l = &self.log_sq;
        let mean = self.law.expect(|x| l(x))?;
        Ok(mean - self.log_mass)
    }

    /// `mu(alpha |f'|^2)` with `mu(f^2) = 1`; `alpha = 1` when `weight` is
    /// `None`.
    pub fn energy(&self, weight: Option<&WeightProfile>) -> Result<f64> {
        let d = &self.dlog_sq;
        match weight {
            None => self.law.expect(|x| {
                let g = 0.5 * d(x);
                g * g
            }),
            Some(w) => self.law.expect(|x| {
                let g = 0.5 * d(x);
                if g == 0.0 {
                    0.0
                } else {
                    w.value(x) * g * g
                }
            }),
        }
    }

    /// `mu(|f|)` with `mu(f^2) = 1`.
    pub fn l1_norm(&self) -> Result<f64> {
        let b = self.base.density().clone();
        let l = self.log_sq.clone();
        let ld = Arc::new(move |x: f64| {
            let v = b.log_density_raw(x);
            if v == f64::NEG_INFINITY {
                v
            } else {
                v + 0.5 * l(x)
            }
        });
        let opts = DensityOptions { center: 0.0, breaks: self.breaks.clone() };
        let half = Density1D::with_options(ld, self.base.density().lower(), &opts)?;
        Ok((half.log_norm() - self.base.density().log_norm() - 0.5 * self.log_mass).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{normalize, Potential, PotentialSpec};

    fn gaussian() -> PotentialMeasure {
        normalize(&PotentialSpec::one_dim(Potential::gaussian(), f64::NEG_INFINITY)).unwrap()
    }

    #[test]
    fn tilt_entropy_and_energy() {
        let g = gaussian();
        for &lam in &[-1.5, 0.3, 2.0] {
            let p = DensityPerturbation::new(&g, Arc::new(move |x| lam * x), Arc::new(move |_| lam), vec![]).unwrap();
            assert!((p.log_mass() - 0.5 * lam * lam).abs() < 1e-10);
            assert!((p.entropy().unwrap() - 0.5 * lam * lam).abs() < 1e-8);
            assert!((p.energy(None).unwrap() - 0.25 * lam * lam).abs() < 1e-10);
            // mu(e^{lam x/2 - lam^2/4}) = e^{lam^2/8 - lam^2/4}
            assert!((p.l1_norm().unwrap() - (-lam * lam / 8.0).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn unit_perturbation_is_trivial() {
        let g = gaussian();
        let p = DensityPerturbation::unit(&g).unwrap();
        assert!(p.entropy().unwrap().abs() < 1e-12);
        assert_eq!(p.energy(None).unwrap(), 0.0);
        assert!((p.l1_norm().unwrap() - 1.0).abs() < 1e-12);
    }
}
