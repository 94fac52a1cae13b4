//! Family checks of the super Poincaré, weighted log-Sobolev, transport-cost
//! and HWI inequalities, and of the chain bound
//! `mu(f^2) <= r mu(alpha |f'|^2) + e^{c(1 + 1/r)} mu(|f|)^2`.
//!
//! Members are normalized to `mu(f^2) = 1`, so every left side of the
//! super Poincaré type is 1.

use serde::{Deserialize, Serialize};

use super::beta::BetaProfile;
use super::family::TestFunctionFamily;
use super::report::{InequalityKind, InequalityReport};
use crate::error::{Error, Result};
use crate::measure::PotentialMeasure;
use crate::ot::{w_pullback, w_quantile_1d, CostFn, DensityPerturbation, LogQuantile};
use crate::quadrature::adaptive;
use crate::transport::{DistanceEvaluator, TransportMap, WeightProfile};

/// Entropy below which a transport-cost member is skipped.
const ZERO_ENTROPY: f64 = 1e-12;

fn check_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() || r_grid.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidParameter("r grid must be finite, positive and nonempty".into()));
    }
    Ok(())
}

/// `mu(f^2) <= r mu(|f'|^2) + beta(r) mu(|f|)^2` on every member and every
/// `r` in the grid.
pub fn check_super_poincare(
    mu: &PotentialMeasure,
    beta: &BetaProfile,
    r_grid: &[f64],
    fam: &TestFunctionFamily,
) -> Result<InequalityReport> {
    check_grid(r_grid)?;
    let mut rep = InequalityReport::new(InequalityKind::SuperPoincare, None, true);
    for m in &fam.members {
        let p = m.perturbation(mu)?;
        let energy = p.energy(None)?;
        let l1 = p.l1_norm()?;
        for &r in r_grid {
            rep.push(m.id.clone(), r, 1.0, r * energy + beta.value(r) * l1 * l1);
        }
    }
    Ok(rep.finish())
}

/// The chain bound with weight `alpha` and constant `c` on every member and
/// every `r` in the grid.
pub fn check_chain(
    mu: &PotentialMeasure,
    weight: &WeightProfile,
    c: f64,
    r_grid: &[f64],
    fam: &TestFunctionFamily,
) -> Result<InequalityReport> {
    check_grid(r_grid)?;
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("chain constant must be positive, got {c}")));
    }
    let mut rep = InequalityReport::new(InequalityKind::Chain, None, true);
    for m in &fam.members {
        let p = m.perturbation(mu)?;
        let energy = p.energy(Some(weight))?;
        let l1 = p.l1_norm()?;
        for &r in r_grid {
            let defect = (c * (1.0 + 1.0 / r)).exp();
            rep.push(m.id.clone(), r, 1.0, r * energy + defect * l1 * l1);
        }
    }
    Ok(rep.finish())
}

/// `mu(f^2 ln f^2) <= C mu(alpha |f'|^2)`; `C_est` is the largest ratio.
pub fn check_wlsi(
    mu: &PotentialMeasure,
    weight: &WeightProfile,
    fam: &TestFunctionFamily,
    c_target: Option<f64>,
) -> Result<InequalityReport> {
    let mut rep = InequalityReport::new(InequalityKind::Wlsi, c_target, false);
    for m in &fam.members {
        let p = m.perturbation(mu)?;
        let ent = p.entropy()?;
        let energy = p.energy(Some(weight))?;
        rep.push(m.id.clone(), m.param, ent, energy);
    }
    Ok(rep.finish())
}

/// `alpha(x) (1 + rho(o, x))^{theta - 2}` against `[1/c, c]` at each point.
///
/// Each record has `lhs = max(v, 1/v)` for the normalized value `v` and
/// `rhs = 1`, so `C_est` is the smallest `c` that fits every point.
pub fn check_envelope(
    mu: &PotentialMeasure,
    weight: &WeightProfile,
    theta: f64,
    xs: &[f64],
    c_target: Option<f64>,
) -> Result<InequalityReport> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!("envelope needs theta > 0, got {theta}")));
    }
    if xs.is_empty() {
        return Err(Error::InvalidParameter("envelope needs at least one point".into()));
    }
    let mut rep = InequalityReport::new(InequalityKind::Envelope, c_target, false);
    for (k, &x) in xs.iter().enumerate() {
        let v = weight.value_checked(x)? * (1.0 + mu.origin_distance(x)).powf(theta - 2.0);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight value {v} at {x}")));
        }
        rep.push(format!("x:{k}"), x, v.max(1.0 / v), 1.0);
    }
    Ok(rep.finish())
}

/// How the left side of a transport-cost inequality is measured.
#[derive(Debug, Clone)]
pub enum TransportCost {
    /// `W_p^p` for the distance.
    Distance { distance: DistanceEvaluator, p: f64 },
    /// The optimal value of a ground cost.
    Cost(CostFn),
}

impl TransportCost {
    pub fn name(&self) -> String {
        match self {
            TransportCost::Distance { distance, p } => format!("{}^{}", distance.name(), p),
            TransportCost::Cost(c) => c.name().to_string(),
        }
    }

    /// Optimal cost between `mu` and `f^2 mu`.
    pub fn between(&self, mu: &PotentialMeasure, pert: &DensityPerturbation) -> Result<f64> {
        match self {
            TransportCost::Distance { distance, p } => {
                if !(*p >= 1.0 && p.is_finite()) {
                    return Err(Error::InvalidParameter(format!("transport power must be >= 1, got {p}")));
                }
                match distance {
                    DistanceEvaluator::Euclidean => Ok(w_quantile_1d(mu, pert.law(), &CostFn::power(*p)?)?.raw),
                    DistanceEvaluator::Pullback(map) => Ok(w_pullback(pert, map, *p)?.raw),
                    DistanceEvaluator::WeightedGeodesic(w) => {
                        if mu.is_radial() {
                            return Err(Error::ModeUnsupported("weighted geodesics are computed on the line only".into()));
                        }
                        let coord = GeodesicCoordinate::new(mu, w)?;
                        let a = Mapped { law: mu, coord: &coord };
                        let b = Mapped { law: pert.law(), coord: &coord };
                        Ok(w_quantile_1d(&a, &b, &CostFn::power(*p)?)?.raw)
                    }
                    DistanceEvaluator::RhoTilde { .. } | DistanceEvaluator::PowerComparison { .. } => {
                        Err(Error::NonConvexCost(format!(
                            "{} is not a monotone function of a single coordinate",
                            distance.name()
                        )))
                    }
                }
            }
            TransportCost::Cost(CostFn::PullbackSq(map)) => Ok(w_pullback(pert, map, 2.0)?.raw),
            TransportCost::Cost(c) => Ok(w_quantile_1d(mu, pert.law(), c)?.raw),
        }
    }
}

/// `cost(mu, f^2 mu) <= C mu(f^2 ln f^2)`; `C_est` is the largest ratio.
pub fn check_talagrand(
    mu: &PotentialMeasure,
    fam: &TestFunctionFamily,
    cost: &TransportCost,
    c_target: Option<f64>,
) -> Result<InequalityReport> {
    let mut rep = InequalityReport::new(InequalityKind::Talagrand, c_target, false);
    for m in &fam.members {
        let p = m.perturbation(mu)?;
        let ent = p.entropy()?;
        if ent < ZERO_ENTROPY {
            rep.push_with(m.id.clone(), m.param, 0.0, ent.max(0.0), true);
            continue;
        }
        let w = cost.between(mu, &p)?;
        rep.push(m.id.clone(), m.param, w, ent);
    }
    Ok(rep.finish())
}

/// Which HWI inequality is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HwiForm {
    /// `Ent + W^2 <= 2 sqrt(2 mu(alpha |f'|^2)) W`.
    #[default]
    Stated,
    /// `Ent + W^2 / 2 <= 2 sqrt(mu(alpha |f'|^2)) W`, attained along
    /// Gaussian tilts.
    Sharp,
}

/// The HWI inequality with `W` the quadratic cost in the metric pulled back
/// by `map`.
pub fn check_hwi(
    mu: &PotentialMeasure,
    weight: &WeightProfile,
    map: &TransportMap,
    fam: &TestFunctionFamily,
    form: HwiForm,
) -> Result<InequalityReport> {
    let ch = mu.angular_ratio();
    if mu.is_radial() && ch > 1.0 + 1e-9 {
        return Err(Error::NonConstantAngular { ch });
    }
    let mut rep = InequalityReport::new(InequalityKind::Hwi, None, true);
    for m in &fam.members {
        let p = m.perturbation(mu)?;
        let ent = p.entropy()?;
        let energy = p.energy(Some(weight))?;
        let w = w_pullback(&p, map, 2.0)?.value;
        let (lhs, rhs) = match form {
            HwiForm::Stated => (ent + w * w, 2.0 * (2.0 * energy).sqrt() * w),
            HwiForm::Sharp => (ent + 0.5 * w * w, 2.0 * energy.sqrt() * w),
        };
        rep.push(m.id.clone(), m.param, lhs, rhs);
    }
    Ok(rep.finish())
}

const GEODESIC_KNOTS: usize = 1024;

/// `A(x) = ∫_0^x alpha^{-1/2}` tabulated with cubic Hermite interpolation;
/// the weighted geodesic distance on the line is `|A(x) - A(y)|`.
struct GeodesicCoordinate<'a> {
    weight: &'a WeightProfile,
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl<'a> GeodesicCoordinate<'a> {
    fn new(mu: &PotentialMeasure, weight: &'a WeightProfile) -> Result<Self> {
        let lo = mu.density().quantile_log_cdf(-40.0);
        let hi = mu.density().quantile_log_sf(-40.0);
        let h = (hi - lo) / GEODESIC_KNOTS as f64;
        let knots: Vec<f64> = (0..=GEODESIC_KNOTS).map(|k| lo + h * k as f64).collect();
        let speed = |s: f64| 1.0 / weight.value(s).sqrt();
        let mut values = vec![0.0; knots.len()];
        for k in 1..knots.len() {
            values[k] = values[k - 1] + adaptive(&speed, knots[k - 1], knots[k], 1e-12, 1e-300)?.value;
        }
        let slopes = knots.iter().map(|&x| speed(x)).collect();
        Ok(GeodesicCoordinate { weight, knots, values, slopes })
    }

    fn at(&self, x: f64) -> f64 {
        let n = self.knots.len();
        let speed = |s: f64| 1.0 / self.weight.value(s).sqrt();
        if x <= self.knots[0] {
            return self.values[0] - adaptive(&speed, x, self.knots[0], 1e-12, 1e-300).map(|r| r.value).unwrap_or(f64::NAN);
        }
        if x >= self.knots[n - 1] {
            return self.values[n - 1]
                + adaptive(&speed, self.knots[n - 1], x, 1e-12, 1e-300).map(|r| r.value).unwrap_or(f64::NAN);
        }
        let k = (self.knots.partition_point(|&t| t <= x) - 1).min(n - 2);
        let (a, b) = (self.knots[k], self.knots[k + 1]);
        let h = b - a;
        let t = (x - a) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.values[k]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[k]
            + (-2.0 * t3 + 3.0 * t2) * self.values[k + 1]
            + (t3 - t2) * h * self.slopes[k + 1]
    }
}

struct Mapped<'a, L: LogQuantile + ?Sized> {
    law: &'a L,
    coord: &'a GeodesicCoordinate<'a>,
}

impl<L: LogQuantile + ?Sized> LogQuantile for Mapped<'_, L> {
    fn quantile_lower(&self, t: f64) -> f64 {
        self.coord.at(self.law.quantile_lower(t))
    }

    fn quantile_upper(&self, t: f64) -> f64 {
        self.coord.at(self.law.quantile_upper(t))
    }
}
