//! Families of test functions `f` with analytic gradients.
//!
//! Each member is stored through `psi = ln f^2` and `psi'`, which stay
//! finite where `f` itself would overflow (translates of steep potentials),
//! together with `f` and `f'` for direct evaluation. Radial measures take
//! members as functions of the radius.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::PotentialMeasure;
use crate::ot::{DensityPerturbation, ScalarFn};

/// `min, min + step, ..., <= max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl ParamRange {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let r = ParamRange { min, max, step };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step > 0.0 && self.max >= self.min) {
            return Err(Error::InvalidParameter(format!(
                "parameter range needs finite min <= max and step > 0 (got {}, {}, {})",
                self.min, self.max, self.step
            )));
        }
        if (self.max - self.min) / self.step > 1e5 {
            return Err(Error::InvalidParameter("parameter range has more than 1e5 points".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| {
                let v = self.min + k as f64 * self.step;
                if v.abs() < 1e-9 * self.step {
                    0.0
                } else {
                    v
                }
            })
            .collect()
    }

    /// Same range at half the step.
    pub fn refined(&self) -> Self {
        ParamRange { step: self.step / 2.0, ..*self }
    }
}

fn default_tilts() -> ParamRange {
    ParamRange { min: -2.0, max: 2.0, step: 0.1 }
}

fn default_degrees() -> Vec<u32> {
    vec![1, 2, 3, 4]
}

/// Declarative description of a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `f^2 = e^{lambda x}`.
    ExpTilts {
        #[serde(default = "default_tilts")]
        lambda: ParamRange,
    },
    /// `f^2 = e^{V(x - m) - V(x)}`, the density of the shifted measure
    /// (line only).
    Translates { shift: ParamRange },
    /// `f = min(|x - c|, w)`, `w` defaulting to half the distance from
    /// `c` to the reference point.
    LipschitzBumps {
        centers: ParamRange,
        #[serde(default)]
        width: Option<f64>,
    },
    /// `f = 1 + t He_k(x) / sqrt(k!)` with `He_k` the probabilists'
    /// Hermite polynomials.
    HermiteLike {
        #[serde(default = "default_degrees")]
        degrees: Vec<u32>,
        amplitude: ParamRange,
    },
    /// `f^2 = (1 + r^2)^k e^{lambda r}`.
    RadialProducts { powers: Vec<f64>, lambda: ParamRange },
}

impl FamilySpec {
    pub fn tag(&self) -> &'static str {
        match self {
            FamilySpec::ExpTilts { .. } => "exp_tilts",
            FamilySpec::Translates { .. } => "translates",
            FamilySpec::LipschitzBumps { .. } => "lipschitz_bumps",
            FamilySpec::HermiteLike { .. } => "hermite_like",
            FamilySpec::RadialProducts { .. } => "radial_products",
        }
    }

    /// The family with every parameter grid twice as dense.
    pub fn refined(&self) -> Self {
        match self {
            FamilySpec::ExpTilts { lambda } => FamilySpec::ExpTilts { lambda: lambda.refined() },
            FamilySpec::Translates { shift } => FamilySpec::Translates { shift: shift.refined() },
            FamilySpec::LipschitzBumps { centers, width } => {
                FamilySpec::LipschitzBumps { centers: centers.refined(), width: *width }
            }
            FamilySpec::HermiteLike { degrees, amplitude } => {
                FamilySpec::HermiteLike { degrees: degrees.clone(), amplitude: amplitude.refined() }
            }
            FamilySpec::RadialProducts { powers, lambda } => {
                FamilySpec::RadialProducts { powers: powers.clone(), lambda: lambda.refined() }
            }
        }
    }

    /// Instantiate the members for a measure.
    pub fn build(&self, mu: &PotentialMeasure) -> Result<TestFunctionFamily> {
        let tag = self.tag();
        let mut members = Vec::new();
        match self {
            FamilySpec::ExpTilts { lambda } => {
                lambda.validate()?;
                for (k, l) in lambda.values().into_iter().enumerate() {
                    members.push(Member::tilt(format!("{tag}:{k}"), l));
                }
            }
            FamilySpec::Translates { shift } => {
                shift.validate()?;
                if mu.is_radial() || mu.left_endpoint().is_finite() {
                    return Err(Error::ModeUnsupported("translates need a measure on the whole line".into()));
                }
                for (k, m) in shift.values().into_iter().enumerate() {
                    members.push(Member::translate(format!("{tag}:{k}"), mu, m));
                }
            }
            FamilySpec::LipschitzBumps { centers, width } => {
                centers.validate()?;
                if let Some(w) = width {
                    if !(*w > 0.0) {
                        return Err(Error::InvalidParameter(format!("bump width must be positive, got {w}")));
                    }
                }
                let origin = if mu.is_radial() {
                    0.0
                } else if mu.left_endpoint().is_finite() {
                    mu.left_endpoint()
                } else {
                    0.0
                };
                for (k, c) in centers.values().into_iter().enumerate() {
                    let w = width.unwrap_or(0.5 * (c - origin).abs());
                    if w > 0.0 && c >= mu.left_endpoint() {
                        members.push(Member::bump(format!("{tag}:{k}"), c, w));
                    }
                }
            }
            FamilySpec::HermiteLike { degrees, amplitude } => {
                amplitude.validate()?;
                if degrees.is_empty() || degrees.iter().any(|&d| d == 0 || d > 12) {
                    return Err(Error::InvalidParameter("hermite degrees must lie in 1..=12".into()));
                }
                for &d in degrees {
                    for (k, t) in amplitude.values().into_iter().enumerate() {
                        members.push(Member::hermite(format!("{tag}:k{d}:{k}"), d, t));
                    }
                }
            }
            FamilySpec::RadialProducts { powers, lambda } => {
                lambda.validate()?;
                if powers.is_empty() || powers.iter().any(|p| !p.is_finite()) {
                    return Err(Error::InvalidParameter("radial products need finite powers".into()));
                }
                for (j, &p) in powers.iter().enumerate() {
                    for (k, l) in lambda.values().into_iter().enumerate() {
                        members.push(Member::radial_product(format!("{tag}:p{j}:{k}"), p, l));
                    }
                }
            }
        }
        if members.is_empty() {
            return Err(Error::InvalidParameter(format!("family {tag} has no members")));
        }
        Ok(TestFunctionFamily { spec: self.clone(), members })
    }
}

/// One test function.
#[derive(Clone)]
pub struct Member {
    pub id: String,
    pub param: f64,
    /// `ln f^2`, possibly `-inf` at zeros of `f`.
    pub log_sq: ScalarFn,
    /// `(ln f^2)' = 2 f'/f`.
    pub dlog_sq: ScalarFn,
    /// `f`.
    pub value: ScalarFn,
    /// `f'`.
    pub grad: ScalarFn,
    /// Kinks of `f`.
    pub breaks: Vec<f64>,
}

impl std::fmt::Debug for Member {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Member").field("id", &self.id).field("param", &self.param).finish()
    }
}

impl Member {
    fn tilt(id: String, l: f64) -> Self {
        Member {
            id,
            param: l,
            log_sq: Arc::new(move |x| l * x),
            dlog_sq: Arc::new(move |_| l),
            value: Arc::new(move |x| (0.5 * l * x).exp()),
            grad: Arc::new(move |x| 0.5 * l * (0.5 * l * x).exp()),
            breaks: vec![],
        }
    }

    fn translate(id: String, mu: &PotentialMeasure, m: f64) -> Self {
        let (p1, p2, p3, p4) = (mu.potential().clone(), mu.potential().clone(), mu.potential().clone(), mu.potential().clone());
        Member {
            id,
            param: m,
            log_sq: Arc::new(move |x| p1.value(x - m) - p1.value(x)),
            dlog_sq: Arc::new(move |x| p2.derivative(x - m) - p2.derivative(x)),
            value: Arc::new(move |x| (0.5 * (p3.value(x - m) - p3.value(x))).exp()),
            grad: Arc::new(move |x| {
                let f = (0.5 * (p4.value(x - m) - p4.value(x))).exp();
                0.5 * f * (p4.derivative(x - m) - p4.derivative(x))
            }),
            breaks: if m == 0.0 { vec![] } else { vec![m, 0.0] },
        }
    }

    fn bump(id: String, c: f64, w: f64) -> Self {
        Member {
            id,
            param: c,
            log_sq: Arc::new(move |x| 2.0 * (x - c).abs().min(w).ln()),
            dlog_sq: Arc::new(move |x| {
                let z = x - c;
                if z.abs() < w {
                    2.0 / z
                } else {
                    0.0
                }
            }),
            value: Arc::new(move |x| (x - c).abs().min(w)),
            grad: Arc::new(move |x| {
                let z = x - c;
                if z.abs() < w {
                    z.signum()
                } else {
                    0.0
                }
            }),
            breaks: vec![c - w, c, c + w],
        }
    }

    fn hermite(id: String, degree: u32, t: f64) -> Self {
        let norm = (1..=degree).map(|k| k as f64).product::<f64>().sqrt();
        let u = move |x: f64| t * hermite_poly(degree, x) / norm;
        let f = move |x: f64| 1.0 + u(x);
        let df = move |x: f64| t * degree as f64 * hermite_poly(degree - 1, x) / norm;
        Member {
            id,
            param: t,
            log_sq: Arc::new(move |x| {
                let v = u(x);
                if v > -0.5 {
                    2.0 * v.ln_1p()
                } else {
                    2.0 * (1.0 + v).abs().ln()
                }
            }),
            dlog_sq: Arc::new(move |x| 2.0 * df(x) / f(x)),
            value: Arc::new(f),
            grad: Arc::new(df),
            breaks: vec![],
        }
    }

    fn radial_product(id: String, p: f64, l: f64) -> Self {
        Member {
            id,
            param: l,
            log_sq: Arc::new(move |r| p * (1.0 + r * r).ln() + l * r),
            dlog_sq: Arc::new(move |r| 2.0 * p * r / (1.0 + r * r) + l),
            value: Arc::new(move |r| (0.5 * (p * (1.0 + r * r).ln() + l * r)).exp()),
            grad: Arc::new(move |r| {
                let f = (0.5 * (p * (1.0 + r * r).ln() + l * r)).exp();
                0.5 * f * (2.0 * p * r / (1.0 + r * r) + l)
            }),
            breaks: vec![],
        }
    }

    /// The normalized perturbation `f^2 mu / mu(f^2)`.
    pub fn perturbation(&self, mu: &PotentialMeasure) -> Result<DensityPerturbation> {
        DensityPerturbation::new(mu, self.log_sq.clone(), self.dlog_sq.clone(), self.breaks.clone())
    }
}

/// `He_k(x)` by the three-term recurrence.
pub fn hermite_poly(k: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if k == 0 {
        return prev;
    }
    for n in 1..k {
        let next = x * cur - n as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// An instantiated family.
#[derive(Debug, Clone)]
pub struct TestFunctionFamily {
    pub spec: FamilySpec,
    pub members: Vec<Member>,
}

impl TestFunctionFamily {
    pub fn tag(&self) -> &'static str {
        self.spec.tag()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members of several families in one list.
    pub fn concat(families: Vec<TestFunctionFamily>) -> Result<TestFunctionFamily> {
        let mut it = families.into_iter();
        let mut first = it.next().ok_or_else(|| Error::InvalidParameter("no families to join".into()))?;
        for f in it {
            first.members.extend(f.members);
        }
        Ok(first)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{normalize, Potential, PotentialSpec};

    #[test]
    fn range_values_hit_zero_exactly() {
        let v = default_tilts().values();
        assert_eq!(v.len(), 41);
        assert_eq!(v[20], 0.0);
        assert!((v[40] - 2.0).abs() < 1e-12);
        assert_eq!(default_tilts().refined().values().len(), 81);
    }

    #[test]
    fn hermite_recurrence() {
        let x = 0.7;
        assert_eq!(hermite_poly(0, x), 1.0);
        assert!((hermite_poly(2, x) - (x * x - 1.0)).abs() < 1e-15);
        assert!((hermite_poly(4, x) - (x.powi(4) - 6.0 * x * x + 3.0)).abs() < 1e-14);
    }

    #[test]
    fn translates_rejected_on_half_line() {
        let e = normalize(&PotentialSpec::one_dim(Potential::power(1.0, 1.0, 0.0), 0.0)).unwrap();
        let spec = FamilySpec::Translates { shift: ParamRange::new(-1.0, 1.0, 0.5).unwrap() };
        assert!(matches!(spec.build(&e), Err(Error::ModeUnsupported(_))));
    }

    #[test]
    fn bumps_skip_the_reference_point() {
        let g = normalize(&PotentialSpec::one_dim(Potential::gaussian(), f64::NEG_INFINITY)).unwrap();
        let spec = FamilySpec::LipschitzBumps { centers: ParamRange::new(-2.0, 2.0, 1.0).unwrap(), width: None };
        let fam = spec.build(&g).unwrap();
        assert_eq!(fam.len(), 4);
    }

    #[test]
    fn config_round_trip() {
        let s = r#"{"tag":"exp_tilts"}"#;
        let f: FamilySpec = serde_json::from_str(s).unwrap();
        assert_eq!(f, FamilySpec::ExpTilts { lambda: default_tilts() });
    }
}
