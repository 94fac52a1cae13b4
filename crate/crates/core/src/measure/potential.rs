//! Potentials `V` and the specification of the measure `e^V dx`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::parse::{parse_expr, Expr};
use crate::error::{Error, Result};

/// A potential, either the power family `V(x) = -a |x|^theta + b` or a
/// parsed expression in `r`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Power { a: f64, theta: f64, b: f64 },
    Expression { text: String, expr: Expr },
}

/// Parse a potential. Expressions of the form `-a*r^theta + b` are
/// recognised as the power family.
pub fn parse_potential(text: &str) -> Result<Potential> {
    let expr = parse_expr(text)?;
    if let Some((a, theta, b)) = expr.as_power_family() {
        return Ok(Potential::Power { a, theta, b });
    }
    Ok(Potential::Expression { text: text.trim().to_string(), expr })
}

impl Potential {
    pub fn power(a: f64, theta: f64, b: f64) -> Self {
        Potential::Power { a, theta, b }
    }

    /// The standard Gaussian potential `-x^2/2`.
    pub fn gaussian() -> Self {
        Potential::Power { a: 0.5, theta: 2.0, b: 0.0 }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::Power { a, theta, b } => -a * x.abs().powf(*theta) + b,
            Potential::Expression { expr, .. } => expr.eval(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Potential::Power { a, theta, .. } => {
                if x == 0.0 {
                    if *theta > 1.0 {
                        0.0
                    } else if *theta == 1.0 {
                        -a
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    -a * theta * x.abs().powf(theta - 1.0) * x.signum()
                }
            }
            Potential::Expression { expr, .. } => expr.eval_dual(x).d,
        }
    }

    pub fn power_params(&self) -> Option<(f64, f64, f64)> {
        match self {
            Potential::Power { a, theta, b } => Some((*a, *theta, *b)),
            Potential::Expression { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Potential::Power { a, theta, b } => format!("-{a}*r^{theta} + {b}"),
            Potential::Expression { text, .. } => text.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    OneDim,
    Radial,
    RadialAngular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularShape {
    Cos,
    Sin,
}

/// The additive angular term `eps * g(angle)` with `g` one of
/// `cos(k angle)`, `sin(k angle)`; `sup |g| = 1` and `sup |g'| = k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularPerturbation {
    pub eps: f64,
    pub harmonic: u32,
    pub shape: AngularShape,
}

impl AngularPerturbation {
    pub fn g(&self, angle: f64) -> f64 {
        let k = self.harmonic as f64;
        match self.shape {
            AngularShape::Cos => (k * angle).cos(),
            AngularShape::Sin => (k * angle).sin(),
        }
    }

    pub fn dg(&self, angle: f64) -> f64 {
        let k = self.harmonic as f64;
        match self.shape {
            AngularShape::Cos => -k * (k * angle).sin(),
            AngularShape::Sin => k * (k * angle).cos(),
        }
    }

    pub fn sup_abs(&self) -> f64 {
        1.0
    }

    pub fn sup_derivative(&self) -> f64 {
        self.harmonic as f64
    }

    pub fn value(&self, angle: f64) -> f64 {
        self.eps * self.g(angle)
    }
}

/// Everything needed to build the normalized measure.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub kind: MeasureKind,
    pub dim: usize,
    /// Left end of the support in the one-dimensional case; `-inf` for the line.
    pub left_endpoint: f64,
    pub potential: Potential,
    pub angular: Option<AngularPerturbation>,
    /// Number of equally spaced angles on the circle (angular case).
    pub angular_grid: usize,
}

impl PotentialSpec {
    pub fn one_dim(potential: Potential, left_endpoint: f64) -> Self {
        PotentialSpec {
            kind: MeasureKind::OneDim,
            dim: 1,
            left_endpoint,
            potential,
            angular: None,
            angular_grid: 1,
        }
    }

    pub fn radial(potential: Potential, dim: usize) -> Self {
        PotentialSpec {
            kind: MeasureKind::Radial,
            dim,
            left_endpoint: 0.0,
            potential,
            angular: None,
            angular_grid: 64,
        }
    }

    /// `V(r, angle) = V_r(r) + eps * g(angle)` on the plane.
    pub fn radial_angular(potential: Potential, angular: AngularPerturbation) -> Self {
        PotentialSpec {
            kind: MeasureKind::RadialAngular,
            dim: 2,
            left_endpoint: 0.0,
            potential,
            angular: Some(angular),
            angular_grid: 64,
        }
    }

    pub fn with_angular_grid(mut self, n: usize) -> Self {
        self.angular_grid = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dim must be >= 1".into()));
        }
        if let Potential::Power { a, theta, b } = self.potential {
            if !(a > 0.0 && theta > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameter(format!("power family needs a > 0, theta > 0 (a={a}, theta={theta})")));
            }
        }
        match self.kind {
            MeasureKind::OneDim => {
                if self.dim != 1 {
                    return Err(Error::InvalidParameter("one_dim measures have dim = 1".into()));
                }
                if self.left_endpoint.is_nan() || self.left_endpoint == f64::INFINITY {
                    return Err(Error::InvalidParameter(format!("left endpoint {}", self.left_endpoint)));
                }
            }
            MeasureKind::Radial => {}
            MeasureKind::RadialAngular => {
                if self.dim != 2 {
                    return Err(Error::ModeUnsupported("angular perturbations are supported in the plane only".into()));
                }
                match self.angular {
                    Some(p) if p.eps.is_finite() && p.harmonic >= 1 => {}
                    _ => return Err(Error::InvalidParameter("radial_angular needs eps and harmonic >= 1".into())),
                }
                if self.angular_grid < 4 {
                    return Err(Error::InvalidParameter("angular grid needs at least 4 angles".into()));
                }
            }
        }
        Ok(())
    }

    /// Equally spaced angles on `[0, 2 pi)`.
    pub fn angles(&self) -> Vec<f64> {
        let n = self.angular_grid.max(1);
        (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
    }
}
