//! Ground costs for transport problems.

use crate::error::{Error, Result};
use crate::transport::TransportMap;

#[derive(Debug, Clone)]
pub enum CostFn {
    /// `|x - y|^p`, `p >= 1`; the reported distance takes the `1/p` root.
    Power { p: f64 },
    /// `C(h)^{-1} |T(x) - T(y)|^2` with `T` the transport map.
    PullbackSq(TransportMap),
    /// `rho_tilde(x, y)^2`.
    RhoTildeSq { delta_exp: f64 },
    /// `|z|^2 / 2` for `|z| <= a`, else `a^{2-d} |z|^d / d + a^2 (d - 2) / (2d)`
    /// with `z = x - y`, `d = delta_exp`.
    QuadraticThenPower { a: f64, delta_exp: f64 },
    /// `|z|^2 e^{c1 |z|}`.
    ExpCost { c1: f64 },
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn diff_norm(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

impl CostFn {
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("power cost needs p >= 1, got {p}")));
        }
        Ok(CostFn::Power { p })
    }

    pub fn quadratic_then_power(a: f64, delta_exp: f64) -> Result<Self> {
        if !(a > 0.0 && delta_exp > 0.0) {
            return Err(Error::InvalidParameter(format!("need a > 0 and exponent > 0 (got {a}, {delta_exp})")));
        }
        Ok(CostFn::QuadraticThenPower { a, delta_exp })
    }

    pub fn name(&self) -> &'static str {
        match self {
            CostFn::Power { .. } => "power",
            CostFn::PullbackSq(_) => "pullback_sq",
            CostFn::RhoTildeSq { .. } => "rho_tilde_sq",
            CostFn::QuadraticThenPower { .. } => "quadratic_then_power",
            CostFn::ExpCost { .. } => "exp_cost",
        }
    }

    /// The root applied to the optimal value, `Some(p)` for power costs.
    pub fn root(&self) -> Option<f64> {
        match self {
            CostFn::Power { p } => Some(*p),
            _ => None,
        }
    }

    /// Whether the monotone coupling on the line is optimal for this cost.
    pub fn check_monotone_optimal(&self) -> Result<()> {
        match self {
            CostFn::QuadraticThenPower { delta_exp, .. } if *delta_exp < 1.0 => Err(Error::NonConvexCost(format!(
                "quadratic-then-power cost with exponent {delta_exp} < 1 is not convex"
            ))),
            CostFn::RhoTildeSq { .. } => {
                Err(Error::NonConvexCost("rho_tilde is not a convex function of x - y".into()))
            }
            CostFn::ExpCost { c1 } if *c1 < 0.0 => {
                Err(Error::NonConvexCost(format!("exponential cost with c1 = {c1} < 0")))
            }
            _ => Ok(()),
        }
    }

    /// Cost as a function of the separation `|x - y|` (all tags but the
    /// pullback and `rho_tilde`).
    pub fn of_gap(&self, z: f64) -> Option<f64> {
        let z = z.abs();
        match self {
            CostFn::Power { p } => Some(if *p == 2.0 { z * z } else { z.powf(*p) }),
            CostFn::QuadraticThenPower { a, delta_exp: d } => Some(if z <= *a {
                0.5 * z * z
            } else {
                a.powf(2.0 - d) / d * z.powf(*d) + a * a * (d - 2.0) / (2.0 * d)
            }),
            CostFn::ExpCost { c1 } => Some(z * z * (c1 * z).exp()),
            _ => None,
        }
    }

    /// Cost between two points of equal dimension.
    pub fn between(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            CostFn::PullbackSq(map) => {
                let (a, b) = (map.map_point(x), map.map_point(y));
                let d = diff_norm(&a, &b);
                d * d / map.angular_ratio()
            }
            CostFn::RhoTildeSq { delta_exp } => {
                let m = norm(x).max(norm(y));
                let d = diff_norm(x, y) / (1.0 + m).powf(1.0 - delta_exp / 2.0);
                d * d
            }
            _ => self.of_gap(diff_norm(x, y)).expect("gap cost"),
        }
    }

    pub fn between_1d(&self, x: f64, y: f64) -> f64 {
        self.between(&[x], &[y])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_then_power_is_continuous() {
        for &(a, d) in &[(0.5, 1.0), (1.0, 1.5), (2.0, 1.2), (3.0, 2.0)] {
            let c = CostFn::quadratic_then_power(a, d).unwrap();
            let left = 0.5 * a * a;
            let right = a.powf(2.0 - d) / d * a.powf(d) + a * a * (d - 2.0) / (2.0 * d);
            assert!((left - right).abs() < 1e-12);
            let below = c.of_gap(a * (1.0 - 1e-12)).unwrap();
            let above = c.of_gap(a * (1.0 + 1e-12)).unwrap();
            assert!((below - above).abs() < 1e-10);
        }
    }

    #[test]
    fn symmetric_and_zero_on_diagonal() {
        let costs = [
            CostFn::power(2.0).unwrap(),
            CostFn::power(1.0).unwrap(),
            CostFn::RhoTildeSq { delta_exp: 1.5 },
            CostFn::quadratic_then_power(1.0, 1.5).unwrap(),
            CostFn::ExpCost { c1: 0.3 },
        ];
        for c in &costs {
            assert_eq!(c.between_1d(0.4, 0.4), 0.0);
            assert!((c.between_1d(-1.0, 2.0) - c.between_1d(2.0, -1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn nonconvex_tags_rejected() {
        let c = CostFn::quadratic_then_power(1.0, 0.5).unwrap();
        assert!(matches!(c.check_monotone_optimal(), Err(Error::NonConvexCost(_))));
        assert!(CostFn::power(2.0).unwrap().check_monotone_optimal().is_ok());
    }
}
