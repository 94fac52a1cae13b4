//! Distances induced by the transport maps and weight profiles.

use super::map::TransportMap;
use super::weight::WeightProfile;
use crate::error::{Error, Result};
use crate::quadrature::adaptive;

#[derive(Debug, Clone)]
pub enum DistanceEvaluator {
    Euclidean,
    /// `C(h)^{-1/2} |T(x) - T(y)|` with `T` the transport map.
    Pullback(TransportMap),
    /// Length of the segment in the metric `|dx|^2 / alpha` (line only).
    WeightedGeodesic(WeightProfile),
    /// `|x - y| / (1 + max(|x|, |y|))^{1 - delta/2}`.
    RhoTilde { delta_exp: f64 },
    /// `|x - y| (1 + max(|x|, |y|))^{(delta - 1)/(2 - delta)}`.
    PowerComparison { delta_exp: f64 },
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

impl DistanceEvaluator {
    pub fn rho_tilde(delta_exp: f64) -> Result<Self> {
        check_exponent(delta_exp)?;
        Ok(DistanceEvaluator::RhoTilde { delta_exp })
    }

    pub fn power_comparison(delta_exp: f64) -> Result<Self> {
        check_exponent(delta_exp)?;
        Ok(DistanceEvaluator::PowerComparison { delta_exp })
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistanceEvaluator::Euclidean => "euclidean",
            DistanceEvaluator::Pullback(_) => "pullback",
            DistanceEvaluator::WeightedGeodesic(_) => "weighted_geodesic",
            DistanceEvaluator::RhoTilde { .. } => "rho_tilde",
            DistanceEvaluator::PowerComparison { .. } => "power_comparison",
        }
    }

    /// Distance between two points of equal dimension. Line points are
    /// one-element slices; radial measures take Cartesian coordinates.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::InvalidParameter("points must have the same positive dimension".into()));
        }
        if x == y {
            return Ok(0.0);
        }
        match self {
            DistanceEvaluator::Euclidean => Ok(euclid(x, y)),
            DistanceEvaluator::Pullback(map) => {
                let (a, b) = (map.map_point(x), map.map_point(y));
                Ok(euclid(&a, &b) / map.angular_ratio().sqrt())
            }
            DistanceEvaluator::WeightedGeodesic(w) => {
                if x.len() != 1 {
                    return Err(Error::ModeUnsupported("weighted geodesics are computed on the line only".into()));
                }
                let (a, b) = if x[0] < y[0] { (x[0], y[0]) } else { (y[0], x[0]) };
                if w.is_constant() {
                    return Ok((b - a) / w.value(a).sqrt());
                }
                let f = |s: f64| 1.0 / w.value(s).sqrt();
                Ok(adaptive(&f, a, b, 1e-11, 1e-300)?.value)
            }
            DistanceEvaluator::RhoTilde { delta_exp } => {
                let m = norm(x).max(norm(y));
                Ok(euclid(x, y) / (1.0 + m).powf(1.0 - delta_exp / 2.0))
            }
            DistanceEvaluator::PowerComparison { delta_exp } => {
                let m = norm(x).max(norm(y));
                Ok(euclid(x, y) * (1.0 + m).powf((delta_exp - 1.0) / (2.0 - delta_exp)))
            }
        }
    }

    /// Scalar form for line points.
    pub fn distance_1d(&self, x: f64, y: f64) -> Result<f64> {
        self.distance(&[x], &[y])
    }
}

fn check_exponent(delta_exp: f64) -> Result<()> {
    if !(delta_exp > 1.0 && delta_exp < 2.0) {
        return Err(Error::InvalidParameter(format!("exponent must lie in (1, 2), got {delta_exp}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{normalize, Potential, PotentialSpec};
    use crate::transport::build_map;

    #[test]
    fn reflexive_in_all_modes() {
        let g = normalize(&PotentialSpec::one_dim(Potential::gaussian(), f64::NEG_INFINITY)).unwrap();
        let modes = [
            DistanceEvaluator::Euclidean,
            DistanceEvaluator::Pullback(build_map(&g).unwrap()),
            DistanceEvaluator::WeightedGeodesic(WeightProfile::constant(1.0).unwrap()),
            DistanceEvaluator::rho_tilde(1.5).unwrap(),
            DistanceEvaluator::power_comparison(1.5).unwrap(),
        ];
        for m in &modes {
            assert_eq!(m.distance_1d(0.7, 0.7).unwrap(), 0.0);
            let d = m.distance_1d(-0.3, 1.1).unwrap();
            assert!(d > 0.0 && (d - m.distance_1d(1.1, -0.3).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_weight_geodesic_is_euclidean() {
        let g = normalize(&PotentialSpec::one_dim(Potential::gaussian(), f64::NEG_INFINITY)).unwrap();
        let w = crate::transport::weight_1d(&g).unwrap();
        let d = DistanceEvaluator::WeightedGeodesic(w).distance_1d(-1.0, 2.0).unwrap();
        assert!((d - 3.0).abs() < 1e-7);
        let d = DistanceEvaluator::WeightedGeodesic(WeightProfile::constant(1.0).unwrap());
        assert!((d.distance_1d(-1.0, 2.5).unwrap() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn geodesic_rejected_in_plane() {
        let d = DistanceEvaluator::WeightedGeodesic(WeightProfile::constant(1.0).unwrap());
        assert!(matches!(d.distance(&[0.0, 1.0], &[1.0, 0.0]), Err(Error::ModeUnsupported(_))));
    }

    #[test]
    fn rho_tilde_growth() {
        // from the origin the distance grows like |x|^{delta/2}
        let d = DistanceEvaluator::rho_tilde(1.5).unwrap();
        let ratio = |x: f64| d.distance_1d(0.0, x).unwrap() / x.powf(0.75);
        assert!((ratio(100.0) / ratio(10.0) - 1.0).abs() < 0.05);
    }
}
