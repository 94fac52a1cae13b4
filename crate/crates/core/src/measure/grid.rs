//! Finite discretizations of a measure.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::normalized::PotentialMeasure;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Points at the quantiles `(k - 1/2)/n`, each of mass `1/n`.
    EqualMass,
    /// Uniform nodes between the `1e-6` and `1 - 1e-6` quantiles with
    /// renormalized trapezoid masses.
    EqualSpace,
}

/// Support points and masses. One-dimensional grids have `angles = None`;
/// polar grids carry one angle per point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    pub points: Vec<f64>,
    pub angles: Option<Vec<f64>>,
    pub masses: Vec<f64>,
}

impl GridMeasure {
    /// A one-dimensional grid; masses are renormalized to sum to one.
    pub fn new(points: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if points.len() != masses.len() || points.is_empty() {
            return Err(Error::InvalidParameter("grid needs equally many points and masses".into()));
        }
        if masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidParameter("grid masses must be finite and nonnegative".into()));
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParameter("grid has zero mass".into()));
        }
        Ok(GridMeasure { points, angles: None, masses: masses.into_iter().map(|m| m / total).collect() })
    }

    /// Uniform masses on the given points.
    pub fn uniform(points: Vec<f64>) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.points.iter().zip(&self.masses).map(|(x, m)| x * m).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.points.iter().zip(&self.masses).map(|(x, m)| m * (x - mu) * (x - mu)).sum()
    }

    /// Whether the points are strictly increasing (one-dimensional grids).
    pub fn is_sorted(&self) -> bool {
        self.points.windows(2).all(|w| w[0] < w[1])
    }

    /// CSV with 17 significant digits: `point,mass` or `r,angle,mass`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        match &self.angles {
            None => {
                writeln!(out, "point,mass")?;
                for (x, m) in self.points.iter().zip(&self.masses) {
                    writeln!(out, "{x:.16e},{m:.16e}")?;
                }
            }
            Some(angles) => {
                writeln!(out, "r,angle,mass")?;
                for ((r, a), m) in self.points.iter().zip(angles).zip(&self.masses) {
                    writeln!(out, "{r:.16e},{a:.16e},{m:.16e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Discretize the 1-D law, or the planar measure on radial quantiles times
/// the angular grid.
pub fn discretize(mu: &PotentialMeasure, n: usize, scheme: Scheme) -> Result<GridMeasure> {
    if n < 2 {
        return Err(Error::InvalidParameter("discretize needs n >= 2".into()));
    }
    let (points, masses) = radial_or_line_points(mu, n, scheme)?;
    if !mu.is_radial() {
        return GridMeasure::new(points, masses);
    }
    let (angles, log_h) = mu.angular_table();
    let max = log_h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_h.iter().map(|l| (l - max).exp()).collect();
    let wsum: f64 = w.iter().sum();
    let mut pts = Vec::with_capacity(n * angles.len());
    let mut angs = Vec::with_capacity(n * angles.len());
    let mut ms = Vec::with_capacity(n * angles.len());
    for (&a, &wa) in angles.iter().zip(&w) {
        for (&r, &m) in points.iter().zip(&masses) {
            pts.push(r);
            angs.push(a);
            ms.push(m * wa / wsum);
        }
    }
    let total: f64 = ms.iter().sum();
    Ok(GridMeasure { points: pts, angles: Some(angs), masses: ms.into_iter().map(|m| m / total).collect() })
}

fn radial_or_line_points(mu: &PotentialMeasure, n: usize, scheme: Scheme) -> Result<(Vec<f64>, Vec<f64>)> {
    match scheme {
        Scheme::EqualMass => {
            let pts = (0..n).map(|k| mu.quantile((k as f64 + 0.5) / n as f64)).collect::<Result<Vec<_>>>()?;
            Ok((pts, vec![1.0 / n as f64; n]))
        }
        Scheme::EqualSpace => {
            let a = mu.quantile(1e-6)?;
            let b = mu.quantile(1.0 - 1e-6)?;
            let h = (b - a) / (n - 1) as f64;
            let pts: Vec<f64> = (0..n).map(|k| a + h * k as f64).collect();
            let mut ms: Vec<f64> = pts.iter().map(|&x| mu.pdf(x) * h).collect();
            ms[0] *= 0.5;
            ms[n - 1] *= 0.5;
            let total: f64 = ms.iter().sum();
            Ok((pts, ms.into_iter().map(|m| m / total).collect()))
        }
    }
}
