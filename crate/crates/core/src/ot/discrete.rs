//! Exact optimal transport between finite measures by successive shortest
//! augmenting paths with node potentials.
//!
//! Each round runs a dense Dijkstra from every source with remaining supply
//! over the residual bipartite graph under reduced costs, stops at the first
//! sink with remaining demand, updates the potentials and pushes as much
//! mass as the path allows. The final potentials are dual variables; the
//! plan carries the smallest reduced cost and the duality gap as an
//! optimality certificate.

use std::io::Write;

use super::cost::CostFn;
use crate::error::{Error, Result};
use crate::measure::GridMeasure;

pub const SIZE_LIMIT: usize = 2048;

const MASS_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// Nonzero entries `(i, j, mass)` in row-major order.
    pub entries: Vec<(usize, usize, f64)>,
    pub total_cost: f64,
    /// Dual variables: `u_i + v_j <= c_ij` up to the certificate tolerance.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `min_ij (c_ij - u_i - v_j)` relative to the largest cost.
    pub min_reduced_cost: f64,
    /// Primal minus dual objective.
    pub duality_gap: f64,
}

impl TransportPlan {
    /// Largest deviation of the row and column sums from the given masses.
    pub fn marginal_residual(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut rows = vec![0.0; a.len()];
        let mut cols = vec![0.0; b.len()];
        for &(i, j, m) in &self.entries {
            rows[i] += m;
            cols[j] += m;
        }
        let r = rows.iter().zip(a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let c = cols.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        r.max(c)
    }

    /// Whether reduced costs are nonnegative to `tol` and the gap is below
    /// `tol` relative to the cost scale.
    pub fn is_certified(&self, tol: f64) -> bool {
        self.min_reduced_cost >= -tol && self.duality_gap.abs() <= tol * (1.0 + self.total_cost.abs())
    }

    /// CSV `i,j,mass`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i,j,mass")?;
        for &(i, j, m) in &self.entries {
            writeln!(out, "{i},{j},{m:.16e}")?;
        }
        Ok(())
    }
}

fn cartesian(g: &GridMeasure, k: usize) -> Vec<f64> {
    match &g.angles {
        None => vec![g.points[k]],
        Some(a) => vec![g.points[k] * a[k].cos(), g.points[k] * a[k].sin()],
    }
}

/// Optimal plan between two grids for the given cost.
pub fn discrete_ot(src: &GridMeasure, dst: &GridMeasure, cost: &CostFn) -> Result<TransportPlan> {
    let (n, m) = (src.len(), dst.len());
    for size in [n, m] {
        if size > SIZE_LIMIT {
            return Err(Error::SizeLimitExceeded { size, limit: SIZE_LIMIT });
        }
    }
    let xs: Vec<Vec<f64>> = (0..n).map(|i| cartesian(src, i)).collect();
    let ys: Vec<Vec<f64>> = (0..m).map(|j| cartesian(dst, j)).collect();
    if xs[0].len() != ys[0].len() {
        return Err(Error::InvalidParameter("grids of different dimension".into()));
    }
    let mut c = Vec::with_capacity(n * m);
    for x in &xs {
        for y in &ys {
            c.push(cost.between(x, y));
        }
    }
    solve_transport(&src.masses, &dst.masses, &c)
}

/// Optimal plan for supplies `a`, demands `b` and a row-major cost matrix.
pub fn solve_transport(a: &[f64], b: &[f64], c: &[f64]) -> Result<TransportPlan> {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 || c.len() != n * m {
        return Err(Error::InvalidParameter("cost matrix does not match the masses".into()));
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("cost matrix has non-finite entries".into()));
    }
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    if (sa - sb).abs() > 1e-12 * sa.max(sb) {
        return Err(Error::InvalidParameter(format!("unbalanced masses {sa} vs {sb}")));
    }
    let mut supply = a.to_vec();
    let mut demand = b.to_vec();
    let mut flow = vec![0.0; n * m];
    // node potentials: sources 0..n, sinks n..n+m
    let mut pot = vec![0.0; n + m];
    for j in 0..m {
        pot[n + j] = (0..n).map(|i| c[i * m + j]).fold(f64::INFINITY, f64::min);
    }
    let mut dist = vec![0.0; n + m];
    let mut prev = vec![usize::MAX; n + m];
    let mut done = vec![false; n + m];

    loop {
        if supply.iter().all(|&s| s <= MASS_TOL) {
            break;
        }
        for v in 0..n + m {
            dist[v] = f64::INFINITY;
            prev[v] = usize::MAX;
            done[v] = false;
        }
        for i in 0..n {
            if supply[i] > MASS_TOL {
                dist[i] = 0.0;
            }
        }
        let mut sink = usize::MAX;
        loop {
            let mut best = f64::INFINITY;
            let mut u = usize::MAX;
            for v in 0..n + m {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u >= n {
                let j = u - n;
                if demand[j] > MASS_TOL {
                    sink = j;
                    break;
                }
                for i in 0..n {
                    if flow[i * m + j] > 0.0 && !done[i] {
                        let nd = best - c[i * m + j] + pot[u] - pot[i];
                        if nd < dist[i] {
                            dist[i] = nd;
                            prev[i] = u;
                        }
                    }
                }
            } else {
                let row = &c[u * m..(u + 1) * m];
                for j in 0..m {
                    let v = n + j;
                    if !done[v] {
                        let nd = best + row[j] + pot[u] - pot[v];
                        if nd < dist[v] {
                            dist[v] = nd;
                            prev[v] = u;
                        }
                    }
                }
            }
        }
        if sink == usize::MAX {
            // rounding left supply without matching demand
            break;
        }
        let reach = dist[n + sink];
        for v in 0..n + m {
            pot[v] += dist[v].min(reach);
        }
        // bottleneck along the path
        let mut amount = demand[sink];
        let mut v = n + sink;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u >= n {
                // backward edge sink u -> source v
                amount = amount.min(flow[v * m + (u - n)]);
            }
            v = u;
        }
        let source = v;
        amount = amount.min(supply[source]);
        let mut v = n + sink;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u >= n {
                let k = v * m + (u - n);
                flow[k] -= amount;
                if flow[k] < MASS_TOL * 1e-3 {
                    flow[k] = 0.0;
                }
            } else {
                flow[u * m + (v - n)] += amount;
            }
            v = u;
        }
        supply[source] -= amount;
        demand[sink] -= amount;
    }

    let mut entries = Vec::new();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..m {
            let f = flow[i * m + j];
            if f > 0.0 {
                entries.push((i, j, f));
                total += f * c[i * m + j];
            }
        }
    }
    let u: Vec<f64> = (0..n).map(|i| -pot[i]).collect();
    let v: Vec<f64> = (0..m).map(|j| pot[n + j]).collect();
    let scale = c.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut min_rc = f64::INFINITY;
    for i in 0..n {
        for j in 0..m {
            min_rc = min_rc.min(c[i * m + j] - u[i] - v[j]);
        }
    }
    let dual: f64 = a.iter().zip(&u).map(|(x, y)| x * y).sum::<f64>() + b.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
    Ok(TransportPlan {
        entries,
        total_cost: total,
        u,
        v,
        min_reduced_cost: min_rc / scale,
        duality_gap: total - dual,
    })
}
