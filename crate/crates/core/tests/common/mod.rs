//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

/// Solve `a x = b` by Gaussian elimination with partial pivoting; `None`
/// when a pivot vanishes.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// `sup_{f >= 0} (mu(f^2) - r E(f)) / mu(f)^2` on a small sorted grid by
/// enumerating every support `S`: the maximum over the compact set
/// `{f >= 0, mu(f) = 1}` sits at a stationary point `A_SS f = lambda m_S` of
/// some face, with value `lambda = 1 / (m_S' A_SS^{-1} m_S)`.
pub fn brute_force_beta(points: &[f64], masses: &[f64], r: f64) -> f64 {
    let n = points.len();
    let k: Vec<f64> = (0..n - 1)
        .map(|i| 0.5 * (masses[i] + masses[i + 1]) / (points[i + 1] - points[i]).powi(2))
        .collect();
    // full matrix of Q(f) = sum m f^2 - r sum k (f_{i+1} - f_i)^2
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = masses[i];
    }
    for (i, &ki) in k.iter().enumerate() {
        a[i][i] -= r * ki;
        a[i + 1][i + 1] -= r * ki;
        a[i][i + 1] += r * ki;
        a[i + 1][i] += r * ki;
    }
    let mut best = f64::NEG_INFINITY;
    for mask in 1u32..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let sub: Vec<Vec<f64>> = s.iter().map(|&i| s.iter().map(|&j| a[i][j]).collect()).collect();
        let ms: Vec<f64> = s.iter().map(|&i| masses[i]).collect();
        let Some(x) = solve(sub, ms.clone()) else { continue };
        let q: f64 = ms.iter().zip(&x).map(|(m, v)| m * v).sum();
        if q <= 0.0 || x.iter().any(|v| *v < -1e-12 * q.abs()) {
            continue;
        }
        best = best.max(1.0 / q);
    }
    best
}

/// Minimum of `sum_i c(x_i, y_{pi(i)})` over all permutations.
pub fn brute_force_assignment(x: &[f64], y: &[f64], c: impl Fn(f64, f64) -> f64) -> f64 {
    fn rec(k: usize, perm: &mut Vec<usize>, x: &[f64], y: &[f64], c: &dyn Fn(f64, f64) -> f64, best: &mut f64) {
        if k == perm.len() {
            let v: f64 = perm.iter().enumerate().map(|(i, &j)| c(x[i], y[j])).sum();
            *best = best.min(v);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            rec(k + 1, perm, x, y, c, best);
            perm.swap(k, i);
        }
    }
    let mut perm: Vec<usize> = (0..x.len()).collect();
    let mut best = f64::INFINITY;
    rec(0, &mut perm, x, y, &c, &mut best);
    best
}

/// Standard normal CDF through the complementary error function
/// (Numerical Recipes `erfc` Chebyshev fit, relative error below 1.2e-7).
pub fn norm_cdf_coarse(x: f64) -> f64 {
    let z = x.abs() / std::f64::consts::SQRT_2;
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = -z * z - 1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807 + t * (-1.13520398 + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277))))))));
    let erfc = t * poly.exp();
    if x >= 0.0 {
        1.0 - 0.5 * erfc
    } else {
        0.5 * erfc
    }
}
