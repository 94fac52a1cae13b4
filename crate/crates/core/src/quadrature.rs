//! Composite Gauss-Legendre quadrature with adaptive bisection.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Apply the rule on `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The shared 20-point rule.
pub fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

const MAX_PANELS: usize = 200_000;

struct Panel {
    a: f64,
    b: f64,
    /// Sum of the rule on the two halves.
    value: f64,
    /// Left and right half values.
    halves: (f64, f64),
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn panel<F: Fn(f64) -> f64>(f: &F, rule: &GaussLegendre, a: f64, b: f64, whole: f64) -> Panel {
    let m = 0.5 * (a + b);
    let left = rule.integrate(f, a, m);
    let right = rule.integrate(f, m, b);
    let value = left + right;
    Panel { a, b, value, halves: (left, right), err: (value - whole).abs() }
}

/// Adaptive composite Gauss-Legendre on `[a, b]`.
///
/// Each panel's error is the gap between the 20-point rule on the panel and
/// on its two halves. The panel with the largest error is bisected until the
/// summed error is within `max(abs_tol, rel_tol |value|)`. Integrable
/// singularities therefore cost a few bisections per digit.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::QuadratureFailure(format!("infinite interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, panels: 0 });
    }
    let rule = gl20();
    let first = panel(f, rule, a, b, rule.integrate(f, a, b));
    let mut value = first.value;
    let mut err = first.err;
    // panels too narrow to split
    let (mut done_value, mut done_err) = (0.0, 0.0);
    let mut heap = std::collections::BinaryHeap::new();
    heap.push(first);
    let mut panels = 1;
    loop {
        if !value.is_finite() || err.is_nan() {
            return Err(Error::QuadratureFailure(format!("non-finite integral on [{a}, {b}]")));
        }
        if err <= abs_tol.max(rel_tol * (value + done_value).abs()) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        value -= worst.value;
        err -= worst.err;
        let m = 0.5 * (worst.a + worst.b);
        if worst.b - worst.a <= 1e-13 * (worst.a.abs() + worst.b.abs()) || m == worst.a || m == worst.b {
            done_value += worst.value;
            done_err += worst.err;
            continue;
        }
        if panels >= MAX_PANELS {
            return Err(Error::QuadratureFailure(format!(
                "no convergence on [{:e}, {:e}] (estimate {:e})",
                worst.a, worst.b, worst.err
            )));
        }
        for child in [panel(f, rule, worst.a, m, worst.halves.0), panel(f, rule, m, worst.b, worst.halves.1)] {
            value += child.value;
            err += child.err;
            heap.push(child);
        }
        panels += 1;
        // running sums drift; refresh them now and then
        if panels % 1024 == 0 {
            value = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.err).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum::<f64>() + done_value;
    let error = heap.iter().map(|p| p.err).sum::<f64>() + done_err;
    if !value.is_finite() {
        return Err(Error::QuadratureFailure(format!("non-finite integral on [{a}, {b}]")));
    }
    Ok(Integral { value, error, panels: 2 * heap.len() })
}

/// Integrate over a list of breakpoints, adaptively on each piece.
pub fn adaptive_pieces<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], rel_tol: f64, abs_tol: f64) -> Result<Integral> {
    let mut total = Integral { value: 0.0, error: 0.0, panels: 0 };
    for w in breaks.windows(2) {
        let part = adaptive(f, w[0], w[1], rel_tol, abs_tol)?;
        total.value += part.value;
        total.error += part.error;
        total.panels += part.panels;
    }
    Ok(total)
}

/// Composite trapezoid rule with `n` intervals. Used as an independent check.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = 0.5 * (f(a) + f(b));
    for i in 1..n {
        s += f(a + h * i as f64);
    }
    s * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(20);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // degree 39 is integrated exactly
        let v = rule.integrate(|x| x.powi(38), -1.0, 1.0);
        assert!((v - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_gaussian() {
        let f = |x: f64| (-0.5 * x * x).exp();
        let r = adaptive(&f, -12.0, 12.0, 1e-12, 1e-300).unwrap();
        let exact = (2.0 * std::f64::consts::PI).sqrt();
        assert!((r.value - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn adaptive_handles_sqrt_singularity() {
        let f = |x: f64| x.sqrt();
        let r = adaptive(&f, 0.0, 1.0, 1e-11, 1e-300).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn odd_rule_has_center_node() {
        let rule = GaussLegendre::new(5);
        assert!(rule.nodes[2].abs() < 1e-15);
        assert!((rule.weights[2] - 128.0 / 225.0).abs() < 1e-14);
    }
}
