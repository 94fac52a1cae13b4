//! Safeguarded Newton iteration for nondecreasing scalar equations.

/// Solve `g(x) = 0` for a nondecreasing `g` on `(lo, hi)`.
///
/// `g` returns the value and derivative. Either bound may be infinite; the
/// bracket is then grown by doubling steps away from `x0`. Newton steps
/// that leave the current bracket are replaced by bisection. On a flat
/// stretch where `g = 0` the iteration contracts onto its left end.
pub fn solve_increasing<G>(g: G, x0: f64, lo: f64, hi: f64, xtol: f64) -> f64
where
    G: Fn(f64) -> (f64, f64),
{
    let mut lo = lo;
    let mut hi = hi;
    let mut x = x0.clamp(next_inside(lo, 1.0), next_inside(hi, -1.0));
    if !x.is_finite() {
        x = 0.0;
    }
    let mut step_up = 1.0f64.max(0.5 * x.abs());
    let mut step_down = step_up;
    for _ in 0..400 {
        let (v, d) = g(x);
        if v.is_nan() {
            // treat undefined values as being past the root
            hi = x;
        } else if v >= 0.0 {
            hi = x;
            if v == 0.0 && d > 0.0 {
                return x;
            }
        } else {
            lo = x;
        }
        let tol = xtol * (1.0 + x.abs());
        if lo.is_finite() && hi.is_finite() && hi - lo <= tol {
            return hi;
        }
        let newton = if d > 0.0 && d.is_finite() && v.is_finite() { x - v / d } else { f64::NAN };
        // a Newton target just outside the bracket means the root sits on its edge
        if newton <= lo && lo - newton <= tol {
            return lo;
        }
        if newton >= hi && newton - hi <= tol {
            return hi;
        }
        let next = if newton > lo && newton < hi {
            newton
        } else if lo.is_finite() && hi.is_finite() {
            0.5 * (lo + hi)
        } else if lo.is_finite() {
            let n = x + step_up;
            step_up *= 2.0;
            n
        } else {
            let n = x - step_down;
            step_down *= 2.0;
            n
        };
        if newton == next && (next - x).abs() <= 0.5 * tol {
            return next;
        }
        x = next;
    }
    x
}

fn next_inside(b: f64, dir: f64) -> f64 {
    if b.is_finite() {
        b + dir * 1e-300_f64.max(b.abs() * f64::EPSILON)
    } else {
        b
    }
}
