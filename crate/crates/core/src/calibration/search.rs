//! Derivative-free scalar minimization on an interval.

const GOLDEN: f64 = 0.381_966_011_250_105_1; // (3 - √5) / 2

/// Minimum found by [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Brent's method: golden-section steps accelerated by parabolic
/// interpolation, on `[lower, upper]`, until the bracket around the minimum
/// is narrower than `2·xtol` (plus a relative term of `√ε·|x|`).
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, lower: f64, upper: f64, xtol: f64) -> Minimum {
    let eps = f64::EPSILON.sqrt();
    let (mut a, mut b) = (lower.min(upper), lower.max(upper));
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut evaluations = 1;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    loop {
        let mid = 0.5 * (a + b);
        let tol1 = eps * x.abs() + xtol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            // Parabola through (v, fv), (w, fw), (x, fx).
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if mid >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        evaluations += 1;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Minimum {
        x,
        value: fx,
        evaluations,
    }
}

/// Global-then-local minimization: a uniform grid scan of `grid_points`
/// locates the best cell, then [`brent`] refines inside its neighbours.
/// Endpoints are kept as candidates so boundary minima are found.
pub fn minimize<F: FnMut(f64) -> f64>(
    mut f: F,
    lower: f64,
    upper: f64,
    grid_points: usize,
    xtol: f64,
) -> Minimum {
    let n = grid_points.max(3);
    let step = (upper - lower) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| lower + i as f64 * step).collect();
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("grid is non-empty");
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(n - 1)];
    let local = brent(&mut f, lo, hi, xtol);
    let mut result = Minimum {
        evaluations: local.evaluations + n,
        ..local
    };
    if values[best] < result.value {
        result.x = grid[best];
        result.value = values[best];
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimum() {
        let m = brent(|x| (x - 1.234_567).powi(2) + 3.0, 0.0, 5.0, 1e-9);
        assert!((m.x - 1.234_567).abs() < 1e-8, "{m:?}");
        assert!((m.value - 3.0).abs() < 1e-15);
    }

    #[test]
    fn non_smooth_minimum() {
        let m = brent(|x: f64| (x - 0.7).abs(), 0.0, 2.0, 1e-9);
        assert!((m.x - 0.7).abs() < 1e-8, "{m:?}");
    }

    #[test]
    fn boundary_minimum() {
        let m = minimize(|x| x, 1e-3, 5.0, 50, 1e-9);
        assert!((m.x - 1e-3).abs() < 1e-8, "{m:?}");
    }

    #[test]
    fn grid_scan_escapes_local_minimum() {
        // Local minimum at 4 (value 0.5), global at 1 (value 0).
        let f = |x: f64| ((x - 1.0).powi(2)).min(0.5 + (x - 4.0).powi(2));
        let m = minimize(f, 0.0, 5.0, 50, 1e-9);
        assert!((m.x - 1.0).abs() < 1e-7, "{m:?}");
    }
}
