//! Quadrature helpers: composite trapezoid, adaptive Simpson, and fourth-order
//! cumulative integration on uniform grids.

/// Composite trapezoid rule over arbitrary nodes.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    acc
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// `tol` is treated as an absolute tolerance on the whole interval and is
/// split across subintervals in the usual way; recursion stops at depth 60
/// regardless, so the routine terminates even on integrands it cannot resolve.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson_cell(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60)
}

fn simpson_cell(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_cell(a, m, fa, flm, fm);
    let right = simpson_cell(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        // a non-finite sample: subdividing cannot recover, so report the
        // poisoned estimate instead of recursing forever
        return left + right;
    }
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Cumulative integral `C[i] = integral from x[0] to x[i]` of samples `y` on a
/// uniform grid, fourth-order accurate (each cell integrates the cubic through
/// four neighbouring samples; short inputs fall back to lower-order rules).
pub fn cumulative_uniform(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert_eq!(n, y.len());
    assert!(n >= 2, "need at least two nodes");
    let h = (x[n - 1] - x[0]) / (n - 1) as f64;
    let mut c = vec![0.0; n];
    if n == 2 {
        c[1] = 0.5 * h * (y[0] + y[1]);
        return c;
    }
    if n == 3 {
        c[1] = h / 12.0 * (5.0 * y[0] + 8.0 * y[1] - y[2]);
        c[2] = c[1] + h / 12.0 * (-y[0] + 8.0 * y[1] + 5.0 * y[2]);
        return c;
    }
    for i in 1..n {
        let cell = if i == 1 {
            h / 24.0 * (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3])
        } else if i == n - 1 {
            h / 24.0 * (y[n - 4] - 5.0 * y[n - 3] + 19.0 * y[n - 2] + 9.0 * y[n - 1])
        } else {
            h / 24.0 * (-y[i - 2] + 13.0 * y[i - 1] + 13.0 * y[i] - y[i + 1])
        };
        c[i] = c[i - 1] + cell;
    }
    c
}

/// Reverse cumulative integral `C[i] = integral from x[i] to x[n-1]` of `y` on
/// a uniform grid, fourth-order accurate.
pub fn reverse_cumulative_uniform(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let total_forward = cumulative_uniform(x, y);
    let total = total_forward[n - 1];
    total_forward.into_iter().map(|c| total - c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn trapezoid_linear_exact() {
        let x = uniform(0.0, 2.0, 9);
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t + 1.0).collect();
        assert!((trapezoid(&x, &y) - 8.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_simpson_smooth() {
        let val = adaptive_simpson(&|t: f64| t.exp(), 0.0, 1.0, 1e-12);
        assert!((val - (1f64.exp() - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn adaptive_simpson_integrable_singularity() {
        // integral of s^{-1/2} over (0,1] = 2, evaluated from a tiny offset
        let val = adaptive_simpson(&|t: f64| t.powf(-0.5), 1e-12, 1.0, 1e-10);
        assert!((val - (2.0 - 2e-6)).abs() < 1e-7, "got {val}");
    }

    #[test]
    fn cumulative_uniform_quadratic_exact() {
        let x = uniform(0.0, 1.0, 11);
        let y: Vec<f64> = x.iter().map(|t| t * t).collect();
        let c = cumulative_uniform(&x, &y);
        for (i, t) in x.iter().enumerate() {
            assert!((c[i] - t * t * t / 3.0).abs() < 1e-15, "node {i}");
        }
    }

    #[test]
    fn cumulative_uniform_fourth_order() {
        let exact = |t: f64| -> f64 { 1.0 - t.cos() };
        let mut errs = Vec::new();
        for &n in &[17usize, 33] {
            let x = uniform(0.0, 1.0, n);
            let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
            let c = cumulative_uniform(&x, &y);
            let err = x
                .iter()
                .zip(&c)
                .map(|(t, ci)| (ci - exact(*t)).abs())
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        let rate = (errs[0] / errs[1]).log2();
        assert!(rate > 3.5, "observed rate {rate}");
    }

    #[test]
    fn reverse_cumulative_matches_forward() {
        let x = uniform(0.0, 1.0, 21);
        let y: Vec<f64> = x.iter().map(|t| (1.0 + t).ln()).collect();
        let fw = cumulative_uniform(&x, &y);
        let rv = reverse_cumulative_uniform(&x, &y);
        for i in 0..x.len() {
            assert!((fw[i] + rv[i] - fw[x.len() - 1]).abs() < 1e-14);
        }
        assert_eq!(rv[x.len() - 1], 0.0);
    }
}
