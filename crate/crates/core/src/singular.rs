//! Integrals with a power-type singularity at the origin.
//!
//! Every construction in this crate eventually meets an integral of the form
//! `int_0^b g(s) ds` with `g(s) ~ C s^{-e}` as `s -> 0+`.  The exponent `e` is
//! estimated from a geometric ladder of samples; the infinite tail below the
//! ladder floor is integrated in closed form from the fitted power, and the
//! rest is handled by adaptive Simpson quadrature segment by segment.

use crate::quad::adaptive_simpson;
use crate::{Error, Result};

/// Exponent fit for `g(s) ~ C s^{-exponent}` near `0`.
#[derive(Debug, Clone, Copy)]
pub struct ExponentFit {
    pub exponent: f64,
    /// Spread of the consecutive-rung slopes (a stability diagnostic, not a
    /// statistical interval).
    pub band: (f64, f64),
}

/// Least-squares fit of `-d log g / d log s` over sample pairs `(s, g(s))`.
/// Returns `None` when fewer than two samples are finite and positive.
pub fn log_log_fit(s: &[f64], g: &[f64]) -> Option<ExponentFit> {
    let pts: Vec<(f64, f64)> = s
        .iter()
        .zip(g)
        .filter(|(si, gi)| si.is_finite() && gi.is_finite() && **si > 0.0 && **gi > 0.0)
        .map(|(si, gi)| (si.ln(), gi.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let xbar = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ybar = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in &pts {
        num += (x - xbar) * (y - ybar);
        den += (x - xbar) * (x - xbar);
    }
    let slope = num / den;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for w in pts.windows(2) {
        let local = -(w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        lo = lo.min(local);
        hi = hi.max(local);
    }
    Some(ExponentFit { exponent: -slope, band: (lo, hi) })
}

/// Closed-form tail `int_0^{s0} C s^{-e} ds` with `C` calibrated so the power
/// matches `g0 = g(s0)`; requires `e < 1`.
pub fn power_tail(s0: f64, g0: f64, exponent: f64) -> Result<f64> {
    if exponent >= 1.0 {
        return Err(Error::DivergentIntegral(format!(
            "tail exponent {exponent} >= 1, integral does not converge at 0"
        )));
    }
    Ok(g0 * s0 / (1.0 - exponent))
}

#[derive(Debug, Clone)]
pub struct SingularCumulative {
    /// `values[i] = int_0^{nodes[i]} g`.
    pub values: Vec<f64>,
    /// Exponent used for the tail below `nodes[0]`.
    pub exponent: f64,
}

/// Cumulative singular integral along strictly increasing `nodes`, the first
/// of which must be positive; the stretch `[0, nodes[0]]` is integrated from
/// the fitted (or supplied) power behaviour.
pub fn cumulative_singular(
    g: &dyn Fn(f64) -> f64,
    nodes: &[f64],
    exponent_hint: Option<f64>,
) -> Result<SingularCumulative> {
    if nodes.len() < 2 || nodes[0] <= 0.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "cumulative_singular needs strictly increasing nodes starting above 0".into(),
        ));
    }
    let exponent = match exponent_hint {
        Some(e) => e,
        None => {
            let s: Vec<f64> = (0..=12).map(|j| nodes[0] * 2f64.powi(j)).collect();
            let vals: Vec<f64> = s.iter().map(|&si| g(si)).collect();
            log_log_fit(&s, &vals)
                .ok_or_else(|| {
                    Error::DivergentIntegral("integrand not positive near the origin".into())
                })?
                .exponent
        }
    };
    let g0 = g(nodes[0]);
    if !g0.is_finite() {
        return Err(Error::DivergentIntegral(format!(
            "integrand not finite at s = {}",
            nodes[0]
        )));
    }
    let mut values = Vec::with_capacity(nodes.len());
    values.push(power_tail(nodes[0], g0, exponent)?);
    for w in nodes.windows(2) {
        let rough = (w[1] - w[0]) * g(0.5 * (w[0] + w[1]));
        let tol = 1e-12 * (rough.abs() + 1e-300);
        let seg = adaptive_simpson(g, w[0], w[1], tol);
        let prev = *values.last().unwrap();
        values.push(prev + seg);
    }
    Ok(SingularCumulative { values, exponent })
}
