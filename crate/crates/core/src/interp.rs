//! Monotone piecewise-cubic interpolation (Fritsch–Carlson / PCHIP).
//!
//! Used to invert the monotone integral maps that define dead-core and
//! compact-support profiles: node slopes are the weighted harmonic means of
//! the secants, which keeps the interpolant monotone whenever the data are,
//! and reproduces smooth convex data to high order even on strongly graded
//! ladders.

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant through `(x, y)`; `x` must be strictly
    /// increasing and `y` monotone (either direction).
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Domain(
                "interpolation needs matching arrays with at least two nodes".into(),
            ));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("interpolation abscissae must strictly increase".into()));
        }
        let n = x.len();
        let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
        let sec: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        for k in 1..n - 1 {
            if sec[k - 1] * sec[k] <= 0.0 {
                d[k] = 0.0;
            } else {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / sec[k - 1] + w2 / sec[k]);
            }
        }
        d[0] = edge_slope(h[0], h.get(1).copied().unwrap_or(h[0]), sec[0], sec.get(1).copied().unwrap_or(sec[0]));
        d[n - 1] = edge_slope(
            h[n - 2],
            if n >= 3 { h[n - 3] } else { h[n - 2] },
            sec[n - 2],
            if n >= 3 { sec[n - 3] } else { sec[n - 2] },
        );
        Ok(Self { x, y, d })
    }

    /// Evaluates the interpolant; `xq` is clamped to the data range.
    pub fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        if xq <= self.x[0] {
            return self.y[0];
        }
        if xq >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.x.partition_point(|&v| v <= xq) {
            0 => 0,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * h * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * h * (t3 - t2)
    }

    /// Derivative of the interpolant at `xq` (clamped to the data range).
    pub fn eval_derivative(&self, xq: f64) -> f64 {
        let n = self.x.len();
        let xq = xq.clamp(self.x[0], self.x[n - 1]);
        let i = match self.x.partition_point(|&v| v < xq) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let i = i.min(n - 2);
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);
        let t2 = t * t;
        y0 * (6.0 * t2 - 6.0 * t) / h
            + d0 * (3.0 * t2 - 4.0 * t + 1.0)
            + y1 * (-6.0 * t2 + 6.0 * t) / h
            + d1 * (3.0 * t2 - 2.0 * t)
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }
}

/// Three-point endpoint slope (parabolic estimate with monotonicity fixes).
/// `h0, sec0` belong to the boundary cell, `h1, sec1` to its neighbour.
fn edge_slope(h0: f64, h1: f64, sec0: f64, sec1: f64) -> f64 {
    let mut d = ((2.0 * h0 + h1) * sec0 - h0 * sec1) / (h0 + h1);
    if d * sec0 <= 0.0 {
        d = 0.0;
    } else if sec0 * sec1 <= 0.0 && d.abs() > 3.0 * sec0.abs() {
        d = 3.0 * sec0;
    }
    d
}
