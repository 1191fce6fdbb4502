//! Sampled one-dimensional profiles with derivative channels.
//!
//! Every constructive routine in this crate returns its output as a
//! [`Profile`]: a strictly increasing grid with values, first and second
//! derivatives, an optional support edge (the abscissa beyond which the
//! assembled function vanishes identically or stops being represented),
//! and a provenance tag recording which pipeline produced it.

use crate::interp::MonotoneCubic;
use crate::report;
use crate::{Error, Result};

/// How a profile was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Quadrature of an explicit formula followed by monotone inversion.
    QuadratureInversion,
    /// Fixed-point (Picard) iteration of an integral operator.
    PicardIteration,
    /// Windowed integral-equation continuation of an ODE.
    WindowContinuation,
    /// Evaluated from a closed-form expression.
    ClosedForm,
    /// Glued from other profiles and constant pieces.
    Assembled,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Provenance::QuadratureInversion => "quadrature_inversion",
            Provenance::PicardIteration => "picard_iteration",
            Provenance::WindowContinuation => "window_continuation",
            Provenance::ClosedForm => "closed_form",
            Provenance::Assembled => "assembled",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct Profile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub first_derivative: Vec<f64>,
    pub second_derivative: Vec<f64>,
    pub support_edge: Option<f64>,
    pub provenance: Provenance,
}

impl Profile {
    pub fn new(
        grid: Vec<f64>,
        values: Vec<f64>,
        first_derivative: Vec<f64>,
        second_derivative: Vec<f64>,
        support_edge: Option<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::Domain("profile needs at least two grid nodes".into()));
        }
        if grid.len() != values.len()
            || grid.len() != first_derivative.len()
            || grid.len() != second_derivative.len()
        {
            return Err(Error::Domain("profile channel lengths disagree".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("profile grid must strictly increase".into()));
        }
        if values.iter().any(|v| !v.is_finite())
            || first_derivative.iter().any(|v| !v.is_finite())
            || second_derivative.iter().any(|v| !v.is_finite())
        {
            return Err(Error::Domain("profile channels must be finite".into()));
        }
        Ok(Profile { grid, values, first_derivative, second_derivative, support_edge, provenance })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Shape-preserving cubic through `(grid, values)`.
    pub fn interpolant(&self) -> Result<MonotoneCubic> {
        MonotoneCubic::new(self.grid.clone(), self.values.clone())
    }

    /// Shape-preserving cubic through `(grid, first_derivative)`.
    pub fn derivative_interpolant(&self) -> Result<MonotoneCubic> {
        MonotoneCubic::new(self.grid.clone(), self.first_derivative.clone())
    }

    /// CSV rendering with header `t,phi,dphi,d2phi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,phi,dphi,d2phi\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.grid[i], self.values[i], self.first_derivative[i], self.second_derivative[i]
            ));
        }
        out
    }

    /// Deterministic JSON summary (endpoints, extrema, support edge); the
    /// full table goes to CSV, not JSON.
    pub fn json_summary(&self) -> serde_json::Value {
        let min = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        serde_json::json!({
            "grid_start": report::num(*self.grid.first().unwrap()),
            "grid_end": report::num(*self.grid.last().unwrap()),
            "nodes": self.grid.len(),
            "value_start": report::num(*self.values.first().unwrap()),
            "value_end": report::num(*self.values.last().unwrap()),
            "value_min": report::num(min),
            "value_max": report::num(max),
            "support_edge": self.support_edge.map(report::num).unwrap_or(serde_json::Value::Null),
            "provenance": self.provenance.to_string(),
        })
    }
}
