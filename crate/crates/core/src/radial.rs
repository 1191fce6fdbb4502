//! Radial calculus for the infinity Laplacian and its normalized variant,
//! residual evaluation, the exponential comparison counterexample, and the
//! support-edge viscosity bookkeeping.
//!
//! For a radial function `u(x) = phi(|x|)` away from the origin,
//!
//! - `L1 u = (phi')^2 phi''` (infinity Laplacian),
//! - `L0 u = phi''` wherever `phi' != 0` (normalized form, `L0 = |Du|^{-2} L1`).
//!
//! Every differential identity or inequality produced by the constructive
//! pipelines is re-checked here pointwise from the stored profile channels,
//! never from the pipeline's own internal state.

use crate::interp::MonotoneCubic;
use crate::nonlinearity::{GradientTermSpec, NonlinearitySpec, OperatorTag};
use crate::profile::Profile;
use crate::report;
use crate::{Error, Result};

/// Gradient data for residual evaluation: either a coefficient `K`
/// multiplying the operator's natural power of `phi'` (`K s^3` for L1,
/// `K s` for L0), or a full gradient term `G`.
#[derive(Debug, Clone, Copy)]
pub enum GradientData<'a> {
    Coefficient(f64),
    Term(&'a GradientTermSpec),
}

impl<'a> GradientData<'a> {
    fn coefficient(&self) -> Result<f64> {
        match self {
            GradientData::Coefficient(k) => Ok(*k),
            GradientData::Term(_) => Err(Error::Domain(
                "this residual target needs a gradient coefficient K, not a gradient term".into(),
            )),
        }
    }

    fn term(&self) -> Result<&'a GradientTermSpec> {
        match self {
            GradientData::Term(g) => Ok(g),
            GradientData::Coefficient(_) => Err(Error::Domain(
                "this residual target needs a gradient term G, not a coefficient".into(),
            )),
        }
    }
}

/// Uniform-grid first derivative, 4th-order everywhere (one-sided stencils
/// at the boundary); short inputs fall back to 2nd-order formulas.
pub fn fd_first_derivative(values: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 3 || h <= 0.0 {
        return Err(Error::Domain("finite differences need at least 3 nodes and h > 0".into()));
    }
    let y = values;
    let mut d = vec![0.0; n];
    if n >= 5 {
        d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h);
        d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / (12.0 * h);
        d[n - 2] = (-y[n - 5] + 6.0 * y[n - 4] - 18.0 * y[n - 3] + 10.0 * y[n - 2]
            + 3.0 * y[n - 1])
            / (12.0 * h);
        d[n - 1] = (3.0 * y[n - 5] - 16.0 * y[n - 4] + 36.0 * y[n - 3] - 48.0 * y[n - 2]
            + 25.0 * y[n - 1])
            / (12.0 * h);
        for i in 2..n - 2 {
            d[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h);
        }
    } else {
        d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
        d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
        for i in 1..n - 1 {
            d[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
        }
    }
    Ok(d)
}

/// Uniform-grid second derivative, 4th-order everywhere (one-sided stencils
/// at the boundary); short inputs fall back to 2nd-order formulas.
pub fn fd_second_derivative(values: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 4 || h <= 0.0 {
        return Err(Error::Domain("finite differences need at least 4 nodes and h > 0".into()));
    }
    let y = values;
    let h2 = h * h;
    let mut d = vec![0.0; n];
    if n >= 6 {
        d[0] = (45.0 * y[0] - 154.0 * y[1] + 214.0 * y[2] - 156.0 * y[3] + 61.0 * y[4]
            - 10.0 * y[5])
            / (12.0 * h2);
        d[1] = (10.0 * y[0] - 15.0 * y[1] - 4.0 * y[2] + 14.0 * y[3] - 6.0 * y[4] + y[5])
            / (12.0 * h2);
        d[n - 2] = (y[n - 6] - 6.0 * y[n - 5] + 14.0 * y[n - 4] - 4.0 * y[n - 3]
            - 15.0 * y[n - 2]
            + 10.0 * y[n - 1])
            / (12.0 * h2);
        d[n - 1] = (-10.0 * y[n - 6] + 61.0 * y[n - 5] - 156.0 * y[n - 4] + 214.0 * y[n - 3]
            - 154.0 * y[n - 2]
            + 45.0 * y[n - 1])
            / (12.0 * h2);
        for i in 2..n - 2 {
            d[i] = (-y[i - 2] + 16.0 * y[i - 1] - 30.0 * y[i] + 16.0 * y[i + 1] - y[i + 2])
                / (12.0 * h2);
        }
    } else {
        d[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / h2;
        d[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / h2;
        for i in 1..n - 1 {
            d[i] = (y[i - 1] - 2.0 * y[i] + y[i + 1]) / h2;
        }
    }
    Ok(d)
}

/// Grid spacing of a uniform grid, rejecting non-uniform input.
pub fn uniform_spacing(grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::Domain("grid needs at least two nodes".into()));
    }
    let h = grid[1] - grid[0];
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs() {
            return Err(Error::Domain("grid is not uniform".into()));
        }
    }
    Ok(h)
}

/// Evaluates the radial operator on a profile at a point strictly inside its
/// grid, interpolating the stored derivative channels.  The normalized
/// operator refuses critical points: the equation only constrains it through
/// the gradient-vanishing viscosity clause there, which is handled by
/// [`kink_viscosity_check`], not by a pointwise limit.
pub fn apply_operator_radial(operator: OperatorTag, profile: &Profile, r: f64) -> Result<f64> {
    let (a, b) = (profile.grid[0], *profile.grid.last().unwrap());
    if !(r > a && r < b) {
        return Err(Error::Domain(format!("point {r} not strictly inside [{a}, {b}]")));
    }
    let d1 = profile.derivative_interpolant()?.eval(r);
    let d2 = MonotoneCubic::new(profile.grid.clone(), profile.second_derivative.clone())?.eval(r);
    operator_value(operator, d1, d2, r)
}

/// Radial operator value from pointwise derivative data; the normalized
/// operator refuses critical points (`d1 == 0`), reporting their location.
pub fn operator_value(operator: OperatorTag, d1: f64, d2: f64, location: f64) -> Result<f64> {
    match operator {
        OperatorTag::L1 => Ok(d1 * d1 * d2),
        OperatorTag::L0 => {
            if d1 == 0.0 {
                Err(Error::CriticalPoint(location))
            } else {
                Ok(d2)
            }
        }
    }
}

/// Differential (in)equalities that profiles are checked against.  Each
/// variant names the expression whose pointwise value is the residual; the
/// required sign is supplied separately via [`SignMode`].
#[derive(Debug, Clone, Copy)]
pub enum TargetEquation {
    /// `((phi')^3)' + K (phi')^3 - f(phi) + alpha` (L1, using the stored
    /// second derivative for the outer differentiation) or
    /// `phi'' + K phi' - f(phi) + alpha` (L0).  `f` is extended by zero to
    /// negative arguments, matching the truncation used when building the
    /// barrier.
    BarrierOde { alpha: f64 },
    /// Operator excess of the barrier: `L phi + K (phi')^3 - f(phi)` (L1,
    /// signed gradient power) or `L phi + K phi' - f(phi)` (L0).  On an
    /// exact barrier the L0 value is the constant `-alpha`; the L1 value is
    /// `-alpha/3 + (2/3)(K (phi')^3 - f(phi))`, so only its sign is
    /// meaningful.
    SmpExcess,
    /// First-order dead-core identity `Gamma(|phi'|) - F(phi)/4`.
    DeadcoreIdentity,
    /// `L phi + G(|phi'|) - f(phi)/2`, the dead-core differential
    /// inequality on the increasing profile.
    DeadcoreInequality,
    /// Intermediate bound `G(|phi'|) - f(phi)/4`.
    DeadcoreGradientBound,
    /// Intermediate bound `L phi - f(phi)/4`.
    DeadcoreOperatorBound,
    /// `L v + G(|v'|) - f(v)/2` on the assembled annulus supersolution.
    SupersolutionAnnulus,
    /// Support-radius profile equation `L1 phi - kappa f(phi)` or
    /// `L0 phi - 2 kappa f(phi)` (the derivative of `r = int H^{-1/p}` with
    /// `H = 4 kappa F`).
    CspPhiOde { kappa: f64 },
    /// Fixed-point profile equation `(psi')^2 psi'' - K (psi')^3
    /// - 8 kappa f(psi)` (L1) or `psi'' - K psi' - 8 kappa f(psi)` (L0).
    CspPsiOde { kappa: f64 },
    /// Full equation for the assembled compact solution,
    /// `L v + K |v'|^3 - f(v)` (L1) or `L v + K |v'| - f(v)` (L0).
    CompactSolutionPde,
}

impl TargetEquation {
    /// Stable identifier used in JSON reports.
    pub fn id(&self, operator: OperatorTag) -> String {
        let suffix = match operator {
            OperatorTag::L1 => "l1",
            OperatorTag::L0 => "l0",
        };
        match self {
            TargetEquation::BarrierOde { .. } => format!("barrier_ode_{suffix}"),
            TargetEquation::SmpExcess => format!("smp_excess_{suffix}"),
            TargetEquation::DeadcoreIdentity => "deadcore_identity".into(),
            TargetEquation::DeadcoreInequality => format!("deadcore_inequality_{suffix}"),
            TargetEquation::DeadcoreGradientBound => "deadcore_gradient_bound".into(),
            TargetEquation::DeadcoreOperatorBound => "deadcore_operator_bound".into(),
            TargetEquation::SupersolutionAnnulus => format!("supersolution_annulus_{suffix}"),
            TargetEquation::CspPhiOde { .. } => format!("csp_phi_ode_{suffix}"),
            TargetEquation::CspPsiOde { .. } => format!("csp_psi_ode_{suffix}"),
            TargetEquation::CompactSolutionPde => format!("compact_solution_pde_{suffix}"),
        }
    }

    // pointwise PDE data: the term sources plus (value, d1, d2, location)
    // are each independently required
    #[allow(clippy::too_many_arguments)]
    fn eval(
        &self,
        f: &NonlinearitySpec,
        g_or_k: GradientData,
        operator: OperatorTag,
        phi: f64,
        d1: f64,
        d2: f64,
        location: f64,
    ) -> Result<f64> {
        // constructions extend f by zero below the dead core / past the
        // support edge; tiny negative overshoots evaluate through the same
        // extension
        let f_val = if phi < 0.0 { 0.0 } else { f.eval(phi)? };
        let grad_power = |k: f64| match operator {
            OperatorTag::L1 => k * d1.powi(3),
            OperatorTag::L0 => k * d1,
        };
        let grad_power_abs = |k: f64| match operator {
            OperatorTag::L1 => k * d1.abs().powi(3),
            OperatorTag::L0 => k * d1.abs(),
        };
        match self {
            TargetEquation::BarrierOde { alpha } => {
                let k = g_or_k.coefficient()?;
                let lead = match operator {
                    OperatorTag::L1 => 3.0 * d1 * d1 * d2,
                    OperatorTag::L0 => d2,
                };
                Ok(lead + grad_power(k) - f_val + alpha)
            }
            TargetEquation::SmpExcess => {
                let k = g_or_k.coefficient()?;
                Ok(operator_value(operator, d1, d2, location)? + grad_power(k) - f_val)
            }
            TargetEquation::DeadcoreIdentity => {
                let g = g_or_k.term()?;
                Ok(g.gamma(d1.abs())? - f.primitive(phi.max(0.0))? / 4.0)
            }
            TargetEquation::DeadcoreInequality | TargetEquation::SupersolutionAnnulus => {
                let g = g_or_k.term()?;
                Ok(operator_value(operator, d1, d2, location)? + g.eval(d1.abs())? - 0.5 * f_val)
            }
            TargetEquation::DeadcoreGradientBound => {
                let g = g_or_k.term()?;
                Ok(g.eval(d1.abs())? - 0.25 * f_val)
            }
            TargetEquation::DeadcoreOperatorBound => {
                Ok(operator_value(operator, d1, d2, location)? - 0.25 * f_val)
            }
            TargetEquation::CspPhiOde { kappa } => {
                let lead = operator_value(operator, d1, d2, location)?;
                match operator {
                    OperatorTag::L1 => Ok(lead - kappa * f_val),
                    OperatorTag::L0 => Ok(lead - 2.0 * kappa * f_val),
                }
            }
            TargetEquation::CspPsiOde { kappa } => {
                let k = g_or_k.coefficient()?;
                let lead = operator_value(operator, d1, d2, location)?;
                Ok(lead - grad_power(k) - 8.0 * kappa * f_val)
            }
            TargetEquation::CompactSolutionPde => {
                let k = g_or_k.coefficient()?;
                let lead = operator_value(operator, d1, d2, location)?;
                Ok(lead + grad_power_abs(k) - f_val)
            }
        }
    }
}

/// Required sign of a residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignMode {
    Equality,
    NonPositive,
    NonNegative,
}

impl std::fmt::Display for SignMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SignMode::Equality => "equality",
            SignMode::NonPositive => "<=0",
            SignMode::NonNegative => ">=0",
        };
        write!(f, "{s}")
    }
}

/// Pointwise residual check of one target equation over a profile.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub target: String,
    /// Residual at each grid node; endpoints that cannot be evaluated
    /// (e.g. critical points of the normalized operator) hold NaN and are
    /// excluded from the verdict.
    pub residuals: Vec<f64>,
    /// Equality mode: largest `|residual|` over interior nodes.  Inequality
    /// modes: largest signed violation (negative when the inequality holds
    /// with margin everywhere).
    pub max_abs_residual: f64,
    pub worst_node: usize,
    pub tolerance: f64,
    pub pass: bool,
    pub sign_mode: SignMode,
}

impl ResidualReport {
    pub fn json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "target": self.target,
            "max_abs_residual": report::num(self.max_abs_residual),
            "worst_node": self.worst_node,
            "tolerance": report::num(self.tolerance),
            "pass": self.pass,
            "sign_mode": self.sign_mode.to_string(),
            "nodes": self.residuals.len(),
        })
    }
}

/// Evaluates `target` at every node of `profile` from its stored channels
/// and judges interior nodes against `tolerance` under `sign_mode`.
pub fn residual_report(
    target: TargetEquation,
    profile: &Profile,
    f: &NonlinearitySpec,
    g_or_k: GradientData,
    operator: OperatorTag,
    sign_mode: SignMode,
    tolerance: f64,
) -> Result<ResidualReport> {
    let n = profile.len();
    let mut residuals = vec![f64::NAN; n];
    for (i, slot) in residuals.iter_mut().enumerate() {
        let value = target.eval(
            f,
            g_or_k,
            operator,
            profile.values[i],
            profile.first_derivative[i],
            profile.second_derivative[i],
            profile.grid[i],
        );
        match value {
            Ok(v) => *slot = v,
            Err(Error::CriticalPoint(_)) if i == 0 || i == n - 1 => {}
            Err(e) => return Err(e),
        }
    }
    let mut worst = 1;
    let mut worst_score = f64::NEG_INFINITY;
    for (i, &res) in residuals.iter().enumerate().take(n - 1).skip(1) {
        let score = match sign_mode {
            SignMode::Equality => res.abs(),
            SignMode::NonPositive => res,
            SignMode::NonNegative => -res,
        };
        if score > worst_score {
            worst_score = score;
            worst = i;
        }
    }
    Ok(ResidualReport {
        target: target.id(operator),
        residuals,
        max_abs_residual: worst_score,
        worst_node: worst,
        tolerance,
        pass: worst_score <= tolerance,
        sign_mode,
    })
}

/// `2 e^{3r} - e^{3 alpha r}`: the difference between the bounded-data
/// comparison bound and an exponential exact solution with unbounded data.
/// Its strict positivity on `[0, infinity)` for every `alpha` in `(0,1)`
/// shows the boundedness assumption in the comparison-based uniqueness
/// argument cannot be dropped.
pub fn counterexample_eval(alpha: f64, r: f64) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if r < 0.0 {
        return Err(Error::Domain(format!("r must be nonnegative, got {r}")));
    }
    Ok(2.0 * (3.0 * r).exp() - (3.0 * alpha * r).exp())
}

/// Minimum of [`counterexample_eval`] over a uniform grid on `[0, r_max]`.
#[derive(Debug, Clone, Copy)]
pub struct CounterexampleScan {
    pub min_value: f64,
    pub min_location: f64,
}

pub fn counterexample_scan(alpha: f64, r_max: f64, nodes: usize) -> Result<CounterexampleScan> {
    if r_max <= 0.0 || nodes < 2 {
        return Err(Error::Domain("scan needs r_max > 0 and at least 2 nodes".into()));
    }
    let mut best = CounterexampleScan { min_value: f64::INFINITY, min_location: 0.0 };
    for i in 0..nodes {
        let r = r_max * i as f64 / (nodes - 1) as f64;
        let v = counterexample_eval(alpha, r)?;
        if v < best.min_value {
            best = CounterexampleScan { min_value: v, min_location: r };
        }
    }
    Ok(best)
}

/// Structural check of the gradient-vanishing viscosity clause at a support
/// edge: the profile value and one-sided derivative must vanish there and
/// `f` must vanish at the edge value.  When all three hold, any admissible
/// smooth test touching at the edge has zero gradient, so the sub/super-
/// solution inequality reduces to the sign of the test's second derivative
/// extremes and holds structurally.
#[derive(Debug, Clone)]
pub struct KinkReport {
    pub pass: bool,
    pub edge: f64,
    pub edge_value: f64,
    pub edge_slope: f64,
    pub f_at_edge: f64,
    pub failure: Option<String>,
}

impl KinkReport {
    pub fn json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "pass": self.pass,
            "edge": report::num(self.edge),
            "edge_value": report::num(self.edge_value),
            "edge_slope": report::num(self.edge_slope),
            "f_at_edge": report::num(self.f_at_edge),
            "failure": self.failure.clone().map(serde_json::Value::String).unwrap_or(serde_json::Value::Null),
        })
    }
}

pub const KINK_TOLERANCE: f64 = 1e-9;

pub fn kink_viscosity_check(profile: &Profile, f: &NonlinearitySpec) -> KinkReport {
    let edge = match profile.support_edge {
        Some(e) => e,
        None => {
            return KinkReport {
                pass: false,
                edge: f64::NAN,
                edge_value: f64::NAN,
                edge_slope: f64::NAN,
                f_at_edge: f64::NAN,
                failure: Some("profile has no support edge".into()),
            }
        }
    };
    let first = profile.grid[0];
    let last = *profile.grid.last().unwrap();
    let idx = if (edge - last).abs() <= (edge - first).abs() { profile.len() - 1 } else { 0 };
    let edge_value = profile.values[idx];
    let edge_slope = profile.first_derivative[idx];
    let f_at_edge = f.eval(edge_value.max(0.0)).unwrap_or(f64::NAN);
    let mut failure = None;
    if edge_value.abs() > KINK_TOLERANCE {
        failure = Some(format!("edge value {edge_value} does not vanish"));
    } else if edge_slope.abs() > KINK_TOLERANCE {
        failure = Some(format!("edge slope {edge_slope} does not vanish"));
    } else if f_at_edge.is_nan() || f_at_edge.abs() > KINK_TOLERANCE {
        failure = Some(format!("f at the edge value is {f_at_edge}, not 0"));
    }
    KinkReport { pass: failure.is_none(), edge, edge_value, edge_slope, f_at_edge, failure }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Provenance;

    fn profile_from(
        a: f64,
        b: f64,
        n: usize,
        f0: impl Fn(f64) -> f64,
        f1: impl Fn(f64) -> f64,
        f2: impl Fn(f64) -> f64,
    ) -> Profile {
        let grid: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        let values = grid.iter().map(|&t| f0(t)).collect();
        let d1 = grid.iter().map(|&t| f1(t)).collect();
        let d2 = grid.iter().map(|&t| f2(t)).collect();
        Profile::new(grid, values, d1, d2, None, Provenance::ClosedForm).unwrap()
    }

    #[test]
    fn exponential_profile_operator_value() {
        let p = profile_from(0.5, 1.5, 101, f64::exp, f64::exp, f64::exp);
        let v = apply_operator_radial(OperatorTag::L1, &p, 1.0).unwrap();
        assert!((v - 1.0f64.exp().powi(3)).abs() < 1e-10);
        let v0 = apply_operator_radial(OperatorTag::L0, &p, 1.0).unwrap();
        assert!((v0 - 1.0f64.exp()).abs() < 1e-10);
    }

    #[test]
    fn quadratic_profile_operator_value() {
        let p = profile_from(0.0, 2.0, 41, |r| r * r, |r| 2.0 * r, |_| 2.0);
        let v = apply_operator_radial(OperatorTag::L1, &p, 1.0).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn linear_profile_vanishes_under_l1() {
        let p = profile_from(0.0, 1.0, 11, |r| r, |_| 1.0, |_| 0.0);
        for &r in &[0.25, 0.5, 0.75] {
            assert_eq!(apply_operator_radial(OperatorTag::L1, &p, r).unwrap(), 0.0);
        }
    }

    #[test]
    fn normalized_operator_refuses_critical_points() {
        let p = profile_from(-1.0, 1.0, 21, |r| r * r, |r| 2.0 * r, |_| 2.0);
        let err = apply_operator_radial(OperatorTag::L0, &p, 0.0);
        assert!(matches!(err, Err(Error::CriticalPoint(_))));
        assert!(apply_operator_radial(OperatorTag::L1, &p, 0.0).is_ok());
    }

    #[test]
    fn operator_consistency_off_critical_points() {
        let p = profile_from(
            0.0,
            3.0,
            61,
            |r| r + 0.1 * r.sin(),
            |r| 1.0 + 0.1 * r.cos(),
            |r| -0.1 * r.sin(),
        );
        for &r in &[0.3, 1.1, 2.4] {
            let l1 = apply_operator_radial(OperatorTag::L1, &p, r).unwrap();
            let l0 = apply_operator_radial(OperatorTag::L0, &p, r).unwrap();
            let d1 = p.derivative_interpolant().unwrap().eval(r);
            assert!((l1 - d1 * d1 * l0).abs() < 1e-12 * (1.0 + l1.abs()));
        }
    }

    #[test]
    fn fd_helpers_reach_fourth_order() {
        let run = |n: usize| {
            let h = 1.0 / (n - 1) as f64;
            let y: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
            let d1 = fd_first_derivative(&y, h).unwrap();
            let d2 = fd_second_derivative(&y, h).unwrap();
            let mut e1: f64 = 0.0;
            let mut e2: f64 = 0.0;
            for i in 2..n - 2 {
                let t = i as f64 * h;
                e1 = e1.max((d1[i] - t.cos()).abs());
                e2 = e2.max((d2[i] + t.sin()).abs());
            }
            (e1, e2)
        };
        // coarse enough that truncation, not rounding, dominates
        let (a1, a2) = run(26);
        let (b1, b2) = run(51);
        assert!(a1 / b1 > 12.0, "first-derivative rate too low: {}", a1 / b1);
        assert!(a2 / b2 > 12.0, "second-derivative rate too low: {}", a2 / b2);
    }

    #[test]
    fn counterexample_values() {
        assert!((counterexample_eval(0.5, 1.0).unwrap()
            - (2.0 * 3f64.exp() - 1.5f64.exp()))
        .abs()
            < 1e-12);
        assert!((counterexample_eval(0.5, 1.0).unwrap() - 35.6894).abs() < 1e-3);
        for alpha in [0.1, 0.5, 0.9] {
            assert_eq!(counterexample_eval(alpha, 0.0).unwrap(), 1.0);
            let scan = counterexample_scan(alpha, 10.0, 10_000).unwrap();
            assert!(scan.min_value > 0.0);
            assert_eq!(scan.min_location, 0.0);
        }
        assert!(counterexample_eval(1.0, 1.0).is_err());
    }

    #[test]
    fn zero_profile_has_zero_residuals() {
        let p = profile_from(0.0, 1.0, 11, |_| 0.0, |_| 0.0, |_| 0.0);
        let f = NonlinearitySpec::power_law(2.0, 1.0, 4.0).unwrap();
        let r = residual_report(
            TargetEquation::BarrierOde { alpha: 0.0 },
            &p,
            &f,
            GradientData::Coefficient(1.0),
            OperatorTag::L1,
            SignMode::Equality,
            1e-14,
        )
        .unwrap();
        assert!(r.pass);
        assert_eq!(r.max_abs_residual, 0.0);
    }

    #[test]
    fn inequality_mode_flags_exact_violation_node() {
        let mut p = profile_from(0.0, 1.0, 11, |_| 0.0, |_| -1.0, |_| -1.0);
        p.second_derivative[7] = 0.5;
        let f = NonlinearitySpec::power_law(1.0, 1.0, 4.0).unwrap();
        let g = GradientTermSpec::zero(OperatorTag::L0);
        let r = residual_report(
            TargetEquation::DeadcoreInequality,
            &p,
            &f,
            GradientData::Term(&g),
            OperatorTag::L0,
            SignMode::NonPositive,
            1e-12,
        )
        .unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_node, 7);
        assert!((r.max_abs_residual - 0.5).abs() < 1e-15);
    }

    #[test]
    fn kink_check_accepts_clean_edge_and_reports_bad_slope() {
        let n = 21;
        let grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = grid.iter().map(|t| (1.0 - t) * (1.0 - t)).collect();
        let d1: Vec<f64> = grid.iter().map(|t| -2.0 * (1.0 - t)).collect();
        let d2: Vec<f64> = grid.iter().map(|_| 2.0).collect();
        let f = NonlinearitySpec::power_law(1.0, 1.0, 4.0).unwrap();
        let p = Profile::new(grid.clone(), values.clone(), d1.clone(), d2.clone(), Some(1.0), Provenance::ClosedForm)
            .unwrap();
        assert!(kink_viscosity_check(&p, &f).pass);

        let mut bad_d1 = d1;
        bad_d1[n - 1] = 0.01;
        let p = Profile::new(grid, values, bad_d1, d2, Some(1.0), Provenance::ClosedForm).unwrap();
        let r = kink_viscosity_check(&p, &f);
        assert!(!r.pass);
        assert!(r.failure.unwrap().contains("slope"));
    }
}
