//! Dead-core supersolution profiles.
//!
//! The increasing profile `phi` is defined implicitly by
//!
//! ```text
//! t = int_0^{phi(t)} ds / GammaInv(F(s)/4),      F(t) = int_0^t f,
//! ```
//!
//! equivalently by the first-order identity `Gamma(phi') = F(phi)/4` with
//! `phi(0) = phi'(0) = 0`.  The integrand is singular at `0`, so `t(phi)`
//! is tabulated on a geometric ladder with a fitted power tail and inverted
//! monotonically onto a uniform grid.  Derivatives come from the exact
//! relations
//!
//! ```text
//! phi'  = GammaInv(F(phi)/4),
//! phi'' = f(phi) phi' / (4 Gamma'(phi')),
//! ```
//!
//! not from finite differences (except one one-sided stencil at `t = 0`
//! where `Gamma'` vanishes).  On `(0, r_circ)` the profile satisfies the
//! differential inequality `L phi + G(phi') - f(phi)/2 <= 0`; reflecting
//! and shifting it produces a radial supersolution
//! `v(r) = phi(R + r_circ - r)` that vanishes identically past its support
//! edge `R + r_circ`.

use crate::interp::MonotoneCubic;
use crate::nonlinearity::{
    classify_integral, GradientTermSpec, IntegrandSelector, NonlinearitySpec, Verdict,
};
use crate::profile::{Profile, Provenance};
use crate::radial::{
    residual_report, uniform_spacing, GradientData, ResidualReport, SignMode, TargetEquation,
};
use crate::report;
use crate::singular::cumulative_singular;
use crate::{Error, Result};

/// Nodes of the uniform output grid on `[0, horizon]`.
pub const T_GRID_NODES: usize = 1025;

/// Bottom of the geometric ladder used to tabulate `t(phi)`.
pub const PHI_LADDER_FLOOR: f64 = 1e-12;

/// Ladder resolution.
pub const PHI_LADDER_PER_DECADE: usize = 64;

/// Slack accepted when judging the pointwise differential inequality.
pub const INEQUALITY_TOLERANCE: f64 = 1e-10;

fn phi_ladder(cap: f64) -> Vec<f64> {
    let decades = (cap / PHI_LADDER_FLOOR).log10();
    let steps = (decades * PHI_LADDER_PER_DECADE as f64).ceil() as usize;
    let mut ladder: Vec<f64> = (0..steps)
        .map(|j| PHI_LADDER_FLOOR * 10f64.powf(j as f64 / PHI_LADDER_PER_DECADE as f64))
        .filter(|&v| v < cap)
        .collect();
    ladder.push(cap);
    ladder
}

/// Builds the dead-core profile on a uniform grid over `[0, horizon]`.
///
/// Requires the dead-core integral `int_0 ds / GammaInv(F(s)/4)` to
/// converge (checked with the classifier) and the tabulated range to reach
/// `horizon`.
pub fn build_deadcore_profile(
    f: &NonlinearitySpec,
    g: &GradientTermSpec,
    horizon: f64,
) -> Result<Profile> {
    if horizon <= 0.0 {
        return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
    }
    let delta = f.domain_cap().min(1.0);
    let class = classify_integral(f, IntegrandSelector::inverse_gamma_inv(g, 0.25), delta)?;
    if class.verdict != Verdict::Converges {
        return Err(Error::DivergentIntegral(format!(
            "dead-core integral verdict {} (exponent estimate {:.4}); no dead-core profile exists",
            class.verdict, class.estimated_singularity_exponent
        )));
    }

    let ladder = phi_ladder(f.domain_cap());
    let failed = std::cell::Cell::new(false);
    let integrand = |s: f64| -> f64 {
        let r = f
            .primitive(s)
            .and_then(|big_f| g.invert_gamma(big_f / 4.0))
            .map(|t| if t > 0.0 { 1.0 / t } else { f64::INFINITY });
        match r {
            Ok(v) => v,
            Err(_) => {
                failed.set(true);
                f64::NAN
            }
        }
    };
    let tabulated = cumulative_singular(&integrand, &ladder, None)?;
    if failed.get() || tabulated.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "dead-core quadrature left the admissible domain; enlarge the domain caps".into(),
        ));
    }
    let t_top = *tabulated.values.last().unwrap();
    if t_top < horizon {
        return Err(Error::Domain(format!(
            "horizon {horizon} beyond the tabulated range {t_top:.6} (raise the domain cap)"
        )));
    }

    let mut t_knots = Vec::with_capacity(ladder.len() + 1);
    let mut phi_knots = Vec::with_capacity(ladder.len() + 1);
    t_knots.push(0.0);
    phi_knots.push(0.0);
    t_knots.extend_from_slice(&tabulated.values);
    phi_knots.extend_from_slice(&ladder);
    let inverse = MonotoneCubic::new(t_knots, phi_knots)?;

    let n = T_GRID_NODES;
    let grid: Vec<f64> = (0..n).map(|i| horizon * i as f64 / (n - 1) as f64).collect();
    let h = grid[1] - grid[0];
    let mut values = vec![0.0; n];
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 1..n {
        values[i] = inverse.eval(grid[i]).max(0.0);
        d1[i] = g.invert_gamma(f.primitive(values[i])? / 4.0)?;
        let slope = g.gamma_derivative(d1[i])?;
        if slope <= 0.0 {
            return Err(Error::InvariantViolation(format!(
                "Gamma' vanished at node {i}; the profile is not strictly increasing there"
            )));
        }
        d2[i] = f.eval(values[i])? * d1[i] / (4.0 * slope);
    }
    d2[0] = (-3.0 * d1[0] + 4.0 * d1[1] - d1[2]) / (2.0 * h);
    Profile::new(grid, values, d1, d2, Some(0.0), Provenance::QuadratureInversion)
}

/// Outcome of [`determine_r_circ`]: the admissible shift together with the
/// two intermediate diagnostics (gradient and operator each bounded by
/// `f(phi)/4` on the admissible range).
#[derive(Debug, Clone)]
pub struct RCircReport {
    pub r_circ: f64,
    pub gradient_bound_ok: bool,
    pub operator_bound_ok: bool,
    /// First interior node where the differential inequality failed, when
    /// any; `r_circ` sits at this node.
    pub first_violation_node: Option<usize>,
    pub inequality: ResidualReport,
}

impl RCircReport {
    pub fn json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "r_circ": report::num(self.r_circ),
            "gradient_bound_ok": self.gradient_bound_ok,
            "operator_bound_ok": self.operator_bound_ok,
            "first_violation_node": self.first_violation_node,
            "inequality": self.inequality.json_value(),
        })
    }
}

/// Largest grid point `r_circ` such that `L phi + G(phi') - f(phi)/2 <= 0`
/// at every interior node below it.
pub fn determine_r_circ(
    profile: &Profile,
    f: &NonlinearitySpec,
    g: &GradientTermSpec,
) -> Result<RCircReport> {
    let inequality = residual_report(
        TargetEquation::DeadcoreInequality,
        profile,
        f,
        GradientData::Term(g),
        g.operator,
        SignMode::NonPositive,
        INEQUALITY_TOLERANCE,
    )?;
    let n = profile.len();
    let first_violation = (1..n - 1).find(|&i| inequality.residuals[i] > INEQUALITY_TOLERANCE);
    let (r_circ, limit) = match first_violation {
        Some(1) => {
            return Err(Error::NoValidRadius(
                "differential inequality already fails at the first interior node".into(),
            ))
        }
        Some(v) => (profile.grid[v], v),
        None => (*profile.grid.last().unwrap(), n - 1),
    };
    let check_bound = |target: TargetEquation| -> Result<bool> {
        let r = residual_report(
            target,
            profile,
            f,
            GradientData::Term(g),
            g.operator,
            SignMode::NonPositive,
            INEQUALITY_TOLERANCE,
        )?;
        Ok((1..limit).all(|i| r.residuals[i] <= INEQUALITY_TOLERANCE))
    };
    Ok(RCircReport {
        r_circ,
        gradient_bound_ok: check_bound(TargetEquation::DeadcoreGradientBound)?,
        operator_bound_ok: check_bound(TargetEquation::DeadcoreOperatorBound)?,
        first_violation_node: first_violation,
        inequality,
    })
}

/// Gluing tolerance for assembled profiles: value and slope at the support
/// edge must vanish to this accuracy.
pub const GLUING_TOLERANCE: f64 = 1e-9;

/// Reflects the profile into the radial supersolution
/// `v(r) = phi(R + r_circ - r)` on `[R, R + r_circ]`, extends it by zero
/// past the support edge, and verifies the C1 gluing.
pub fn assemble_radial_supersolution(
    profile: &Profile,
    big_r: f64,
    r_circ: f64,
) -> Result<Profile> {
    if big_r <= 0.0 || r_circ <= 0.0 {
        return Err(Error::Domain("assembly needs R > 0 and r_circ > 0".into()));
    }
    let last = *profile.grid.last().unwrap();
    if r_circ > last * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "r_circ {r_circ} exceeds the profile horizon {last}"
        )));
    }
    let h = uniform_spacing(&profile.grid)?;
    let m = profile.grid.partition_point(|&t| t <= r_circ + 1e-12 * last) - 1;
    if m < 2 {
        return Err(Error::Domain("r_circ leaves fewer than three profile nodes".into()));
    }
    let edge = big_r + profile.grid[m];
    let mut grid = Vec::with_capacity(m + 1);
    let mut values = Vec::with_capacity(m + 1);
    let mut d1 = Vec::with_capacity(m + 1);
    let mut d2 = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let j = m - i;
        grid.push(big_r + profile.grid[m] - profile.grid[j]);
        values.push(profile.values[j]);
        d1.push(-profile.first_derivative[j]);
        d2.push(profile.second_derivative[j]);
    }
    if values.last().unwrap().abs() > GLUING_TOLERANCE
        || d1.last().unwrap().abs() > GLUING_TOLERANCE
    {
        return Err(Error::GluingError(format!(
            "value {:+.3e} / slope {:+.3e} at the support edge exceed the gluing tolerance",
            values.last().unwrap(),
            d1.last().unwrap()
        )));
    }
    let tail = (m / 8).max(2);
    for j in 1..=tail {
        grid.push(edge + j as f64 * h);
        values.push(0.0);
        d1.push(0.0);
        d2.push(0.0);
    }
    Profile::new(grid, values, d1, d2, Some(edge), Provenance::Assembled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::OperatorTag;
    use crate::radial::kink_viscosity_check;

    fn linear_f() -> NonlinearitySpec {
        NonlinearitySpec::power_law(1.0, 1.0, 4.0).unwrap()
    }

    #[test]
    fn closed_form_quadratic_profile() {
        // f(s) = s, G == 0, L1: phi(t) = t^2 / (4 sqrt 2)
        let f = linear_f();
        let g = GradientTermSpec::zero(OperatorTag::L1);
        let p = build_deadcore_profile(&f, &g, 1.0).unwrap();
        let c = 1.0 / (4.0 * 2f64.sqrt());
        for i in 1..p.len() {
            let t = p.grid[i];
            let exact = c * t * t;
            assert!(
                (p.values[i] - exact).abs() <= 1e-6 * exact,
                "phi({t}) = {} vs {exact}",
                p.values[i]
            );
            assert!((p.first_derivative[i] - 2.0 * c * t).abs() <= 1e-6 * (2.0 * c * t));
            assert!((p.second_derivative[i] - 2.0 * c).abs() <= 1e-5 * (2.0 * c));
        }
        assert!((p.values[p.len() - 1] - 0.176777).abs() < 1e-6);
        assert_eq!(p.values[0], 0.0);
        assert_eq!(p.first_derivative[0], 0.0);
    }

    #[test]
    fn first_order_identity_holds_at_every_node() {
        let f = linear_f();
        let g = GradientTermSpec::zero(OperatorTag::L1);
        let p = build_deadcore_profile(&f, &g, 1.0).unwrap();
        for i in 0..p.len() {
            let lhs = g.gamma(p.first_derivative[i]).unwrap();
            let rhs = f.primitive(p.values[i]).unwrap() / 4.0;
            let scale = rhs.abs().max(1e-300);
            assert!((lhs - rhs).abs() <= 1e-10 * scale, "node {i}: {lhs} vs {rhs}");
        }
        // spec spot value at t = 1: Gamma(phi') = phi^2 / 8 ~ 0.00390625
        let last = p.len() - 1;
        let gamma = g.gamma(p.first_derivative[last]).unwrap();
        assert!((gamma - 0.00390625).abs() < 1e-7);
    }

    #[test]
    fn inversion_roundtrip_recovers_t() {
        let f = NonlinearitySpec::power_law(2.0, 3.0, 4.0).unwrap();
        let g = GradientTermSpec::zero(OperatorTag::L1);
        let p = build_deadcore_profile(&f, &g, 0.8).unwrap();
        // independent forward quadrature of t(phi) at a few profile values
        for &i in &[64usize, 256, 512, 1024] {
            let phi = p.values[i];
            let integrand = |s: f64| {
                1.0 / g.invert_gamma(f.primitive(s).unwrap() / 4.0).unwrap()
            };
            let ladder: Vec<f64> = (0..=800)
                .map(|j| 1e-12f64 * (phi / 1e-12).powf(j as f64 / 800.0))
                .collect();
            let t = *cumulative_singular(&integrand, &ladder, None)
                .unwrap()
                .values
                .last()
                .unwrap();
            assert!(
                (t - p.grid[i]).abs() < 2e-7 * p.grid[i].max(0.1),
                "t(phi({})) = {t} vs {}",
                p.grid[i],
                p.grid[i]
            );
        }
    }

    #[test]
    fn profile_monotonicity_and_domination() {
        for (q, lam) in [(1.0, 1.0), (2.0, 0.5), (0.5, 2.0)] {
            let f = NonlinearitySpec::power_law(q, lam, 8.0).unwrap();
            let g = GradientTermSpec::zero(OperatorTag::L1);
            let p = build_deadcore_profile(&f, &g, 1.0).unwrap();
            for i in 1..p.len() {
                assert!(p.values[i] > p.values[i - 1]);
                assert!(p.first_derivative[i] > p.first_derivative[i - 1]);
                // phi(t) = int_0^t phi' <= phi'(t) for t <= 1
                assert!(p.values[i] <= p.first_derivative[i] * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn divergent_integral_is_refused() {
        // q = 3 with the L1 gauge is the critical case; q = 4 diverges
        let f = NonlinearitySpec::power_law(4.0, 1.0, 4.0).unwrap();
        let g = GradientTermSpec::zero(OperatorTag::L1);
        assert!(matches!(
            build_deadcore_profile(&f, &g, 1.0),
            Err(Error::DivergentIntegral(_))
        ));
    }

    #[test]
    fn r_circ_is_horizon_when_inequality_never_fails() {
        let f = linear_f();
        let g = GradientTermSpec::zero(OperatorTag::L1);
        let p = build_deadcore_profile(&f, &g, 1.0).unwrap();
        let r = determine_r_circ(&p, &f, &g).unwrap();
        assert_eq!(r.r_circ, 1.0);
        assert!(r.gradient_bound_ok);
        assert!(r.operator_bound_ok);
        assert!(r.first_violation_node.is_none());
        // closed form of the inequality value: -t^2/(16 sqrt 2)
        let mid = p.len() / 2;
        let t = p.grid[mid];
        let expected = -t * t / (16.0 * 2f64.sqrt());
        assert!((r.inequality.residuals[mid] - expected).abs() < 1e-6 * expected.abs());
    }

    #[test]
    fn r_circ_matches_dense_closed_form_oracle() {
        // G(s) = s^3, f(s) = 4s: phi = t^2/(4 sqrt(17/2)), and the
        // inequality value is phi (1/17 - 2 + (2/17)^{3/4} sqrt(phi)),
        // whose first positive root is exactly t = 33
        let f = NonlinearitySpec::power_law(1.0, 4.0, 160.0).unwrap();
        let g = GradientTermSpec::power_law(3.0, 1.0, 20.0, OperatorTag::L1).unwrap();
        let p = build_deadcore_profile(&f, &g, 40.0).unwrap();
        let r = determine_r_circ(&p, &f, &g).unwrap();

        let c = 1.0 / (4.0 * (17.0f64 / 2.0).sqrt());
        let q_value = |t: f64| {
            let phi = c * t * t;
            phi * (1.0 / 17.0 - 2.0 + (2.0f64 / 17.0).powf(0.75) * phi.sqrt())
        };
        let dense: Vec<f64> = (0..20_000).map(|i| 40.0 * i as f64 / 19_999.0).collect();
        let oracle = dense
            .windows(2)
            .find(|w| q_value(w[0]) <= 0.0 && q_value(w[1]) > 0.0)
            .map(|w| w[1])
            .unwrap();
        assert!((oracle - 33.0).abs() < 0.01);

        let cell = p.grid[1] - p.grid[0];
        assert!(
            (r.r_circ - oracle).abs() <= cell + 1e-9,
            "r_circ {} vs oracle {oracle} (cell {cell})",
            r.r_circ
        );
        assert!(r.first_violation_node.is_some());
    }

    #[test]
    fn horizon_beyond_tabulated_range_is_an_error() {
        let f = NonlinearitySpec::power_law(1.0, 1.0, 0.5).unwrap();
        let g = GradientTermSpec::zero(OperatorTag::L1);
        // t(0.5) = 2 * 2^{1/4} * sqrt(0.5) ~ 1.68 < 3
        assert!(matches!(
            build_deadcore_profile(&f, &g, 3.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn assembled_supersolution_geometry_and_residual() {
        let f = linear_f();
        let g = GradientTermSpec::zero(OperatorTag::L1);
        let p = build_deadcore_profile(&f, &g, 1.0).unwrap();
        let rr = determine_r_circ(&p, &f, &g).unwrap();
        let v = assemble_radial_supersolution(&p, 1.0, rr.r_circ).unwrap();

        assert_eq!(v.grid[0], 1.0);
        assert!((v.values[0] - p.values[p.len() - 1]).abs() < 1e-15);
        assert_eq!(v.support_edge, Some(1.0 + rr.r_circ));
        let edge_idx = v.grid.iter().position(|&r| (r - (1.0 + rr.r_circ)).abs() < 1e-12).unwrap();
        assert_eq!(v.values[edge_idx], 0.0);
        assert_eq!(v.first_derivative[edge_idx], 0.0);
        assert!(v.values[v.len() - 1] == 0.0);
        assert!(kink_viscosity_check(&v, &f).pass);

        let annulus = residual_report(
            TargetEquation::SupersolutionAnnulus,
            &v,
            &f,
            GradientData::Term(&g),
            OperatorTag::L1,
            SignMode::NonPositive,
            INEQUALITY_TOLERANCE,
        )
        .unwrap();
        assert!(annulus.pass, "max violation {}", annulus.max_abs_residual);
    }

    #[test]
    fn scaled_integrand_verdicts_agree() {
        let g = GradientTermSpec::zero(OperatorTag::L1);
        for q in [0.5, 1.0, 2.0, 3.5] {
            let f = NonlinearitySpec::power_law(q, 1.0, 4.0).unwrap();
            let quarter =
                classify_integral(&f, IntegrandSelector::inverse_gamma_inv(&g, 0.25), 1.0)
                    .unwrap();
            let plain =
                classify_integral(&f, IntegrandSelector::inverse_gamma_inv(&g, 1.0), 1.0).unwrap();
            assert_eq!(quarter.verdict, plain.verdict, "q = {q}");
        }
    }
}
