//! Absorption terms `f`, gradient terms `G`, and the singular-integral
//! classifier.
//!
//! The equations studied here are `L[u] + gradient term = f(u)` with `f`
//! continuous, nondecreasing, `f(0) = 0`.  Whether the strong maximum
//! principle or the compact support principle governs is decided by the
//! convergence of an integral that is singular at `0`:
//!
//! - `int_0 F(s)^{-1/4} ds` (infinity Laplacian) or `F^{-1/2}` (normalized),
//!   where `F(t) = int_0^t f`,
//! - `int_0 ds / GammaInv(F(s))`, where `Gamma(t) = int_0^{2t} G + t^4/4`
//!   (or `+ t^2/2` for the normalized operator).
//!
//! [`classify_integral`] estimates the singularity exponent on a geometric
//! ladder and integrates the regular part adaptively, refusing to call the
//! boundary case.

use crate::quad::adaptive_simpson;
use crate::report;
use crate::singular::{cumulative_singular, log_log_fit};
use crate::{Error, Result};

/// Which operator an object is built for: `L1` is the infinity Laplacian
/// `(phi')^2 phi''` in radial form, `L0` the normalized one, `phi''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorTag {
    L1,
    L0,
}

impl std::fmt::Display for OperatorTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OperatorTag::L1 => write!(f, "L1"),
            OperatorTag::L0 => write!(f, "L0"),
        }
    }
}

/// One segment of a piecewise-power function: on `[start, next start)` the
/// function is `value(start) + scale * (s - start)^exponent`.
#[derive(Debug, Clone, Copy)]
pub struct PowerSegment {
    pub start: f64,
    pub scale: f64,
    pub exponent: f64,
}

/// Shared representation of a continuous nondecreasing function vanishing
/// at 0, together with its exact primitive.
#[derive(Debug, Clone)]
enum Shape {
    PowerLaw {
        exponent: f64,
        scale: f64,
    },
    /// Monotone piecewise-linear table; `cum[i]` is the exact integral up to
    /// knot `i`.
    Table {
        s: Vec<f64>,
        f: Vec<f64>,
        cum: Vec<f64>,
    },
    /// Piecewise power; `value_at` and `cum` are the accumulated offsets at
    /// segment starts.
    Piecewise {
        segments: Vec<PowerSegment>,
        value_at: Vec<f64>,
        cum: Vec<f64>,
    },
}

impl Shape {
    fn validate_domain(&self, s: f64, cap: f64) -> Result<()> {
        if !(0.0..=cap * (1.0 + 1e-9)).contains(&s) {
            return Err(Error::Domain(format!(
                "evaluation point {s} outside [0, {cap}]"
            )));
        }
        Ok(())
    }

    fn is_identically_zero(&self) -> bool {
        match self {
            Shape::PowerLaw { .. } => false,
            Shape::Table { f, .. } => f.iter().all(|&v| v == 0.0),
            Shape::Piecewise { segments, .. } => segments.iter().all(|seg| seg.scale == 0.0),
        }
    }

    fn eval(&self, s: f64, cap: f64) -> Result<f64> {
        if self.is_identically_zero() && s >= 0.0 {
            return Ok(0.0);
        }
        self.validate_domain(s, cap)?;
        Ok(match self {
            Shape::PowerLaw { exponent, scale } => scale * s.powf(*exponent),
            Shape::Table { s: xs, f: fs, .. } => {
                let i = cell_index(xs, s);
                let w = (s - xs[i]) / (xs[i + 1] - xs[i]);
                fs[i] + w * (fs[i + 1] - fs[i])
            }
            Shape::Piecewise { segments, value_at, .. } => {
                let i = segment_index(segments, s);
                value_at[i] + segments[i].scale * (s - segments[i].start).powf(segments[i].exponent)
            }
        })
    }

    fn primitive(&self, t: f64, cap: f64) -> Result<f64> {
        if self.is_identically_zero() && t >= 0.0 {
            return Ok(0.0);
        }
        self.validate_domain(t, cap)?;
        Ok(match self {
            Shape::PowerLaw { exponent, scale } => {
                scale * t.powf(exponent + 1.0) / (exponent + 1.0)
            }
            Shape::Table { s: xs, f: fs, cum } => {
                let i = cell_index(xs, t);
                let w = (t - xs[i]) / (xs[i + 1] - xs[i]);
                let ft = fs[i] + w * (fs[i + 1] - fs[i]);
                cum[i] + 0.5 * (t - xs[i]) * (fs[i] + ft)
            }
            Shape::Piecewise { segments, value_at, cum } => {
                let i = segment_index(segments, t);
                let d = t - segments[i].start;
                cum[i]
                    + value_at[i] * d
                    + segments[i].scale * d.powf(segments[i].exponent + 1.0)
                        / (segments[i].exponent + 1.0)
            }
        })
    }
}

fn cell_index(xs: &[f64], s: f64) -> usize {
    match xs.partition_point(|&v| v <= s) {
        0 => 0,
        p => (p - 1).min(xs.len() - 2),
    }
}

fn segment_index(segments: &[PowerSegment], s: f64) -> usize {
    match segments.partition_point(|seg| seg.start <= s) {
        0 => 0,
        p => p - 1,
    }
}

fn build_table_shape(points: Vec<(f64, f64)>) -> Result<Shape> {
    if points.len() < 2 {
        return Err(Error::Domain("table needs at least two sample points".into()));
    }
    if points[0].0 != 0.0 || points[0].1 != 0.0 {
        return Err(Error::InvariantViolation("table must start with (0, 0)".into()));
    }
    let s: Vec<f64> = points.iter().map(|p| p.0).collect();
    let f: Vec<f64> = points.iter().map(|p| p.1).collect();
    if s.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvariantViolation("table abscissae must strictly increase".into()));
    }
    if f.windows(2).any(|w| w[1] < w[0]) || f.iter().any(|&v| v < 0.0) {
        return Err(Error::InvariantViolation("table values must be nonnegative and nondecreasing".into()));
    }
    let mut cum = vec![0.0; s.len()];
    for i in 1..s.len() {
        cum[i] = cum[i - 1] + 0.5 * (s[i] - s[i - 1]) * (f[i] + f[i - 1]);
    }
    Ok(Shape::Table { s, f, cum })
}

fn build_piecewise_shape(segments: Vec<PowerSegment>) -> Result<Shape> {
    if segments.is_empty() {
        return Err(Error::Domain("piecewise spec needs at least one segment".into()));
    }
    if segments[0].start != 0.0 {
        return Err(Error::InvariantViolation("first piecewise segment must start at 0".into()));
    }
    if segments.windows(2).any(|w| w[1].start <= w[0].start) {
        return Err(Error::InvariantViolation("piecewise segment starts must strictly increase".into()));
    }
    if segments.iter().any(|seg| seg.scale < 0.0 || seg.exponent <= 0.0) {
        return Err(Error::InvariantViolation(
            "piecewise segments need scale >= 0 and exponent > 0".into(),
        ));
    }
    let mut value_at = vec![0.0; segments.len()];
    let mut cum = vec![0.0; segments.len()];
    for i in 1..segments.len() {
        let d = segments[i].start - segments[i - 1].start;
        value_at[i] = value_at[i - 1] + segments[i - 1].scale * d.powf(segments[i - 1].exponent);
        cum[i] = cum[i - 1]
            + value_at[i - 1] * d
            + segments[i - 1].scale * d.powf(segments[i - 1].exponent + 1.0)
                / (segments[i - 1].exponent + 1.0);
    }
    Ok(Shape::Piecewise { segments, value_at, cum })
}

/// The absorption term `f` with its exact primitive `F`.
#[derive(Debug, Clone)]
pub struct NonlinearitySpec {
    shape: Shape,
    domain_cap: f64,
}

impl NonlinearitySpec {
    /// `f(s) = scale * s^exponent`.
    pub fn power_law(exponent: f64, scale: f64, domain_cap: f64) -> Result<Self> {
        if exponent <= 0.0 || scale <= 0.0 {
            return Err(Error::Domain("power law needs exponent > 0 and scale > 0".into()));
        }
        Self::checked(Shape::PowerLaw { exponent, scale }, domain_cap)
    }

    /// Monotone piecewise-linear interpolation of `(s_i, f_i)`.
    pub fn table(points: Vec<(f64, f64)>, domain_cap: f64) -> Result<Self> {
        let shape = build_table_shape(points)?;
        if let Shape::Table { s, .. } = &shape {
            if !shape.is_identically_zero() && *s.last().unwrap() < domain_cap {
                return Err(Error::Domain("table must cover [0, domain_cap]".into()));
            }
        }
        Self::checked(shape, domain_cap)
    }

    /// Continuous piecewise-power function accumulated from `segments`.
    pub fn piecewise(segments: Vec<PowerSegment>, domain_cap: f64) -> Result<Self> {
        Self::checked(build_piecewise_shape(segments)?, domain_cap)
    }

    /// `f == 0`; used for pure-operator experiments.
    pub fn zero() -> Self {
        NonlinearitySpec {
            shape: build_table_shape(vec![(0.0, 0.0), (1.0, 0.0)]).unwrap(),
            domain_cap: 1.0,
        }
    }

    fn checked(shape: Shape, domain_cap: f64) -> Result<Self> {
        if domain_cap <= 0.0 {
            return Err(Error::Domain("domain_cap must be positive".into()));
        }
        Ok(NonlinearitySpec { shape, domain_cap })
    }

    pub fn domain_cap(&self) -> f64 {
        self.domain_cap
    }

    pub fn is_identically_zero(&self) -> bool {
        self.shape.is_identically_zero()
    }

    /// `f(s)`.
    pub fn eval(&self, s: f64) -> Result<f64> {
        self.shape.eval(s, self.domain_cap)
    }

    /// `F(t) = int_0^t f(s) ds`, exact per kind.
    pub fn primitive(&self, t: f64) -> Result<f64> {
        self.shape.primitive(t, self.domain_cap)
    }
}

/// The gradient term `G` with the accumulated gauge `Gamma` of its operator.
#[derive(Debug, Clone)]
pub struct GradientTermSpec {
    shape: Shape,
    domain_cap: f64,
    pub operator: OperatorTag,
}

impl GradientTermSpec {
    pub fn power_law(exponent: f64, scale: f64, domain_cap: f64, operator: OperatorTag) -> Result<Self> {
        if exponent <= 0.0 || scale <= 0.0 {
            return Err(Error::Domain("power law needs exponent > 0 and scale > 0".into()));
        }
        Ok(GradientTermSpec { shape: Shape::PowerLaw { exponent, scale }, domain_cap, operator })
    }

    pub fn table(points: Vec<(f64, f64)>, domain_cap: f64, operator: OperatorTag) -> Result<Self> {
        let shape = build_table_shape(points)?;
        Ok(GradientTermSpec { shape, domain_cap, operator })
    }

    pub fn piecewise(segments: Vec<PowerSegment>, domain_cap: f64, operator: OperatorTag) -> Result<Self> {
        Ok(GradientTermSpec { shape: build_piecewise_shape(segments)?, domain_cap, operator })
    }

    /// `G == 0`: the gauge reduces to its polynomial part.
    pub fn zero(operator: OperatorTag) -> Self {
        GradientTermSpec {
            shape: build_table_shape(vec![(0.0, 0.0), (1.0, 0.0)]).unwrap(),
            domain_cap: 1.0,
            operator,
        }
    }

    /// `G(s)`.
    pub fn eval(&self, s: f64) -> Result<f64> {
        self.shape.eval(s, self.domain_cap)
    }

    /// `Gamma(t) = int_0^{2t} G(s) ds + t^4/4` (L1) or `+ t^2/2` (L0).
    pub fn gamma(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("gamma needs t >= 0, got {t}")));
        }
        let poly = match self.operator {
            OperatorTag::L1 => 0.25 * t.powi(4),
            OperatorTag::L0 => 0.5 * t * t,
        };
        Ok(self.shape.primitive(2.0 * t, self.domain_cap)? + poly)
    }

    /// `Gamma'(t) = 2 G(2t) + t^3` (L1) or `2 G(2t) + t` (L0).
    pub fn gamma_derivative(&self, t: f64) -> Result<f64> {
        let poly = match self.operator {
            OperatorTag::L1 => t.powi(3),
            OperatorTag::L0 => t,
        };
        Ok(2.0 * self.shape.eval(2.0 * t, self.domain_cap)? + poly)
    }

    /// `GammaInv(y)`: the unique `t >= 0` with `Gamma(t) = y`, by bisection
    /// (`Gamma` is strictly increasing thanks to its polynomial part).
    /// `Gamma(t)` reads `G` on `[0, 2t]`, so the search is confined to
    /// `t <= domain_cap / 2`; targets beyond `Gamma` of that bound are
    /// domain errors rather than extrapolations.
    pub fn invert_gamma(&self, y: f64) -> Result<f64> {
        if y < 0.0 {
            return Err(Error::Domain(format!("invert_gamma needs y >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let t_max = if self.shape.is_identically_zero() {
            f64::INFINITY
        } else {
            let t_max = 0.5 * self.domain_cap;
            if self.gamma(t_max)? < y {
                return Err(Error::Domain(format!(
                    "invert_gamma target {y:.6e} exceeds Gamma({t_max:.6e}); raise the gradient-term domain cap"
                )));
            }
            t_max
        };
        let mut hi = y.powf(0.25).max(1e-150).min(t_max);
        let mut grow = 0;
        while self.gamma(hi)? < y {
            hi = (hi * 2.0).min(t_max);
            grow += 1;
            if grow > 4200 {
                return Err(Error::Domain("invert_gamma bracket expansion failed".into()));
            }
        }
        let mut lo = 0.0f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.gamma(mid)? < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Verdict of the singular-integral classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Diverges,
    Converges,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Diverges => "Diverges",
            Verdict::Converges => "Converges",
            Verdict::Inconclusive => "Inconclusive",
        };
        write!(f, "{s}")
    }
}

/// Integrand of the dichotomy integral.
#[derive(Debug, Clone, Copy)]
pub enum IntegrandSelector<'a> {
    /// `1 / (scale * F(s))^{1/p}`.
    InverseFPower { p: f64, scale: f64 },
    /// `1 / GammaInv(scale * F(s))`.
    InverseGammaInvF { g: &'a GradientTermSpec, scale: f64 },
}

impl<'a> IntegrandSelector<'a> {
    /// `F^{-1/4}`: the infinity-Laplacian dichotomy integrand.
    pub fn f_inv_quarter() -> Self {
        IntegrandSelector::InverseFPower { p: 4.0, scale: 1.0 }
    }

    /// `F^{-1/2}`: the normalized-operator dichotomy integrand.
    pub fn f_inv_half() -> Self {
        IntegrandSelector::InverseFPower { p: 2.0, scale: 1.0 }
    }

    /// `F^{-1/p}` for cross-checks against the general-exponent literature.
    pub fn f_inv_power(p: f64) -> Self {
        IntegrandSelector::InverseFPower { p, scale: 1.0 }
    }

    /// `H^{-1/p}` with `H = 4 kappa F`, the compact-support radius integrand
    /// (`p = 4` for L1, `p = 2` for L0).
    pub fn h_inv_power(p: f64, kappa: f64) -> Self {
        IntegrandSelector::InverseFPower { p, scale: 4.0 * kappa }
    }

    /// `1 / GammaInv(scale * F)`; `scale = 1/4` is the dead-core integrand.
    pub fn inverse_gamma_inv(g: &'a GradientTermSpec, scale: f64) -> Self {
        IntegrandSelector::InverseGammaInvF { g, scale }
    }

    pub fn describe(&self) -> String {
        match self {
            IntegrandSelector::InverseFPower { p, scale } if *scale == 1.0 => {
                format!("F^(-1/{p})")
            }
            IntegrandSelector::InverseFPower { p, scale } => format!("({scale}*F)^(-1/{p})"),
            IntegrandSelector::InverseGammaInvF { scale, .. } if *scale == 1.0 => {
                "1/GammaInv(F)".into()
            }
            IntegrandSelector::InverseGammaInvF { scale, .. } => {
                format!("1/GammaInv({scale}*F)")
            }
        }
    }

    pub fn eval(&self, f: &NonlinearitySpec, s: f64) -> Result<f64> {
        let big_f = f.primitive(s)?;
        match self {
            IntegrandSelector::InverseFPower { p, scale } => {
                let base = scale * big_f;
                if base == 0.0 {
                    Ok(f64::INFINITY)
                } else {
                    Ok(base.powf(-1.0 / p))
                }
            }
            IntegrandSelector::InverseGammaInvF { g, scale } => {
                let t = g.invert_gamma(scale * big_f)?;
                if t == 0.0 {
                    Ok(f64::INFINITY)
                } else {
                    Ok(1.0 / t)
                }
            }
        }
    }
}

/// Outcome of [`classify_integral`].
#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub verdict: Verdict,
    /// Fitted `e` in `integrand ~ C s^{-e}` as `s -> 0+` (infinite when the
    /// integrand is identically infinite near 0).
    pub estimated_singularity_exponent: f64,
    /// Finite for `Converges` (full integral including the fitted tail) and
    /// `Inconclusive` (regular part above the ladder floor only); `None` is
    /// the infinity marker.
    pub integral_estimate: Option<f64>,
    /// Spread of the consecutive-rung exponent estimates.
    pub confidence_band: (f64, f64),
    /// Set when `f` vanishes on an interval `[0, s0]`, `s0 > 0`: the
    /// integrand is infinite on a set of positive measure, so the verdict is
    /// `Diverges` regardless of the exponent fit.
    pub zero_plateau: bool,
}

impl ClassificationResult {
    pub fn json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "verdict": self.verdict.to_string(),
            "estimated_singularity_exponent": report::num(self.estimated_singularity_exponent),
            "integral_estimate": report::opt_num(self.integral_estimate),
            "confidence_band": [
                report::num(self.confidence_band.0),
                report::num(self.confidence_band.1),
            ],
            "zero_plateau": self.zero_plateau,
        })
    }
}

/// Margin around the critical exponent 1 inside which the classifier refuses
/// to call the dichotomy.
pub const INCONCLUSIVE_MARGIN: f64 = 0.02;

/// Number of halvings in the geometric sample ladder `s_k = delta 2^{-k}`.
pub const LADDER_DEPTH: u32 = 40;

/// Rungs used for the log-log exponent regression.
pub const FIT_RUNGS: usize = 12;

/// Classifies `int_0^delta integrand(s) ds` as divergent or convergent by
/// fitting the singularity exponent at `0` on a geometric ladder.
pub fn classify_integral(
    f: &NonlinearitySpec,
    selector: IntegrandSelector,
    delta: f64,
) -> Result<ClassificationResult> {
    if delta <= 0.0 {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    if delta > f.domain_cap() {
        return Err(Error::Domain(format!(
            "delta {delta} exceeds the nonlinearity domain cap {}",
            f.domain_cap()
        )));
    }
    let ladder: Vec<f64> = (0..=LADDER_DEPTH).map(|k| delta * 2f64.powi(-(k as i32))).collect();
    let mut values = Vec::with_capacity(ladder.len());
    for &s in &ladder {
        values.push(selector.eval(f, s)?);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Ok(ClassificationResult {
            verdict: Verdict::Diverges,
            estimated_singularity_exponent: f64::INFINITY,
            integral_estimate: None,
            confidence_band: (f64::INFINITY, f64::INFINITY),
            zero_plateau: true,
        });
    }
    let lo = ladder.len() - FIT_RUNGS;
    let fit = log_log_fit(&ladder[lo..], &values[lo..]).ok_or_else(|| {
        Error::Domain("exponent regression failed: integrand not positive on the ladder".into())
    })?;
    let e = fit.exponent;
    let verdict = if (e - 1.0).abs() <= INCONCLUSIVE_MARGIN {
        Verdict::Inconclusive
    } else if e > 1.0 {
        Verdict::Diverges
    } else {
        Verdict::Converges
    };
    let integral_estimate = match verdict {
        Verdict::Diverges => None,
        Verdict::Converges => {
            let mut nodes: Vec<f64> = ladder.clone();
            nodes.reverse();
            let integrand = |s: f64| selector.eval(f, s).unwrap_or(f64::INFINITY);
            let cum = cumulative_singular(&integrand, &nodes, Some(e))?;
            Some(*cum.values.last().unwrap())
        }
        Verdict::Inconclusive => {
            // regular part above the ladder floor; the tail has no stable
            // power extrapolation this close to the critical exponent
            let integrand = |s: f64| selector.eval(f, s).unwrap_or(f64::INFINITY);
            let mut acc = 0.0;
            for w in ladder.windows(2) {
                let (a, b) = (w[1], w[0]);
                let rough = ((b - a) * integrand(0.5 * (a + b))).abs();
                acc += adaptive_simpson(&integrand, a, b, 1e-12 * (rough + 1e-300));
            }
            Some(acc)
        }
    };
    Ok(ClassificationResult {
        verdict,
        estimated_singularity_exponent: e,
        integral_estimate,
        confidence_band: fit.band,
        zero_plateau: false,
    })
}
