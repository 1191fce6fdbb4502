//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid argument or evaluation outside a declared domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration invariant does not hold, or an iterate left its
    /// admissible set beyond tolerance.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// A construction requires a convergent singular integral but the
    /// classifier did not certify convergence.
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    /// The barrier shrink loop drove alpha below its floor without producing
    /// an admissible profile.
    #[error("no barrier: {0}")]
    NoBarrier(String),

    /// An iteration failed to converge within its budget.
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    /// No grid point satisfies the supersolution inequality.
    #[error("no valid radius: {0}")]
    NoValidRadius(String),

    /// An assembled profile fails to meet its extension continuously
    /// differentiably.
    #[error("gluing error: {0}")]
    GluingError(String),

    /// The requested geometry leaves no room for the construction.
    #[error("geometry error: {0}")]
    GeometryError(String),

    /// The normalized operator was evaluated where the gradient vanishes;
    /// the equation only constrains such points through its vanishing-gradient
    /// clause, not through a pointwise value.
    #[error("critical point at r = {0}: normalized operator undefined where the gradient vanishes")]
    CriticalPoint(f64),
}
