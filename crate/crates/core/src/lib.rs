//! Numerical laboratory for one-dimensional absorption problems driven by the
//! infinity Laplacian `L1[u] = u'' (u')^2` and its normalized companion
//! `L0[u] = u''` (radial calculus; the full operators act on `u(x) = phi(|x|)`).
//!
//! The crate answers one question from several independent directions: when does
//! the equation `L[u] + gradient term = f(u)` propagate positivity (strong
//! maximum principle) and when does it instead admit dead cores and compactly
//! supported solutions?  The modules are
//!
//! - [`nonlinearity`]: absorption terms `f`, gradient terms `G`, and the
//!   integral dichotomy classifier that separates the two regimes,
//! - [`barrier`]: boundary barriers proving positivity propagation,
//! - [`deadcore`]: radial supersolutions with dead cores,
//! - [`csp`]: compactly supported exact solutions built by fixed-point iteration,
//! - [`radial`]: residual checks for all profiles against their defining
//!   equations and inequalities,
//! - [`grid`]: finite-difference Dirichlet experiments exhibiting both regimes,
//! - [`report`]: deterministic JSON serialization shared by the CLI.

pub mod barrier;
pub mod csp;
pub mod deadcore;
pub mod error;
pub mod grid;
pub mod interp;
pub mod nonlinearity;
pub mod profile;
pub mod quad;
pub mod radial;
pub mod report;
pub mod singular;

pub use error::Error;
pub use nonlinearity::{
    classify_integral, ClassificationResult, GradientTermSpec, IntegrandSelector,
    NonlinearitySpec, OperatorTag, Verdict,
};
pub use profile::{Profile, Provenance};
pub use radial::{ResidualReport, SignMode, TargetEquation};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
