//! Estimators of the Rényi (maximal) correlation
//! `R = sup corr(f(X), g(Y))` over square-integrable transformations.
//!
//! * [`kl_correlation`] restricts `f` and `g` to the spans of `K` and `L`
//!   weighted Hermite features; the maximum is then a first canonical
//!   correlation. Enlarging either span can only increase it.
//! * [`ace`] runs alternating conditional expectations and returns the fitted
//!   transformations alongside `R̂`. Conditional expectations are estimated
//!   by projection onto piecewise-linear functions by default, or by a
//!   nearest-neighbour running mean.

mod ace;
mod kl;
mod smooth;

pub use ace::{ace, AceOptions, AceResult, SmootherKind, ACE_MIN_N};
pub use kl::{kl_bruteforce, kl_correlation, KlOptions, KlResult, BRUTEFORCE_LIMIT};
pub use smooth::{smooth, RunningMean, SplineProjection};
