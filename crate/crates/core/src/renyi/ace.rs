use serde::{Deserialize, Serialize};

use super::smooth::{RunningMean, SplineProjection};
use crate::basis::standardize;
use crate::correlation::{is_constant, pearson};
use crate::error::{Error, Result};
use crate::sample::PairedSample;

/// Conditional-expectation estimator used inside [`ace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmootherKind {
    /// [`SplineProjection`]; `r_hat` ascends monotonically.
    #[default]
    LinearSpline,
    /// [`RunningMean`]; not a projection, so ascent is not guaranteed.
    RunningMean,
}

enum Conditional {
    Spline(SplineProjection),
    Mean(RunningMean),
}

impl Conditional {
    fn new(kind: SmootherKind, v: &[f64], span: f64) -> Result<Self> {
        Ok(match kind {
            SmootherKind::LinearSpline => Conditional::Spline(SplineProjection::new(v, span)?),
            SmootherKind::RunningMean => Conditional::Mean(RunningMean::new(v, span)?),
        })
    }

    fn apply(&self, z: &[f64]) -> Vec<f64> {
        match self {
            Conditional::Spline(p) => p.apply(z),
            Conditional::Mean(m) => m.apply(z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AceOptions {
    /// Smoothing window as a fraction of `n`, in `(0, 1]`. For the spline
    /// smoother this is the quantile spacing of the knots.
    pub span: f64,
    pub max_iterations: usize,
    /// Stop once `r_hat` moves by less than this between iterations.
    pub tolerance: f64,
    #[serde(default)]
    pub smoother: SmootherKind,
}

impl Default for AceOptions {
    fn default() -> Self {
        Self {
            span: 0.3,
            max_iterations: 100,
            tolerance: 1e-6,
            smoother: SmootherKind::LinearSpline,
        }
    }
}

impl AceOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.span > 0.0 && self.span <= 1.0) {
            return Err(Error::InvalidParameter(format!("span must lie in (0, 1], got {}", self.span)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AceResult {
    pub r_hat: f64,
    /// `f̂(x_i)`, standardized.
    pub fx: Vec<f64>,
    /// `ĝ(y_i)`, standardized.
    pub gy: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `r_hat` after each iteration.
    pub history: Vec<f64>,
}

pub const ACE_MIN_N: usize = 10;

/// Alternating conditional expectations.
///
/// Starts from `ĝ = standardize(y)`, then alternates
/// `f̂ ← standardize(E[ĝ | x])` and `ĝ ← standardize(E[f̂ | y])` with the
/// conditional expectations estimated by the configured smoother. With the
/// default projection smoother each half-step maximizes the correlation over
/// one transformation, so `r_hat` never decreases. Hitting
/// `max_iterations` is reported through `converged = false`, not as an error.
pub fn ace(s: &PairedSample, opts: &AceOptions) -> Result<AceResult> {
    opts.validate()?;
    let (x, y) = s.univariate()?;
    let n = x.len();
    if n < ACE_MIN_N {
        return Err(Error::TooFewObservations { got: n, min: ACE_MIN_N });
    }
    if is_constant(x) || is_constant(y) {
        return Err(Error::DegenerateVariance("ace needs non-constant x and y".into()));
    }
    let sx = Conditional::new(opts.smoother, x, opts.span)?;
    let sy = Conditional::new(opts.smoother, y, opts.span)?;

    let collapsed = |what: &str| Error::DegenerateVariance(format!("smoothed {what} collapsed to a constant"));
    let mut gy = standardize(y)?;
    let mut fx = Vec::new();
    let mut history = Vec::with_capacity(opts.max_iterations);
    let mut converged = false;
    for _ in 0..opts.max_iterations {
        fx = standardize(&sx.apply(&gy)).map_err(|_| collapsed("f"))?;
        gy = standardize(&sy.apply(&fx)).map_err(|_| collapsed("g"))?;
        let r = pearson(&fx, &gy)?;
        let done = history.last().is_some_and(|prev: &f64| (r - prev).abs() < opts.tolerance);
        history.push(r);
        if done {
            converged = true;
            break;
        }
    }
    let mut r_hat = *history.last().expect("at least one iteration");
    if r_hat < 0.0 {
        fx.iter_mut().for_each(|v| *v = -*v);
        r_hat = -r_hat;
    }
    Ok(AceResult {
        r_hat,
        fx,
        gy,
        iterations: history.len(),
        converged,
        history,
    })
}
