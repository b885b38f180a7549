//! Probabilists' Hermite polynomials and the weighted features
//! `f_k(x) = c_k · e^{−x²/4} · H_k(x)`.
//!
//! With `c_k = (2π)^{−1/4} (k!)^{−1/2}` the features are orthonormal in
//! `L²(ℝ)` under Lebesgue measure.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::correlation::{is_constant, mean};
use crate::error::{Error, Result};

/// `H_n(x)` via `H_{n+1} = x·H_n − n·H_{n−1}`, `H_0 = 1`, `H_1 = x`.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(2π)^{−1/4} (k!)^{−1/2}`.
pub fn normalization(k: usize) -> f64 {
    let log_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    (-0.25 * (2.0 * std::f64::consts::PI).ln() - 0.5 * log_fact).exp()
}

/// Mean 0, variance 1 (divisor `n`).
pub fn standardize(v: &[f64]) -> Result<Vec<f64>> {
    if v.len() < 2 {
        return Err(Error::TooFewObservations { got: v.len(), min: 2 });
    }
    if is_constant(v) {
        return Err(Error::DegenerateVariance("cannot standardize a constant vector".into()));
    }
    let mu = mean(v);
    let var = v.iter().map(|a| (a - mu) * (a - mu)).sum::<f64>() / v.len() as f64;
    if !(var > 0.0) {
        return Err(Error::DegenerateVariance("zero variance".into()));
    }
    let sd = var.sqrt();
    Ok(v.iter().map(|a| (a - mu) / sd).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    /// Number of basis functions.
    pub count: usize,
    /// Hermite index of the first column.
    pub start_index: usize,
    pub normalize: bool,
    pub standardize_input: bool,
}

impl BasisSpec {
    pub fn new(count: usize) -> Self {
        Self {
            count,
            start_index: 1,
            normalize: true,
            standardize_input: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidParameter("basis count must be >= 1".into()));
        }
        Ok(())
    }
}

/// `n × count` matrix whose column `j` is `f_{start_index + j}` evaluated at
/// the (optionally standardized) inputs.
pub fn feature_matrix(v: &[f64], spec: &BasisSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    if let Some(i) = v.iter().position(|a| !a.is_finite()) {
        return Err(Error::NonFinite {
            what: "basis input",
            row: i,
            col: 0,
        });
    }
    let xs = if spec.standardize_input {
        standardize(v)?
    } else {
        v.to_vec()
    };
    let scales: Vec<f64> = (0..spec.count)
        .map(|j| {
            if spec.normalize {
                normalization(spec.start_index + j)
            } else {
                1.0
            }
        })
        .collect();
    let last = spec.start_index + spec.count - 1;
    let mut m = DMatrix::zeros(xs.len(), spec.count);
    for (i, &x) in xs.iter().enumerate() {
        let w = (-0.25 * x * x).exp();
        // run the recurrence once per point and pick out the requested indices
        let (mut prev, mut cur) = (1.0, x);
        for k in 0..=last {
            let h = if k == 0 { prev } else { cur };
            if k >= spec.start_index {
                let j = k - spec.start_index;
                m[(i, j)] = scales[j] * w * h;
            }
            if k >= 1 {
                let next = x * cur - k as f64 * prev;
                prev = cur;
                cur = next;
            }
        }
    }
    Ok(m)
}
