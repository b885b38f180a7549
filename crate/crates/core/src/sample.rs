//! Paired observations `(X_i, Y_i)` with `X_i ∈ ℝᵖ` and `Y_i ∈ ℝ^q`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `n` paired rows. Both blocks share the row count and hold only finite
/// values; `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl PairedSample {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        if x.nrows() != y.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "x has {} rows, y has {} rows",
                x.nrows(),
                y.nrows()
            )));
        }
        if x.nrows() < 2 {
            return Err(Error::TooFewObservations {
                got: x.nrows(),
                min: 2,
            });
        }
        if x.ncols() == 0 || y.ncols() == 0 {
            return Err(Error::DimensionMismatch(
                "x and y need at least one column each".into(),
            ));
        }
        check_finite("x", &x)?;
        check_finite("y", &y)?;
        Ok(Self { x, y })
    }

    /// Univariate sample from two equal-length vectors.
    pub fn from_vecs(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let (nx, ny) = (x.len(), y.len());
        Self::new(DMatrix::from_vec(nx, 1, x), DMatrix::from_vec(ny, 1, y))
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn q(&self) -> usize {
        self.y.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn is_univariate(&self) -> bool {
        self.p() == 1 && self.q() == 1
    }

    /// Both columns as slices, for the `p = q = 1` estimators.
    pub fn univariate(&self) -> Result<(&[f64], &[f64])> {
        if !self.is_univariate() {
            return Err(Error::NotUnivariate {
                p: self.p(),
                q: self.q(),
            });
        }
        Ok((self.x.as_slice(), self.y.as_slice()))
    }

    /// Same sample with `x` and `y` exchanged.
    pub fn swap(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }

    /// Reorders the rows of `y` so that new row `i` is old row `perm[i]`;
    /// `x` is left untouched.
    pub fn permute_y(&self, perm: &[usize]) -> Self {
        debug_assert_eq!(perm.len(), self.n());
        Self {
            x: self.x.clone(),
            y: self.y.select_rows(perm),
        }
    }
}

fn check_finite(what: &'static str, m: &DMatrix<f64>) -> Result<()> {
    for col in 0..m.ncols() {
        for row in 0..m.nrows() {
            if !m[(row, col)].is_finite() {
                return Err(Error::NonFinite { what, row, col });
            }
        }
    }
    Ok(())
}
