//! First canonical correlation between two feature blocks.
//!
//! Maximizes `αᵀ Cxy β` subject to `αᵀ(Cxx + λI)α = βᵀ(Cyy + λI)β = 1`.
//! Each covariance block is whitened on its numerically retained eigen
//! subspace, and the largest singular value of the whitened cross
//! covariance is the canonical correlation.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::correlation::is_constant;
use crate::error::{Error, Result};

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Empirical centered second moments (divisor `n`) of two feature blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct CovTriple {
    pub cxx: DMatrix<f64>,
    pub cyy: DMatrix<f64>,
    pub cxy: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcaResult {
    pub rho: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub effective_rank_x: usize,
    pub effective_rank_y: usize,
}

fn centered(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut c = m.clone();
    for mut col in c.column_iter_mut() {
        if is_constant(col.as_slice()) {
            col.fill(0.0);
        } else {
            let mu = col.mean();
            col.add_scalar_mut(-mu);
        }
    }
    c
}

/// Column-centered cross products divided by `n`.
pub fn covariance_triple(fx: &DMatrix<f64>, gy: &DMatrix<f64>) -> Result<CovTriple> {
    if fx.nrows() != gy.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "feature blocks have {} and {} rows",
            fx.nrows(),
            gy.nrows()
        )));
    }
    let n = fx.nrows();
    if n < 2 {
        return Err(Error::TooFewObservations { got: n, min: 2 });
    }
    let (fc, gc) = (centered(fx), centered(gy));
    let inv_n = 1.0 / n as f64;
    let mut cxx = fc.tr_mul(&fc) * inv_n;
    let mut cyy = gc.tr_mul(&gc) * inv_n;
    let cxy = fc.tr_mul(&gc) * inv_n;
    symmetrize(&mut cxx);
    symmetrize(&mut cyy);
    Ok(CovTriple { cxx, cyy, cxy })
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let k = m.nrows();
    for i in 0..k {
        for j in (i + 1)..k {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// `C^{-1/2}` restricted to the eigenvectors whose eigenvalue exceeds
/// `rank_tol` times the largest one. Returns a `k × r` matrix `W` with
/// `Wᵀ C W = I_r`, and the largest eigenvalue.
fn whitener(c: &DMatrix<f64>, ridge: f64, rank_tol: f64) -> (DMatrix<f64>, f64) {
    let k = c.nrows();
    let reg = c + DMatrix::identity(k, k) * ridge;
    let eig = SymmetricEigen::new(reg);
    let max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = rank_tol * max;
    let mut keep: Vec<usize> = (0..k)
        .filter(|&i| {
            let l = eig.eigenvalues[i];
            l > 0.0 && l > cutoff && max > f64::MIN_POSITIVE
        })
        .collect();
    // descending eigenvalue order, index order for equal values
    keep.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut w = DMatrix::zeros(k, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        let scale = 1.0 / eig.eigenvalues[i].sqrt();
        w.set_column(j, &(eig.eigenvectors.column(i) * scale));
    }
    (w, max)
}

fn validate(c: &CovTriple) -> Result<()> {
    let (k, l) = (c.cxx.nrows(), c.cyy.nrows());
    if !c.cxx.is_square() || !c.cyy.is_square() || c.cxy.shape() != (k, l) {
        return Err(Error::DimensionMismatch(format!(
            "cxx {:?}, cyy {:?}, cxy {:?}",
            c.cxx.shape(),
            c.cyy.shape(),
            c.cxy.shape()
        )));
    }
    if k == 0 || l == 0 {
        return Err(Error::DimensionMismatch("empty feature block".into()));
    }
    Ok(())
}

/// Largest canonical correlation with its coefficient vectors.
///
/// `rho` is clamped to `[0, 1]`. When only one block is numerically zero the
/// correlation is 0 and that block's coefficient vector is all zeros.
pub fn first_canonical_correlation(c: &CovTriple, ridge: f64, rank_tol: f64) -> Result<CcaResult> {
    validate(c)?;
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::InvalidParameter(format!("ridge must be >= 0, got {ridge}")));
    }
    if !(0.0..1.0).contains(&rank_tol) {
        return Err(Error::InvalidParameter(format!(
            "rank_tol must lie in [0, 1), got {rank_tol}"
        )));
    }
    let (k, l) = (c.cxx.nrows(), c.cyy.nrows());
    let (wx, _) = whitener(&c.cxx, ridge, rank_tol);
    let (wy, _) = whitener(&c.cyy, ridge, rank_tol);
    let (rx, ry) = (wx.ncols(), wy.ncols());

    if rx == 0 && ry == 0 {
        return Err(Error::DegenerateFeatures);
    }
    if rx == 0 || ry == 0 {
        let first = |w: &DMatrix<f64>, len: usize| -> Vec<f64> {
            if w.ncols() == 0 {
                vec![0.0; len]
            } else {
                w.column(0).iter().copied().collect()
            }
        };
        let mut alpha = first(&wx, k);
        let mut beta = first(&wy, l);
        orient(&mut alpha, &mut beta);
        return Ok(CcaResult {
            rho: 0.0,
            alpha,
            beta,
            effective_rank_x: rx,
            effective_rank_y: ry,
        });
    }

    let m = wx.transpose() * &c.cxy * &wy;
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let top = svd.singular_values.imax();
    let rho = svd.singular_values[top].clamp(0.0, 1.0);
    let a: DVector<f64> = &wx * u.column(top);
    let b: DVector<f64> = &wy * vt.row(top).transpose();
    let mut alpha: Vec<f64> = a.iter().copied().collect();
    let mut beta: Vec<f64> = b.iter().copied().collect();
    orient(&mut alpha, &mut beta);
    Ok(CcaResult {
        rho,
        alpha,
        beta,
        effective_rank_x: rx,
        effective_rank_y: ry,
    })
}

/// Flip `(α, β)` jointly so that α's first nonzero coordinate is positive.
fn orient(alpha: &mut [f64], beta: &mut [f64]) {
    let lead = alpha
        .iter()
        .chain(beta.iter())
        .copied()
        .find(|v| *v != 0.0)
        .unwrap_or(0.0);
    if lead < 0.0 {
        alpha.iter_mut().for_each(|v| *v = -*v);
        beta.iter_mut().for_each(|v| *v = -*v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::pearson;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn quad(v: &[f64], m: &DMatrix<f64>) -> f64 {
        let v = DVector::from_column_slice(v);
        (v.transpose() * m * &v)[(0, 0)]
    }

    #[test]
    fn covariance_of_plus_minus_one() {
        let f = DMatrix::from_vec(2, 1, vec![1.0, -1.0]);
        let c = covariance_triple(&f, &f).unwrap();
        assert_eq!(c.cxx[(0, 0)], 1.0);
        assert_eq!(c.cyy[(0, 0)], 1.0);
        assert_eq!(c.cxy[(0, 0)], 1.0);
    }

    #[test]
    fn covariance_of_zero_column() {
        let f = DMatrix::from_vec(3, 2, vec![1.0, 4.0, 2.0, 0.3, 0.1, -7.0]);
        let g = DMatrix::zeros(3, 1);
        let c = covariance_triple(&f, &g).unwrap();
        assert_eq!(c.cyy[(0, 0)], 0.0);
        assert!(c.cxy.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn covariance_duplicate_columns_rank_one() {
        let col = [0.3, 1.7, -2.0, 0.4];
        let f = DMatrix::from_fn(4, 2, |i, _| col[i]);
        let c = covariance_triple(&f, &f).unwrap();
        let (w, _) = whitener(&c.cxx, 0.0, DEFAULT_RANK_TOL);
        assert_eq!(w.ncols(), 1);
    }

    #[test]
    fn covariance_shape_mismatch() {
        let f = DMatrix::zeros(3, 1);
        let g = DMatrix::zeros(4, 1);
        assert!(matches!(covariance_triple(&f, &g), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn scalar_cca_example() {
        let c = CovTriple {
            cxx: DMatrix::from_element(1, 1, 2.0),
            cyy: DMatrix::from_element(1, 1, 2.0),
            cxy: DMatrix::from_element(1, 1, 1.0),
        };
        let r = first_canonical_correlation(&c, 0.0, DEFAULT_RANK_TOL).unwrap();
        assert_abs_diff_eq!(r.rho, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(quad(&r.alpha, &c.cxx), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_cross_covariance() {
        let c = CovTriple {
            cxx: DMatrix::identity(2, 2),
            cyy: DMatrix::identity(3, 3),
            cxy: DMatrix::zeros(2, 3),
        };
        let r = first_canonical_correlation(&c, 0.0, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rho, 0.0);
    }

    #[test]
    fn identical_features_give_one() {
        let f = DMatrix::from_row_slice(5, 2, &[1., 0.2, -1., 3., 2., -0.5, 0.5, 0.1, -2., 1.]);
        let c = covariance_triple(&f, &f).unwrap();
        let r = first_canonical_correlation(&c, 0.0, DEFAULT_RANK_TOL).unwrap();
        assert_abs_diff_eq!(r.rho, 1.0, epsilon = 1e-10);
        for (a, b) in r.alpha.iter().zip(&r.beta) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn degenerate_both_blocks() {
        let z = DMatrix::from_element(4, 2, 3.0);
        let c = covariance_triple(&z, &z).unwrap();
        assert_eq!(first_canonical_correlation(&c, 0.0, DEFAULT_RANK_TOL), Err(Error::DegenerateFeatures));
    }

    #[test]
    fn one_degenerate_block_is_zero() {
        let f = DMatrix::from_vec(4, 1, vec![1., 2., 4., 3.]);
        let z = DMatrix::from_element(4, 1, 3.0);
        let c = covariance_triple(&f, &z).unwrap();
        let r = first_canonical_correlation(&c, 0.0, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rho, 0.0);
        assert_eq!(r.effective_rank_y, 0);
        assert_eq!(r.beta, vec![0.0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let c = CovTriple {
            cxx: DMatrix::identity(1, 1),
            cyy: DMatrix::identity(1, 1),
            cxy: DMatrix::zeros(1, 1),
        };
        assert!(first_canonical_correlation(&c, -1.0, 0.0).is_err());
        assert!(first_canonical_correlation(&c, 0.0, 1.0).is_err());
    }

    fn block(n: usize, k: usize) -> impl Strategy<Value = DMatrix<f64>> {
        proptest::collection::vec(-3.0..3.0f64, n * k).prop_map(move |v| DMatrix::from_vec(n, k, v))
    }

    proptest! {
        #[test]
        fn one_by_one_equals_abs_pearson(f in block(12, 1), g in block(12, 1)) {
            let c = covariance_triple(&f, &g).unwrap();
            let r = first_canonical_correlation(&c, 0.0, DEFAULT_RANK_TOL).unwrap();
            let p = pearson(f.as_slice(), g.as_slice()).unwrap().abs();
            prop_assert!((r.rho - p).abs() <= 1e-10);
        }

        #[test]
        fn normalization_and_reparameterization(
            f in block(25, 3),
            g in block(25, 2),
            t in proptest::collection::vec(-2.0..2.0f64, 9),
        ) {
            let c = covariance_triple(&f, &g).unwrap();
            let r = first_canonical_correlation(&c, 0.0, DEFAULT_RANK_TOL).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.rho));
            prop_assert!((quad(&r.alpha, &c.cxx) - 1.0).abs() <= 1e-8);
            prop_assert!((quad(&r.beta, &c.cyy) - 1.0).abs() <= 1e-8);

            let t = DMatrix::from_vec(3, 3, t);
            prop_assume!(t.determinant().abs() > 0.1);
            let ct = covariance_triple(&(&f * &t), &g).unwrap();
            let rt = first_canonical_correlation(&ct, 0.0, DEFAULT_RANK_TOL).unwrap();
            prop_assert!((r.rho - rt.rho).abs() <= 1e-8);
        }
    }
}
