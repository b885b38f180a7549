//! Distance covariance and distance correlation.
//!
//! The statistic is the weighted `L²` distance between the joint empirical
//! characteristic function and the product of the marginal ones. With the
//! scale-free weight, that integral has a closed form in pairwise Euclidean
//! distances:
//!
//! ```text
//! V²(X, Y) = (1/n²) Σ_{j,k} A_jk B_jk
//! ```
//!
//! where `A`, `B` are the doubly-centered distance matrices of the `x` and
//! `y` blocks. Both matrices are materialized, so memory is `O(n²)`; samples
//! beyond roughly `n = 20000` are impractical.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::par;
use crate::sample::PairedSample;

/// Largest `n` accepted by [`dcov2_naive`].
pub const NAIVE_LIMIT: usize = 200;

/// Euclidean distances between the rows of `points`.
pub fn pairwise_distances(points: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, d) = points.shape();
    let cols = par::map_indexed(n, |k| {
        (0..n)
            .map(|j| {
                if j == k {
                    return 0.0;
                }
                let mut s = 0.0;
                for c in 0..d {
                    let diff = points[(j, c)] - points[(k, c)];
                    s += diff * diff;
                }
                s.sqrt()
            })
            .collect::<Vec<f64>>()
    });
    DMatrix::from_vec(n, n, cols.concat())
}

/// `A_jk = m_jk − rowmean_j − colmean_k + grandmean`.
pub fn double_center(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    debug_assert!(m.is_square());
    let nf = n as f64;
    let col_means: Vec<f64> = par::map_indexed(n, |k| m.column(k).iter().sum::<f64>() / nf);
    let row_means: Vec<f64> = par::map_indexed(n, |j| m.row(j).iter().sum::<f64>() / nf);
    let grand = col_means.iter().sum::<f64>() / nf;
    let cols = par::map_indexed(n, |k| {
        (0..n)
            .map(|j| m[(j, k)] - row_means[j] - col_means[k] + grand)
            .collect::<Vec<f64>>()
    });
    DMatrix::from_vec(n, n, cols.concat())
}

/// Doubly-centered distance matrices for both blocks of a sample.
#[derive(Debug, Clone)]
pub struct CenteredDistances {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl CenteredDistances {
    pub fn new(s: &PairedSample) -> Self {
        Self {
            a: double_center(&pairwise_distances(s.x())),
            b: double_center(&pairwise_distances(s.y())),
        }
    }

    pub fn dcov2(&self) -> Result<f64> {
        clamp_v2(mean_product(&self.a, &self.b), &self.a, &self.b)
    }

    pub fn dvar2_x(&self) -> f64 {
        mean_product(&self.a, &self.a)
    }

    pub fn dvar2_y(&self) -> f64 {
        mean_product(&self.b, &self.b)
    }

    pub fn dcor(&self) -> Result<f64> {
        let (vx, vy) = (self.dvar2_x(), self.dvar2_y());
        if vx <= 0.0 || vy <= 0.0 {
            return Ok(0.0);
        }
        let vxy = self.dcov2()?;
        Ok((vxy.sqrt() / (vx * vy).sqrt().sqrt()).clamp(0.0, 1.0))
    }
}

/// `(1/n²) Σ a_jk b_jk`, summed column by column and then across columns in
/// a fixed order so the result does not depend on the thread count.
fn mean_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let partial = par::map_indexed(n, |k| {
        a.column(k)
            .iter()
            .zip(b.column(k).iter())
            .map(|(x, y)| x * y)
            .sum::<f64>()
    });
    partial.iter().sum::<f64>() / (n as f64 * n as f64)
}

fn clamp_v2(v: f64, a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if v >= 0.0 {
        return Ok(v);
    }
    // |V²| is bounded by the product of the rms of A and B; cancellation noise
    // scales with that bound.
    let scale = (mean_product(a, a) * mean_product(b, b)).sqrt().max(1.0);
    if v >= -1e-12 * scale {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!("squared distance covariance is negative: {v:e}")))
    }
}

/// Squared sample distance covariance `V²_n(X, Y)`.
pub fn dcov2(s: &PairedSample) -> Result<f64> {
    CenteredDistances::new(s).dcov2()
}

/// `√V²(X,Y) / (V²(X,X)·V²(Y,Y))^{1/4}`, or 0 when either marginal is
/// degenerate.
pub fn dcor(s: &PairedSample) -> Result<f64> {
    CenteredDistances::new(s).dcor()
}

/// Reference evaluation of [`dcov2`] from raw distances, without centering:
/// `S1 + S2 − 2·S3`. Quadratic memory and cubic-free, but kept to small `n`
/// since it exists to cross-check the centered form.
pub fn dcov2_naive(s: &PairedSample) -> Result<f64> {
    let n = s.n();
    if n > NAIVE_LIMIT {
        return Err(Error::SizeGuard {
            what: "dcov2_naive",
            n,
            limit: NAIVE_LIMIT,
        });
    }
    let dist = |m: &DMatrix<f64>, j: usize, k: usize| -> f64 {
        m.row(j)
            .iter()
            .zip(m.row(k).iter())
            .map(|(u, v)| (u - v) * (u - v))
            .sum::<f64>()
            .sqrt()
    };
    let nf = n as f64;
    let (mut s1, mut sum_a, mut sum_b, mut s3) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..n {
        let (mut row_a, mut row_b) = (0.0, 0.0);
        for k in 0..n {
            let a = dist(s.x(), j, k);
            let b = dist(s.y(), j, k);
            s1 += a * b;
            row_a += a;
            row_b += b;
        }
        sum_a += row_a;
        sum_b += row_b;
        s3 += row_a * row_b;
    }
    let s1 = s1 / (nf * nf);
    let s2 = (sum_a / (nf * nf)) * (sum_b / (nf * nf));
    let s3 = s3 / (nf * nf * nf);
    let v = s1 + s2 - 2.0 * s3;
    if v >= 0.0 {
        Ok(v)
    } else if v >= -1e-12 * (s1.abs() + s2.abs()).max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!("naive squared distance covariance is negative: {v:e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn univariate(x: &[f64], y: &[f64]) -> PairedSample {
        PairedSample::from_vecs(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn distances_examples() {
        let d = pairwise_distances(&DMatrix::from_vec(2, 1, vec![0.0, 1.0]));
        assert_eq!(d, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let d = pairwise_distances(&DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 3.0, 4.0]));
        assert_eq!(d[(0, 1)], 5.0);
        assert_eq!(d[(1, 0)], 5.0);
        let d = pairwise_distances(&DMatrix::from_row_slice(3, 2, &[1.5, -2.0, 1.5, -2.0, 1.5, -2.0]));
        assert!(d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn double_center_examples() {
        let c = double_center(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(c, DMatrix::from_row_slice(2, 2, &[-0.5, 0.5, 0.5, -0.5]));
        assert!(double_center(&DMatrix::zeros(4, 4)).iter().all(|&v| v == 0.0));
        assert!(double_center(&DMatrix::from_element(5, 5, 2.5)).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn double_center_sums_vanish() {
        let pts = DMatrix::from_fn(30, 2, |i, j| ((i * 7 + j * 3) % 11) as f64 * 0.37 - 1.0);
        let d = pairwise_distances(&pts);
        let a = double_center(&d);
        let mean_d = d.mean();
        for k in 0..30 {
            assert!(a.column(k).sum().abs() <= 1e-9 * 30.0 * mean_d);
            assert!(a.row(k).sum().abs() <= 1e-9 * 30.0 * mean_d);
        }
        assert!((&a - a.transpose()).amax() <= 1e-12);
    }

    #[test]
    fn dcov2_examples() {
        let s = univariate(&[0.0, 1.0], &[0.0, 1.0]);
        assert_eq!(dcov2(&s).unwrap(), 0.25);
        assert_eq!(dcov2_naive(&s).unwrap(), 0.25);
        let s = univariate(&[0.0, 1.0, 5.0], &[2.0, 2.0, 2.0]);
        assert_eq!(dcov2(&s).unwrap(), 0.0);
        assert_eq!(dcov2_naive(&s).unwrap(), 0.0);
    }

    #[test]
    fn naive_refuses_large_n() {
        let x: Vec<f64> = (0..201).map(f64::from).collect();
        let s = univariate(&x, &x);
        assert!(matches!(dcov2_naive(&s), Err(Error::SizeGuard { n: 201, .. })));
    }

    #[test]
    fn dcor_examples() {
        let x = [0.3, -1.2, 2.2, 0.9, 4.0, -0.1];
        assert_abs_diff_eq!(dcor(&univariate(&x, &x)).unwrap(), 1.0, epsilon = 1e-12);
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 7.0).collect();
        assert_abs_diff_eq!(dcor(&univariate(&x, &y)).unwrap(), 1.0, epsilon = 1e-9);
        assert_eq!(dcor(&univariate(&[1.0; 4], &[2.0; 4])).unwrap(), 0.0);
    }

    fn sample() -> impl Strategy<Value = PairedSample> {
        (4usize..30, 1usize..4, 1usize..4).prop_flat_map(|(n, p, q)| {
            (
                proptest::collection::vec(-5.0..5.0f64, n * p),
                proptest::collection::vec(-5.0..5.0f64, n * q),
            )
                .prop_map(move |(x, y)| {
                    PairedSample::new(DMatrix::from_vec(n, p, x), DMatrix::from_vec(n, q, y)).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn centered_matches_naive(s in sample()) {
            let fast = dcov2(&s).unwrap();
            let slow = dcov2_naive(&s).unwrap();
            prop_assert!((fast - slow).abs() <= 1e-10 * slow.abs().max(1.0));
        }

        #[test]
        fn dcor_bounded_and_symmetric(s in sample()) {
            let r = dcor(&s).unwrap();
            prop_assert!((0.0..=1.0).contains(&r));
            prop_assert_eq!(r, dcor(&s.swap()).unwrap());
        }
    }
}
