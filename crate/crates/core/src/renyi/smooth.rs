use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Nearest-neighbour running mean over a fixed set of abscissae.
///
/// Points are sorted by value (equal values keep index order). Each point's
/// window is grown one neighbour at a time, taking the closer of the next
/// point on the left and on the right. On a distance tie the side closer to
/// the end of the data wins; if both ends are equally far, the left side wins.
/// Every window is therefore a contiguous run in sorted order, so smoothing
/// reduces to prefix sums.
#[derive(Debug, Clone)]
pub struct RunningMean {
    order: Vec<usize>,
    /// Inclusive `[lo, hi]` window in sorted positions, per sorted position.
    windows: Vec<(usize, usize)>,
}

impl RunningMean {
    pub fn new(x: &[f64], span: f64) -> Result<Self> {
        if !(span > 0.0 && span <= 1.0) {
            return Err(Error::InvalidParameter(format!("span must lie in (0, 1], got {span}")));
        }
        let n = x.len();
        if n == 0 {
            return Err(Error::TooFewObservations { got: 0, min: 1 });
        }
        let width = ((span * n as f64).ceil() as usize).clamp(1, n);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
        let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();

        let windows = (0..n)
            .map(|i| {
                let (mut lo, mut hi) = (i, i);
                while hi - lo + 1 < width {
                    let take_left = match (lo > 0, hi + 1 < n) {
                        (true, false) => true,
                        (false, true) => false,
                        (true, true) => {
                            let dl = xs[i] - xs[lo - 1];
                            let dr = xs[hi + 1] - xs[i];
                            if dl != dr {
                                dl < dr
                            } else {
                                lo <= n - 1 - hi
                            }
                        }
                        (false, false) => unreachable!("window cannot exceed n"),
                    };
                    if take_left {
                        lo -= 1;
                    } else {
                        hi += 1;
                    }
                }
                (lo, hi)
            })
            .collect();
        Ok(Self { order, windows })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Local means of `z`; `out[i]` estimates `E[Z | X = x_i]`.
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.len(), "smoother input length");
        let mut prefix = Vec::with_capacity(z.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &i in &self.order {
            acc += z[i];
            prefix.push(acc);
        }
        let mut out = vec![0.0; z.len()];
        for (pos, &(lo, hi)) in self.windows.iter().enumerate() {
            out[self.order[pos]] = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1) as f64;
        }
        out
    }
}

/// Least-squares projection onto continuous piecewise-linear functions of
/// `x` with knots at the empirical quantiles `0, 1/m, …, 1`, `m = round(1/span)`.
///
/// Unlike [`RunningMean`] this is an orthogonal projection (symmetric and
/// idempotent), which is what makes ACE an ascent method. Constants lie in
/// the span of the hat basis, so means are preserved.
#[derive(Debug, Clone)]
pub struct SplineProjection {
    /// Orthonormal basis of the hat-function span, `n × knots`.
    q: DMatrix<f64>,
    knots: Vec<f64>,
}

impl SplineProjection {
    pub fn new(x: &[f64], span: f64) -> Result<Self> {
        if !(span > 0.0 && span <= 1.0) {
            return Err(Error::InvalidParameter(format!("span must lie in (0, 1], got {span}")));
        }
        let n = x.len();
        if n < 2 {
            return Err(Error::TooFewObservations { got: n, min: 2 });
        }
        let intervals = ((1.0 / span).round() as usize).clamp(1, n - 1);
        let mut sorted = x.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut knots: Vec<f64> = (0..=intervals)
            .map(|k| sorted[((k * (n - 1)) as f64 / intervals as f64).round() as usize])
            .collect();
        knots.dedup();
        if knots.len() < 2 {
            return Err(Error::DegenerateVariance("spline smoother needs at least two distinct x values".into()));
        }
        let basis = DMatrix::from_fn(n, knots.len(), |i, j| hat(&knots, j, x[i]));
        // every knot is an observed x where only its own hat is nonzero, so
        // the basis has full column rank
        let q = basis.qr().q();
        Ok(Self { q, knots })
    }

    pub fn len(&self) -> usize {
        self.q.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.q.nrows() == 0
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.len(), "smoother input length");
        let coef = self.q.tr_mul(&DVector::from_column_slice(z));
        (&self.q * coef).iter().copied().collect()
    }
}

/// Hat function `j` over `knots`, evaluated at `v` (linear extension is not
/// needed: every observation lies within the outer knots).
fn hat(knots: &[f64], j: usize, v: f64) -> f64 {
    let t = knots[j];
    if v == t {
        return 1.0;
    }
    if v < t {
        if j > 0 && v > knots[j - 1] {
            return (v - knots[j - 1]) / (t - knots[j - 1]);
        }
    } else if j + 1 < knots.len() && v < knots[j + 1] {
        return (knots[j + 1] - v) / (knots[j + 1] - t);
    }
    0.0
}

/// Running mean of `z` over the `⌈span·n⌉` nearest neighbours in `x`.
pub fn smooth(x: &[f64], z: &[f64], span: f64) -> Result<Vec<f64>> {
    if x.len() != z.len() {
        return Err(Error::DimensionMismatch(format!(
            "smooth: x has {} values, z has {}",
            x.len(),
            z.len()
        )));
    }
    Ok(RunningMean::new(x, span)?.apply(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_response() {
        let x = [3.0, 1.0, 2.0, 9.0, -4.0];
        for v in smooth(&x, &[2.5; 5], 0.4).unwrap() {
            assert_abs_diff_eq!(v, 2.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn full_span_is_global_mean() {
        let x = [3.0, 1.0, 2.0, 9.0];
        let z = [1.0, 2.0, 3.0, 10.0];
        assert_eq!(smooth(&x, &z, 1.0).unwrap(), vec![4.0; 4]);
    }

    #[test]
    fn half_span_example() {
        let out = smooth(&[1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 10.0, 10.0], 0.5).unwrap();
        assert_eq!(out, vec![0.0, 0.0, 10.0, 10.0]);
    }

    #[test]
    fn unsorted_input_and_nearest_choice() {
        // window 2: 0 pairs with 0.1, 5 pairs with 4.8, 4.8 pairs with 5
        let x = [5.0, 0.0, 4.8, 0.1];
        let z = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(smooth(&x, &z, 0.5).unwrap(), vec![2.0, 3.0, 2.0, 3.0]);
    }

    #[test]
    fn duplicate_abscissae_are_stable() {
        let x = [1.0, 1.0, 1.0];
        let out = smooth(&x, &[3.0, 6.0, 9.0], 0.34).unwrap();
        // width 2: sorted positions 0,1,2 = indices 0,1,2
        assert_eq!(out, vec![4.5, 4.5, 7.5]);
    }

    #[test]
    fn spline_projection_is_a_projection() {
        let x: Vec<f64> = (0..60).map(|i| ((i * 17) % 60) as f64 * 0.1 + if i % 7 == 0 { 0.0 } else { 0.013 * i as f64 }).collect();
        let z: Vec<f64> = (0..60).map(|i| (i as f64 * 0.9).sin() * 3.0 + 1.0).collect();
        let w: Vec<f64> = (0..60).map(|i| (i as f64 * 0.4).cos()).collect();
        let p = SplineProjection::new(&x, 0.2).unwrap();
        let pz = p.apply(&z);
        // idempotent
        for (a, b) in pz.iter().zip(p.apply(&pz)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        // self-adjoint
        let pw = p.apply(&w);
        let lhs: f64 = pz.iter().zip(&w).map(|(a, b)| a * b).sum();
        let rhs: f64 = z.iter().zip(&pw).map(|(a, b)| a * b).sum();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        // means and constants preserved, linear functions reproduced
        assert_abs_diff_eq!(pz.iter().sum::<f64>(), z.iter().sum::<f64>(), epsilon = 1e-10);
        for v in p.apply(&[4.0; 60]) {
            assert_abs_diff_eq!(v, 4.0, epsilon = 1e-12);
        }
        let lin: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        for (a, b) in p.apply(&lin).iter().zip(&lin) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        assert_eq!(p.knots().len(), 6);
    }

    #[test]
    fn spline_handles_ties() {
        let x = [1.0, 1.0, 1.0, 2.0, 2.0, 3.0];
        let p = SplineProjection::new(&x, 0.1).unwrap();
        assert_eq!(p.knots(), &[1.0, 2.0, 3.0]);
        let out = p.apply(&[1.0, 2.0, 3.0, 4.0, 6.0, 0.0]);
        assert_abs_diff_eq!(out[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[3], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[5], 0.0, epsilon = 1e-12);
        assert!(SplineProjection::new(&[2.0, 2.0], 0.5).is_err());
    }

    #[test]
    fn rejects_bad_span() {
        assert!(smooth(&[1.0, 2.0], &[1.0, 2.0], 0.0).is_err());
        assert!(smooth(&[1.0, 2.0], &[1.0, 2.0], 1.5).is_err());
        assert!(smooth(&[1.0, 2.0], &[1.0], 0.5).is_err());
    }
}
