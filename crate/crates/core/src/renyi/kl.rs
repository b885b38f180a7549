use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{feature_matrix, BasisSpec};
use crate::cca::{covariance_triple, first_canonical_correlation, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};
use crate::sample::PairedSample;

/// Largest `n` accepted by [`kl_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 200;

/// Basis and solver settings shared by both feature blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlOptions {
    pub start_index: usize,
    pub normalize: bool,
    pub standardize_input: bool,
    pub ridge: f64,
    pub rank_tol: f64,
}

impl Default for KlOptions {
    fn default() -> Self {
        Self {
            start_index: 1,
            normalize: true,
            standardize_input: true,
            ridge: 0.0,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

impl KlOptions {
    pub fn basis(&self, count: usize) -> BasisSpec {
        BasisSpec {
            count,
            start_index: self.start_index,
            normalize: self.normalize,
            standardize_input: self.standardize_input,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlResult {
    pub rho: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub k: usize,
    pub l: usize,
    pub effective_rank_x: usize,
    pub effective_rank_y: usize,
}

fn features(s: &PairedSample, k: usize, l: usize, opts: &KlOptions) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidParameter(format!("K and L must be >= 1, got K = {k}, L = {l}")));
    }
    let (x, y) = s.univariate()?;
    Ok((feature_matrix(x, &opts.basis(k))?, feature_matrix(y, &opts.basis(l))?))
}

/// Empirical `(K, L)` correlation: the first canonical correlation between
/// `K` Hermite features of `x` and `L` Hermite features of `y`.
pub fn kl_correlation(s: &PairedSample, k: usize, l: usize, opts: &KlOptions) -> Result<KlResult> {
    let (fx, gy) = features(s, k, l, opts)?;
    let c = covariance_triple(&fx, &gy)?;
    let r = first_canonical_correlation(&c, opts.ridge, opts.rank_tol)?;
    Ok(KlResult {
        rho: r.rho,
        alpha: r.alpha,
        beta: r.beta,
        k,
        l,
        effective_rank_x: r.effective_rank_x,
        effective_rank_y: r.effective_rank_y,
    })
}

/// Plain second moments of at most two columns, accumulated directly.
fn moments(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let n = a.nrows() as f64;
    let mean = |m: &DMatrix<f64>, j: usize| m.column(j).iter().sum::<f64>() / n;
    let mut out = vec![vec![0.0; b.ncols()]; a.ncols()];
    for (i, row) in out.iter_mut().enumerate() {
        let ma = mean(a, i);
        for (j, v) in row.iter_mut().enumerate() {
            let mb = mean(b, j);
            *v = (0..a.nrows()).map(|r| (a[(r, i)] - ma) * (b[(r, j)] - mb)).sum::<f64>() / n;
        }
    }
    out
}

fn unit(theta: f64, dim: usize) -> [f64; 2] {
    if dim == 1 {
        [1.0, 0.0]
    } else {
        [theta.cos(), theta.sin()]
    }
}

fn quad(m: &[Vec<f64>], u: &[f64; 2], v: &[f64; 2]) -> f64 {
    let mut s = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            s += u[i] * c * v[j];
        }
    }
    s
}

/// Grid-search reference for [`kl_correlation`] when `K, L ≤ 2`.
///
/// Unit coefficient vectors are parameterized by angles on a grid finer than
/// 0.001 rad, `|corr(Fα, Gβ)|` is maximized over the grid, and the best cell
/// is refined by a shrinking pattern search.
pub fn kl_bruteforce(s: &PairedSample, k: usize, l: usize, opts: &KlOptions) -> Result<f64> {
    if k > 2 || l > 2 {
        return Err(Error::InvalidParameter(format!(
            "kl_bruteforce supports K, L <= 2, got K = {k}, L = {l}"
        )));
    }
    if s.n() > BRUTEFORCE_LIMIT {
        return Err(Error::SizeGuard {
            what: "kl_bruteforce",
            n: s.n(),
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let (fx, gy) = features(s, k, l, opts)?;
    let sxx = moments(&fx, &fx);
    let syy = moments(&gy, &gy);
    let sxy = moments(&fx, &gy);

    let corr = |t: f64, p: f64| -> f64 {
        let (a, b) = (unit(t, k), unit(p, l));
        let va = quad(&sxx, &a, &a);
        let vb = quad(&syy, &b, &b);
        if va <= 0.0 || vb <= 0.0 {
            return 0.0;
        }
        (quad(&sxy, &a, &b) / (va.sqrt() * vb.sqrt())).abs()
    };

    let steps = |dim: usize| if dim == 1 { 1 } else { 3200 };
    let (nt, np) = (steps(k), steps(l));
    let step = std::f64::consts::PI / 3200.0;
    let (mut best, mut bt, mut bp) = (f64::NEG_INFINITY, 0.0, 0.0);
    let betas: Vec<([f64; 2], f64)> = (0..np)
        .map(|j| {
            let b = unit(j as f64 * step, l);
            (b, quad(&syy, &b, &b))
        })
        .collect();
    for i in 0..nt {
        let t = i as f64 * step;
        let a = unit(t, k);
        let va = quad(&sxx, &a, &a);
        if va <= 0.0 {
            continue;
        }
        let mut u = [0.0; 2];
        for (r, row) in sxy.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                u[c] += a[r] * v;
            }
        }
        for (j, (b, vb)) in betas.iter().enumerate() {
            if *vb <= 0.0 {
                continue;
            }
            let c = ((u[0] * b[0] + u[1] * b[1]) / (va * vb).sqrt()).abs();
            if c > best {
                best = c;
                bt = t;
                bp = j as f64 * step;
            }
        }
    }
    if best == f64::NEG_INFINITY {
        best = 0.0;
    }

    let mut h = step;
    while h > 1e-12 {
        let mut improved = false;
        for (dt, dp) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let c = corr(bt + dt, bp + dp);
            if c > best {
                best = c;
                bt += dt;
                bp += dp;
                improved = true;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok(best.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::pearson;
    use approx::assert_abs_diff_eq;

    fn wiggle(n: usize) -> PairedSample {
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() * 2.0 + i as f64 * 0.01).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| v * v + (i as f64 * 1.3).cos()).collect();
        PairedSample::from_vecs(x, y).unwrap()
    }

    #[test]
    fn identical_inputs_give_one() {
        let s = wiggle(40);
        let t = PairedSample::from_vecs(s.x().as_slice().to_vec(), s.x().as_slice().to_vec()).unwrap();
        for k in 1..=4 {
            assert_abs_diff_eq!(kl_correlation(&t, k, k, &KlOptions::default()).unwrap().rho, 1.0, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(kl_bruteforce(&t, 2, 2, &KlOptions::default()).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn one_by_one_reduces_to_pearson() {
        let s = wiggle(50);
        let opts = KlOptions::default();
        let (x, y) = s.univariate().unwrap();
        let f = feature_matrix(x, &opts.basis(1)).unwrap();
        let g = feature_matrix(y, &opts.basis(1)).unwrap();
        let want = pearson(f.as_slice(), g.as_slice()).unwrap().abs();
        assert_abs_diff_eq!(kl_correlation(&s, 1, 1, &opts).unwrap().rho, want, epsilon = 1e-10);
        assert_abs_diff_eq!(kl_bruteforce(&s, 1, 1, &opts).unwrap(), want, epsilon = 1e-10);
    }

    #[test]
    fn bruteforce_matches_two_by_two() {
        let s = wiggle(30);
        let opts = KlOptions::default();
        let fast = kl_correlation(&s, 2, 2, &opts).unwrap().rho;
        let slow = kl_bruteforce(&s, 2, 2, &opts).unwrap();
        assert_abs_diff_eq!(fast, slow, epsilon = 1e-3);
    }

    #[test]
    fn guards() {
        let s = wiggle(20);
        assert!(kl_correlation(&s, 0, 2, &KlOptions::default()).is_err());
        assert!(kl_bruteforce(&s, 3, 1, &KlOptions::default()).is_err());
        assert!(matches!(
            kl_bruteforce(&wiggle(201), 1, 1, &KlOptions::default()),
            Err(Error::SizeGuard { .. })
        ));
        let multi = PairedSample::new(DMatrix::zeros(5, 2), DMatrix::zeros(5, 1)).unwrap();
        assert!(matches!(
            kl_correlation(&multi, 1, 1, &KlOptions::default()),
            Err(Error::NotUnivariate { .. })
        ));
    }

    #[test]
    fn nested_spans_increase() {
        let s = wiggle(120);
        let opts = KlOptions::default();
        for k in 1..6 {
            for l in 1..6 {
                let base = kl_correlation(&s, k, l, &opts).unwrap().rho;
                assert!(base <= kl_correlation(&s, k + 1, l, &opts).unwrap().rho + 1e-8);
                assert!(base <= kl_correlation(&s, k, l + 1, &opts).unwrap().rho + 1e-8);
            }
        }
    }

    #[test]
    fn swap_symmetry_and_normalize_invariance() {
        let s = wiggle(80);
        let opts = KlOptions::default();
        let raw = KlOptions { normalize: false, ..opts };
        for (k, l) in [(1, 3), (2, 2), (4, 2), (5, 5)] {
            let a = kl_correlation(&s, k, l, &opts).unwrap().rho;
            assert_abs_diff_eq!(a, kl_correlation(&s.swap(), l, k, &opts).unwrap().rho, epsilon = 1e-10);
            assert_abs_diff_eq!(a, kl_correlation(&s, k, l, &raw).unwrap().rho, epsilon = 1e-8);
        }
    }

    #[test]
    fn affine_rescaling_invariance() {
        let s = wiggle(60);
        let (x, y) = s.univariate().unwrap();
        let t = PairedSample::from_vecs(
            x.iter().map(|v| 4.0 * v - 3.0).collect(),
            y.iter().map(|v| 0.01 * v + 100.0).collect(),
        )
        .unwrap();
        let opts = KlOptions::default();
        let a = kl_correlation(&s, 3, 4, &opts).unwrap().rho;
        let b = kl_correlation(&t, 3, 4, &opts).unwrap().rho;
        assert_abs_diff_eq!(a, b, epsilon = 1e-8);
    }
}
