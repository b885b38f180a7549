//! Permutation tests and Monte Carlo power comparisons.
//!
//! Replicate `i` shuffles the rows of `y` with a generator keyed by
//! `derive(seed, PERMUTATION_TAG, i)`, so a test's p-value depends only on
//! the sample, the statistic, `b` and `seed`, never on scheduling.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::cca::{covariance_triple, first_canonical_correlation, DEFAULT_RANK_TOL};
use crate::correlation::{pearson, spearman};
use crate::datagen::Generator;
use crate::dcov::{dcor, dcov2};
use crate::error::{Error, Result};
use crate::par;
use crate::renyi::{ace, kl_correlation, AceOptions, KlOptions};
use crate::sample::PairedSample;
use crate::seed;

pub const DEFAULT_REPLICATES: usize = 999;

const PERMUTATION_TAG: u64 = 0x7065_726d;
const SAMPLE_TAG: u64 = 0x7361_6d70;
const TEST_TAG: u64 = 0x7465_7374;

/// A dependence statistic where larger means more dependent.
pub trait Statistic: Sync {
    fn name(&self) -> String;
    fn evaluate(&self, s: &PairedSample) -> Result<f64>;
}

impl<T: Statistic + ?Sized> Statistic for &T {
    fn name(&self) -> String {
        (**self).name()
    }
    fn evaluate(&self, s: &PairedSample) -> Result<f64> {
        (**self).evaluate(s)
    }
}

/// The shipped statistics. Signed correlations are taken in absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "measure", rename_all = "snake_case")]
pub enum Measure {
    Pearson,
    Spearman,
    Dcov2,
    Dcor,
    /// First canonical correlation of the raw `x` and `y` columns.
    Cca { ridge: f64, rank_tol: f64 },
    Kl { k: usize, l: usize, options: KlOptions },
    Ace { options: AceOptions },
}

impl Measure {
    pub fn cca() -> Self {
        Measure::Cca {
            ridge: 0.0,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }

    pub fn kl(k: usize, l: usize) -> Self {
        Measure::Kl {
            k,
            l,
            options: KlOptions::default(),
        }
    }

    pub fn ace() -> Self {
        Measure::Ace {
            options: AceOptions::default(),
        }
    }
}

impl Statistic for Measure {
    fn name(&self) -> String {
        match self {
            Measure::Pearson => "pearson".into(),
            Measure::Spearman => "spearman".into(),
            Measure::Dcov2 => "dcov2".into(),
            Measure::Dcor => "dcor".into(),
            Measure::Cca { .. } => "cca".into(),
            Measure::Kl { k, l, .. } => format!("kl({k},{l})"),
            Measure::Ace { .. } => "ace".into(),
        }
    }

    fn evaluate(&self, s: &PairedSample) -> Result<f64> {
        match self {
            Measure::Pearson => {
                let (x, y) = s.univariate()?;
                Ok(pearson(x, y)?.abs())
            }
            Measure::Spearman => {
                let (x, y) = s.univariate()?;
                Ok(spearman(x, y)?.abs())
            }
            Measure::Dcov2 => dcov2(s),
            Measure::Dcor => dcor(s),
            Measure::Cca { ridge, rank_tol } => {
                let c = covariance_triple(s.x(), s.y())?;
                Ok(first_canonical_correlation(&c, *ridge, *rank_tol)?.rho)
            }
            Measure::Kl { k, l, options } => Ok(kl_correlation(s, *k, *l, options)?.rho),
            Measure::Ace { options } => Ok(ace(s, options)?.r_hat),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermTestResult {
    pub statistic: String,
    pub observed: f64,
    pub b: usize,
    /// Replicates whose statistic is `>=` the observed one.
    pub count_ge: usize,
    pub p_value: f64,
    pub seed: u64,
}

/// `(1 + #{r ≥ observed}) / (b + 1)` together with the count.
pub fn permutation_p_value(observed: f64, replicates: &[f64]) -> (usize, f64) {
    let count = replicates.iter().filter(|&&r| r >= observed).count();
    (count, (1 + count) as f64 / (replicates.len() + 1) as f64)
}

/// Row permutation of `y` used by replicate `index` (1-based).
pub fn replicate_permutation(n: usize, seed: u64, index: usize) -> Vec<usize> {
    let mut rng = seed::rng(seed::derive(seed, PERMUTATION_TAG, index as u64), 0);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}

/// Statistic values for replicates `1..=b`, in replicate order.
pub fn permutation_replicates<S: Statistic + ?Sized>(
    s: &PairedSample,
    statistic: &S,
    b: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    par::try_map_indexed(b, |i| {
        let index = i + 1;
        let perm = replicate_permutation(s.n(), seed, index);
        statistic
            .evaluate(&s.permute_y(&perm))
            .map_err(|e| Error::Replicate {
                index,
                source: Box::new(e),
            })
    })
}

/// Permutation test of independence: `y` rows are shuffled, `x` stays put.
pub fn permutation_test<S: Statistic + ?Sized>(
    s: &PairedSample,
    statistic: &S,
    b: usize,
    seed: u64,
) -> Result<PermTestResult> {
    if b == 0 {
        return Err(Error::InvalidParameter("replicate count b must be >= 1".into()));
    }
    let observed = statistic.evaluate(s)?;
    let replicates = permutation_replicates(s, statistic, b, seed)?;
    let (count_ge, p_value) = permutation_p_value(observed, &replicates);
    Ok(PermTestResult {
        statistic: statistic.name(),
        observed,
        b,
        count_ge,
        p_value,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCell {
    pub statistic: String,
    pub alternative: String,
    pub rejections: usize,
    pub rate: f64,
    pub nsim: usize,
    pub alpha: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTable {
    pub generator: Generator,
    pub n: usize,
    pub alpha: f64,
    pub nsim: usize,
    pub b: usize,
    pub seed: u64,
    pub cells: Vec<PowerCell>,
}

impl PowerTable {
    pub fn rate(&self, statistic: &str) -> Option<f64> {
        self.cells.iter().find(|c| c.statistic == statistic).map(|c| c.rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSettings {
    pub n: usize,
    pub alpha: f64,
    pub nsim: usize,
    pub b: usize,
    pub seed: u64,
}

/// Rejection rates at level `alpha`: each simulation draws a fresh sample and
/// runs one permutation test per statistic, rejecting when `p ≤ alpha`.
pub fn power_study(generator: &Generator, statistics: &[Measure], settings: &PowerSettings) -> Result<PowerTable> {
    let PowerSettings { n, alpha, nsim, b, seed } = *settings;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if nsim == 0 {
        return Err(Error::InvalidParameter("nsim must be >= 1".into()));
    }
    if b == 0 {
        return Err(Error::InvalidParameter("replicate count b must be >= 1".into()));
    }
    if statistics.is_empty() {
        return Err(Error::InvalidParameter("no statistics requested".into()));
    }
    let rejected: Vec<Vec<bool>> = par::try_map_indexed(nsim, |j| {
        let sample = generator.sample(n, seed::derive(seed, SAMPLE_TAG, j as u64))?;
        let test_seed = seed::derive(seed, TEST_TAG, j as u64);
        statistics
            .iter()
            .map(|m| Ok(permutation_test(&sample, m, b, test_seed)?.p_value <= alpha))
            .collect::<Result<Vec<bool>>>()
    })?;
    let cells = statistics
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let rejections = rejected.iter().filter(|r| r[i]).count();
            PowerCell {
                statistic: m.name(),
                alternative: generator.name().into(),
                rejections,
                rate: rejections as f64 / nsim as f64,
                nsim,
                alpha,
                n,
            }
        })
        .collect();
    Ok(PowerTable {
        generator: *generator,
        n,
        alpha,
        nsim,
        b,
        seed,
        cells,
    })
}
