//! Dependence measures for paired samples.
//!
//! | Measure | Entry point | Notes |
//! |---------|-------------|-------|
//! | Pearson | [`pearson`] | product-moment correlation |
//! | Spearman | [`spearman`] | Pearson on midranks |
//! | Canonical correlation | [`first_canonical_correlation`] | whitened SVD with rank truncation |
//! | Distance correlation | [`dcor`], [`dcov2`] | doubly-centered distance matrices, any `p`, `q` |
//! | `(K, L)` Rényi correlation | [`kl_correlation`] | CCA of weighted Hermite features |
//! | ACE Rényi correlation | [`ace`] | alternating nearest-neighbour smoothing |
//!
//! Any of them can be tested for significance with [`permutation_test`] and
//! compared for power with [`power_study`]. Resampling loops run on rayon when
//! the default `parallel` feature is enabled and sequentially otherwise; the
//! numbers are identical either way.
//!
//! ```
//! use depcorr::{gen_bump, kl_correlation, KlOptions, ModelConfig};
//!
//! let s = gen_bump(&ModelConfig::default()).unwrap();
//! let r = kl_correlation(&s, 5, 5, &KlOptions::default()).unwrap();
//! assert!(r.rho > 0.9);
//! ```

pub mod basis;
pub mod cca;
pub mod correlation;
pub mod datagen;
pub mod dcov;
pub mod error;
pub mod inference;
pub mod par;
pub mod renyi;
pub mod sample;
pub mod seed;

pub use basis::{feature_matrix, hermite, standardize, BasisSpec};
pub use cca::{covariance_triple, first_canonical_correlation, CcaResult, CovTriple, DEFAULT_RANK_TOL};
pub use correlation::{midranks, pearson, spearman};
pub use datagen::{gen_bump, gen_gaussian, gen_independent, Generator, Law, ModelConfig};
pub use dcov::{dcor, dcov2, dcov2_naive, double_center, pairwise_distances, CenteredDistances};
pub use error::{Error, Result};
pub use inference::{
    permutation_test, power_study, Measure, PermTestResult, PowerCell, PowerSettings, PowerTable, Statistic,
    DEFAULT_REPLICATES,
};
pub use renyi::{ace, kl_bruteforce, kl_correlation, smooth, AceOptions, AceResult, KlOptions, KlResult};
pub use sample::PairedSample;

pub use nalgebra;
