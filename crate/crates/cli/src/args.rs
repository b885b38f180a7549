use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "depcorr", version, about = "Dependence measures with permutation inference")]
pub struct Cli {
    /// Worker threads for resampling loops (0 = all cores). Never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Write `null` for the wall-clock duration so reruns are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pearson product-moment correlation.
    Pearson(Plain),
    /// Spearman rank correlation (midranks for ties).
    Spearman(Plain),
    /// Distance covariance and distance correlation (any number of columns).
    Dcor(Plain),
    /// First canonical correlation of the raw x and y columns.
    Cca(CcaArgs),
    /// (K, L) Hermite-basis approximation of the Renyi correlation.
    #[command(name = "renyi-kl")]
    RenyiKl(KlArgs),
    /// ACE estimate of the Renyi correlation and the fitted transformations.
    Ace(AceArgs),
    /// Permutation test of independence for one statistic.
    Permtest(PermArgs),
    /// Monte Carlo power comparison of several statistics.
    Power(PowerArgs),
    /// Write a synthetic sample as CSV.
    Simulate(SimulateArgs),
    /// SVG scatter plot of the data, optionally beside the ACE transformations.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Input {
    /// CSV file with the paired sample.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// x columns: comma-separated 1-based indices or header names.
    #[arg(long, default_value = "1")]
    pub x: String,
    /// y columns: comma-separated 1-based indices or header names.
    #[arg(long, default_value = "2")]
    pub y: String,
    /// The first row is data, not a header.
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Plain {
    #[command(flatten)]
    #[serde(skip)]
    pub input: Input,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CcaArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Plain,
    #[arg(long, default_value_t = 0.0)]
    pub ridge: f64,
    #[arg(long, default_value_t = depcorr::DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KlParams {
    /// Number of basis functions for x.
    #[arg(long = "K", default_value_t = 5)]
    #[serde(rename = "K")]
    pub k: usize,
    /// Number of basis functions for y.
    #[arg(long = "L", default_value_t = 5)]
    #[serde(rename = "L")]
    pub l: usize,
    /// Hermite index of the first basis function.
    #[arg(long, default_value_t = 1)]
    pub start_index: usize,
    #[arg(long)]
    pub no_normalize: bool,
    #[arg(long)]
    pub no_standardize: bool,
    #[arg(long, default_value_t = 0.0)]
    pub ridge: f64,
    #[arg(long, default_value_t = depcorr::DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KlArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Plain,
    #[command(flatten)]
    #[serde(flatten)]
    pub kl: KlParams,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SmootherArg {
    LinearSpline,
    RunningMean,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AceParams {
    #[arg(long, default_value_t = 0.3)]
    pub span: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value = "linear-spline")]
    pub smoother: SmootherArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AceArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Plain,
    #[command(flatten)]
    #[serde(flatten)]
    pub ace: AceParams,
    /// Leave the per-observation transformations out of the report.
    #[arg(long)]
    pub no_transforms: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatArg {
    Pearson,
    Spearman,
    Dcov2,
    Dcor,
    Cca,
    Kl,
    Ace,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PermArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Plain,
    #[arg(long, value_enum)]
    pub stat: StatArg,
    /// Number of permutation replicates.
    #[arg(long, default_value_t = depcorr::DEFAULT_REPLICATES)]
    pub b: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub kl: KlParams,
    #[command(flatten)]
    #[serde(flatten)]
    pub ace: AceParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Bump,
    Gaussian,
    Independent,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelParams {
    #[arg(long, default_value_t = 1.5)]
    pub beta1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta2: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta3: f64,
    /// Noise standard deviation; defaults to 0.02 * beta1 / beta2.
    #[arg(long)]
    pub noise_sd: Option<f64>,
    /// Law of x (bump, independent): `uniform:A,B` or `normal:MU,SIGMA`.
    #[arg(long, default_value = "uniform:0,1")]
    pub x_law: String,
    /// Law of y (independent): `uniform:A,B` or `normal:MU,SIGMA`.
    #[arg(long, default_value = "uniform:0,1")]
    pub y_law: String,
    /// Correlation of the bivariate normal model.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub rho: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PowerArgs {
    /// Alternative to simulate from.
    #[arg(long, value_enum, default_value = "bump")]
    pub alt: Model,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelParams,
    /// Comma-separated statistics: pearson, spearman, dcov2, dcor, cca, kl, ace.
    #[arg(long, default_value = "pearson,dcor,kl,ace")]
    pub stats: String,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 200)]
    pub nsim: usize,
    #[arg(long, default_value_t = depcorr::DEFAULT_REPLICATES)]
    pub b: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub kl: KlParams,
    #[command(flatten)]
    #[serde(flatten)]
    pub ace: AceParams,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub model: Model,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ModelParams,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// CSV destination; stdout when omitted (the JSON report is then suppressed).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PlotArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub input: Input,
    /// SVG destination.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Add a panel with the ACE transformations.
    #[arg(long)]
    pub ace: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: AceParams,
}
