use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use indepmaps_core::distributions::GigBackend;

use crate::config::Mode;

#[derive(Debug, Parser)]
#[command(name = "indepmaps", version, about = "Independence-preserving involutions: evaluation, sampling and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the modified Bessel function K_nu(x).
    Besselk(BesselArgs),
    /// Draw i.i.d. values from a distribution and write them as CSV.
    Sample(SampleArgs),
    /// Apply F1, F2 or F3 to one point or to a CSV of (x, y) pairs.
    Transform(TransformArgs),
    /// Goodness-of-fit and independence tests on CSV columns.
    #[command(subcommand)]
    Stat(StatCommand),
    /// Run one verification experiment and write a JSON report.
    Verify(VerifyArgs),
    /// KS distance of fixed-point chains at every step, as CSV.
    Chain(ChainArgs),
    /// Histogram of a batch next to the analytic pdf, as CSV.
    PlotData(PlotArgs),
}

#[derive(Debug, Args)]
pub struct BesselArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub nu: f64,
    #[arg(long)]
    pub x: f64,
    /// Print log K_nu(x) instead (finite even when K over- or underflows).
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    InverseCdf,
    Rejection,
}

impl From<Backend> for GigBackend {
    fn from(b: Backend) -> Self {
        match b {
            Backend::InverseCdf => GigBackend::InverseCdf,
            Backend::Rejection => GigBackend::Rejection,
        }
    }
}

/// A distribution given by family and `k=v` parameters.
#[derive(Debug, Args)]
pub struct DistArgs {
    /// gig | al | sexp | stexp
    #[arg(long)]
    pub dist: String,
    /// e.g. `lambda=0.5,c1=1,c2=1` (gig), `lambda1=1,lambda2=2` (al),
    /// `lambda=1,c=-2` (sexp), `lambda=1,c1=-1,c2=1` (stexp)
    #[arg(long, allow_hyphen_values = true)]
    pub params: String,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// GIG sampler.
    #[arg(long, value_enum, default_value = "inverse-cdf")]
    pub backend: Backend,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    F1,
    F2,
    F3,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub kind: MapKind,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "y", conflicts_with = "input")]
    pub x: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "x")]
    pub y: Option<f64>,
    /// CSV with columns `x,y`; writes columns `u,v`.
    #[arg(long, required_unless_present = "x")]
    pub input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum StatCommand {
    /// One-sample Kolmogorov-Smirnov test at level 0.01.
    Ks(KsArgs),
    /// Distance-correlation permutation test of independence.
    Dcor(DcorArgs),
}

#[derive(Debug, Args)]
pub struct KsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Column to test (defaults to the first).
    #[arg(long)]
    pub column: Option<String>,
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DcorArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "u")]
    pub x_column: String,
    #[arg(long, default_value = "v")]
    pub y_column: String,
    #[arg(long, default_value_t = 200)]
    pub permutations: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// TOML config; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// gig | al | sexp
    #[arg(long)]
    pub theorem: Option<String>,
    /// e.g. `p=1,q=2,r=3`; unspecified parameters keep the config or default values.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Points (identity), draws (montecarlo, power) or chains (chain).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Factor applied to the perturbed parameter in power mode.
    #[arg(long)]
    pub perturb: Option<f64>,
    /// Perturbed parameter, `x.<name>` or `y.<name>`.
    #[arg(long)]
    pub perturb_param: Option<String>,
    #[arg(long)]
    pub permutations: Option<usize>,
    /// Pairs used by the independence test in montecarlo mode.
    #[arg(long)]
    pub independence_n: Option<usize>,
    /// Chain length in chain mode.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Parameter sweep, `name=v1,v2,...`; repeatable.
    #[arg(long)]
    pub grid: Vec<String>,
    /// Also write histogram CSVs (one per variable) into this directory.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long)]
    pub theorem: String,
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub chains: usize,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// Values to histogram; sampled from the distribution when omitted.
    #[arg(long, conflicts_with = "n")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long, required_unless_present = "input")]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    /// Histogram range `lo,hi` (defaults to the data range).
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
