//! Command-line flags.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use despar::simulate::{ScenarioKind, DEFAULT_BURN_IN, DEFAULT_REPLICATIONS, DEFAULT_SEED};
use despar::Criterion;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "despar",
    version,
    about = "Desparsified lasso inference for high-dimensional time series"
)]
pub struct Cli {
    /// Worker threads for replications and nodewise fits.
    #[arg(long, global = true, env = "DESPAR_THREADS")]
    pub threads: Option<usize>,
    /// Suppress progress output on standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Lasso fit with a fixed or IC-selected penalty.
    Fit(FitArgs),
    /// Desparsified lasso intervals and an optional Wald test.
    Infer(InferArgs),
    /// Monte Carlo coverage or Granger-test experiment.
    Simulate(SimulateArgs),
    /// Median lasso error across sample sizes.
    Decay(DecayArgs),
    /// Sparsity profile and compatibility constant of a data set.
    Diagnose(DiagnoseArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fit(_) => "fit",
            Command::Infer(_) => "infer",
            Command::Simulate(_) => "simulate",
            Command::Decay(_) => "decay",
            Command::Diagnose(_) => "diagnose",
            Command::Replay(_) => "replay",
        }
    }
}

/// `auto` or a nonnegative penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaArg {
    Auto,
    Value(f64),
}

impl FromStr for LambdaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(LambdaArg::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v >= 0.0 && v.is_finite() => Ok(LambdaArg::Value(v)),
            _ => Err(format!("expected 'auto' or a nonnegative number, got '{s}'")),
        }
    }
}

/// `auto` or a positive integer bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthArg {
    Auto,
    Fixed(usize),
}

impl FromStr for BandwidthArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(BandwidthArg::Auto);
        }
        match s.parse::<usize>() {
            Ok(q) if q >= 1 => Ok(BandwidthArg::Fixed(q)),
            _ => Err(format!("expected 'auto' or a positive integer, got '{s}'")),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionArg {
    Aic,
    Bic,
    Ebic,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionArgs {
    /// Information criterion for `auto` penalties.
    #[arg(long, value_enum, default_value = "bic")]
    pub criterion: CriterionArg,
    /// γ of the extended BIC.
    #[arg(long, default_value_t = 1.0)]
    pub ebic_gamma: f64,
    /// Number of penalties on the grid.
    #[arg(long, default_value_t = 200)]
    pub grid_size: usize,
    /// Largest support eligible for selection (default ⌊T/2⌋).
    #[arg(long)]
    pub max_support: Option<usize>,
    /// Coordinate descent tolerance.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Coordinate descent sweep limit.
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

impl SelectionArgs {
    pub fn criterion(&self) -> Criterion {
        match self.criterion {
            CriterionArg::Aic => Criterion::Aic,
            CriterionArg::Bic => Criterion::Bic,
            CriterionArg::Ebic => Criterion::Ebic(self.ebic_gamma),
        }
    }

    pub fn solver(&self, standardize: bool) -> despar::SolverConfig {
        despar::SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            max_support: self.max_support,
            grid_size: self.grid_size,
            standardize,
            ..Default::default()
        }
    }
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitArgs {
    /// CSV with a header; first column is y, the rest are regressors.
    pub input: PathBuf,
    /// Penalty: `auto` or a value.
    #[arg(long, default_value = "auto")]
    pub lambda: LambdaArg,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Center and scale before fitting; coefficients are reported on the original scale.
    #[arg(long)]
    pub standardize: bool,
    /// Output directory for the report and manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferArgs {
    /// CSV with a header; first column is y, the rest are regressors.
    pub input: PathBuf,
    /// Comma-separated regressor names.
    #[arg(long, value_delimiter = ',', required = true)]
    pub targets: Vec<String>,
    /// Significance level of the intervals.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// HAC bandwidth: `auto` or a positive integer.
    #[arg(long, default_value = "auto")]
    pub bandwidth: BandwidthArg,
    /// CSV restriction file: one column per restricted target plus `q`.
    #[arg(long)]
    pub restrict: Option<PathBuf>,
    /// Penalty of the initial lasso.
    #[arg(long, default_value = "auto")]
    pub lambda: LambdaArg,
    /// Penalty of the nodewise regressions.
    #[arg(long, default_value = "auto")]
    pub nodewise_lambda: LambdaArg,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Output directory for the report and manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> Result<ScenarioKind, String> {
    s.parse::<ScenarioKind>().map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// ardl-iid, ardl-garch, factor, var-size or var-power.
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: ScenarioKind,
    /// Number of regressors.
    #[arg(long)]
    pub n: usize,
    /// Sample size after burn-in.
    #[arg(long)]
    pub t: usize,
    /// Monte Carlo replications.
    #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
    pub reps: usize,
    /// Experiment seed; replication r uses stream r.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Initial observations discarded.
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: usize,
    /// Parameters to cover (default: rho,beta1 for ARDL, beta1 for the factor model).
    #[arg(long, value_delimiter = ',')]
    pub targets: Option<Vec<String>>,
    /// Significance level of the intervals.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Output directory for the report and manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricArg {
    L1,
    Prediction,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayArgs {
    /// ardl-iid, ardl-garch, factor, var-size or var-power.
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: ScenarioKind,
    /// Number of regressors.
    #[arg(long)]
    pub n: usize,
    /// Increasing comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub t_list: Vec<usize>,
    /// Replications per sample size.
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Error measured against the true coefficients.
    #[arg(long, value_enum, default_value = "l1")]
    pub metric: MetricArg,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Output directory for the report and manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseArgs {
    /// CSV with a header; first column is y, the rest are regressors.
    pub input: PathBuf,
    /// Columns forming S; defaults to the support of the IC-selected fit.
    #[arg(long, value_delimiter = ',')]
    pub support: Option<Vec<String>>,
    /// Compatibility constant: exact enumeration (N ≤ 8) or random cone sampling.
    #[arg(long, value_enum, default_value = "sampled")]
    pub method: MethodArg,
    /// Cone directions drawn by the sampled method.
    #[arg(long, default_value_t = despar::diagnostics::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Exponent of the weak-sparsity norm.
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Output directory for the report and manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
    /// Output directory; defaults to the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
