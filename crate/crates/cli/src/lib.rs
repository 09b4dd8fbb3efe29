//! `rbfn` subcommands: train, predict, evaluate, cv, compare and gen-data.
//!
//! Exit codes: 0 on success, 1 for validation or training errors, 2 when a
//! file cannot be read or written.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rbfn::dataset::{Target, NUMERIC_FEATURES};
use rbfn::rbfnet::{CenterStrategy, RbfConfig, SpreadMode};

mod commands;

pub use commands::{cmd_compare, cmd_cv, cmd_evaluate, cmd_gen_data, cmd_predict, cmd_train, MANIFEST_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read `{}`: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write `{}`: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },

    #[error("`{}`: {source}", path.display())]
    InFile { path: PathBuf, source: rbfn::Error },

    #[error(transparent)]
    Core(#[from] rbfn::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Write { .. } => 2,
            CliError::Core(rbfn::Error::Io(_)) => 2,
            CliError::InFile { source: rbfn::Error::Io(_), .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "rbfn", version, about = "Radial basis function network classifier for patient records")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit an RBF network and write the model plus a run manifest.
    Train(TrainArgs),
    /// Class and probabilities for every row of a CSV.
    Predict(PredictArgs),
    /// Train on a stratified split and score both parts.
    Evaluate(EvaluateArgs),
    /// Stratified k-fold cross-validation of the RBF network.
    Cv(CvArgs),
    /// RBF network against an MLP and logistic regression on one split.
    Compare(CompareArgs),
    /// Write a seeded synthetic patient CSV.
    GenData(GenDataArgs),
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct DataArgs {
    /// Patient CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// prolong or regimen
    #[arg(long, default_value = "prolong")]
    pub target: Target,
    /// Comma-separated feature columns.
    #[arg(long, value_delimiter = ',', default_values_t = NUMERIC_FEATURES.map(String::from))]
    pub features: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CentersArg {
    Kmeans,
    RandomSubset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpreadArg {
    Scalar,
    PerDimension,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct RbfArgs {
    /// Hidden units J.
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long, value_enum, default_value_t = CentersArg::Kmeans)]
    pub centers: CentersArg,
    #[arg(long, value_enum, default_value_t = SpreadArg::Scalar)]
    pub spread_mode: SpreadArg,
    /// Ridge penalty on the output weights.
    #[arg(long, default_value_t = 1e-8)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RbfArgs {
    pub fn config(&self, default_hidden: usize) -> RbfConfig {
        RbfConfig {
            hidden: self.hidden.unwrap_or(default_hidden),
            centers: match self.centers {
                CentersArg::Kmeans => CenterStrategy::Kmeans,
                CentersArg::RandomSubset => CenterStrategy::RandomSubset,
            },
            spread_mode: match self.spread_mode {
                SpreadArg::Scalar => SpreadMode::Scalar,
                SpreadArg::PerDimension => SpreadMode::PerDimension,
            },
            lambda: self.lambda,
            seed: self.seed,
            ..RbfConfig::default()
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub rbf: RbfArgs,
    /// Candidate J values; picks one by cross-validation.
    #[arg(long, value_delimiter = ',', conflicts_with = "hidden")]
    pub hidden_grid: Option<Vec<usize>>,
    /// Folds for --hidden-grid.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Model file to write.
    #[arg(long)]
    pub model: PathBuf,
    /// Run manifest; defaults to `<model>.manifest.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub rbf: RbfArgs,
    /// Training rows; 60% of the data when absent.
    #[arg(long)]
    pub n_train: Option<usize>,
    /// Metrics CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub rbf: RbfArgs,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Per-fold metrics CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// RBF settings; J defaults to 20 here.
    #[command(flatten)]
    pub rbf: RbfArgs,
    /// Training rows; 60% of the data when absent.
    #[arg(long)]
    pub n_train: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub mlp_hidden: usize,
    #[arg(long, default_value_t = 0.1)]
    pub mlp_lr: f64,
    #[arg(long, default_value_t = 2000)]
    pub mlp_epochs: usize,
    #[arg(long, default_value_t = 0.5)]
    pub logistic_lr: f64,
    #[arg(long, default_value_t = 1000)]
    pub logistic_epochs: usize,
    /// Comparison CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GenDataArgs {
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Probability of flipping each outcome label.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 50.0)]
    pub cd4_low: f64,
    #[arg(long, default_value_t = 100.0)]
    pub cd4_high: f64,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs one parsed command, writing reports to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn std::io::Write) -> Result<()> {
    match &cli.command {
        Command::Train(a) => cmd_train(a, stdout),
        Command::Predict(a) => cmd_predict(a, stdout),
        Command::Evaluate(a) => cmd_evaluate(a, stdout),
        Command::Cv(a) => cmd_cv(a, stdout),
        Command::Compare(a) => cmd_compare(a, stdout),
        Command::GenData(a) => cmd_gen_data(a, stdout),
    }
}
