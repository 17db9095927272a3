// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliResult;
use crate::settings::{self, Settings};

#[derive(Debug, Parser)]
#[command(name = "jplay", version, about = "Joint and progressive subspace learning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pre-train and fine-tune a model, then write it to --out.
    Train(TrainArgs),
    /// Greedy layer-wise pre-training only (no fine-tuning).
    Pretrain(TrainArgs),
    /// Score a model with the 1-NN classifier.
    Eval(EvalArgs),
    /// Cross-validated search over alpha, beta, gamma and eta.
    Gridsearch(GridArgs),
    /// Write rows of the learned projection as PGM images.
    ExportFeatures(ExportArgs),
    /// Write a synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct DataArgs {
    /// Data file: `.jpld` binary or CSV (one sample per row unless --column-major-data).
    #[arg(long)]
    pub data: PathBuf,
    /// Label file with one positive integer per line.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// CSV column holding labels: an index, a header name, or `last`.
    #[arg(long)]
    pub label_column: Option<String>,
    /// CSV stores one sample per column.
    #[arg(long)]
    pub column_major_data: bool,
    /// Train/test split file (`index,train|test` lines).
    #[arg(long)]
    pub split: Option<PathBuf>,
    /// Random split with this many training samples per class.
    #[arg(long)]
    pub train_per_class: Option<usize>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct TuningArgs {
    /// `key = value` configuration file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Layer dimensions, e.g. `20` or `30,20`.
    #[arg(long)]
    pub layers: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Manifold weight during pre-training.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Relative objective change that ends fine-tuning.
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long)]
    pub outer_max_iter: Option<usize>,
    #[arg(long)]
    pub admm_eps: Option<f64>,
    #[arg(long)]
    pub admm_max_iter: Option<usize>,
    #[arg(long)]
    pub mu0: Option<f64>,
    #[arg(long)]
    pub mu_max: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// `absolute` or `relative` ADMM stopping residuals.
    #[arg(long)]
    pub residual_mode: Option<String>,
    /// Neighbours per sample in the kNN graph.
    #[arg(long)]
    pub graph_k: Option<usize>,
    /// Heat-kernel width: `auto` or a positive number.
    #[arg(long)]
    pub bandwidth: Option<String>,
    /// Only connect neighbours that share a label.
    #[arg(long)]
    pub supervised_graph: bool,
    /// Build each layer's graph on that layer's input features.
    #[arg(long)]
    pub per_layer_graph: bool,
    /// Ridge added to the LPP constraint matrix.
    #[arg(long)]
    pub lpp_ridge: Option<f64>,
    /// none, unit-columns (default), zscore-features or minmax-features.
    #[arg(long)]
    pub normalize: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub tuning: TuningArgs,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the objective trace as CSV.
    #[arg(long)]
    pub trace_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Classifier {
    #[default]
    Nn,
    Regression,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Samples to score. With a split, the training part is the 1-NN reference.
    #[command(flatten)]
    pub data: DataArgs,
    /// Separate reference set for the 1-NN classifier.
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub train_labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Classifier::Nn)]
    pub classifier: Classifier,
    /// Write `index,predicted,truth` rows here.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub tuning: TuningArgs,
    /// `name=v1,v2,…` axis; repeat for more parameters.
    #[arg(long)]
    pub grid: Vec<String>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Accuracy table (CSV). Printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub height: usize,
    #[arg(long)]
    pub width: usize,
    /// Feature vectors list the image column by column.
    #[arg(long)]
    pub column_major: bool,
    /// Also export the rows of the first layer alone.
    #[arg(long)]
    pub first_layer: bool,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    /// Two tight blobs 10 apart in 10 dimensions.
    Blobs,
    /// Four classes in 30 dimensions, four informative.
    FourClass,
    /// Blobs from --classes, --per-class, --dim, --spread, --sigma.
    Custom,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    #[arg(long, default_value_t = 50)]
    pub per_class: usize,
    #[arg(long, default_value_t = 10)]
    pub dim: usize,
    #[arg(long, default_value_t = 10.0)]
    pub spread: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `.jpld` or `.csv` output.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a random split with --train-per-class samples per class.
    #[arg(long, requires = "train_per_class")]
    pub split_out: Option<PathBuf>,
    #[arg(long)]
    pub train_per_class: Option<usize>,
}

impl DataArgs {
    fn settings(&self) -> Settings {
        Settings {
            split: self.split.clone(),
            train_per_class: self.train_per_class,
            label_column: self.label_column.clone(),
            columns: self.column_major_data.then_some(true),
            ..Default::default()
        }
    }
}

impl TuningArgs {
    fn settings(&self) -> CliResult<Settings> {
        Ok(Settings {
            layers: self.layers.as_deref().map(settings::parse_layers).transpose()?,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            eta: self.eta,
            zeta: self.zeta,
            outer_max_iter: self.outer_max_iter,
            admm_eps: self.admm_eps,
            admm_max_iter: self.admm_max_iter,
            mu0: self.mu0,
            mu_max: self.mu_max,
            rho: self.rho,
            residual_mode: self.residual_mode.as_deref().map(settings::parse_residual_mode).transpose()?,
            graph_k: self.graph_k,
            bandwidth: self.bandwidth.as_deref().map(settings::parse_bandwidth).transpose()?,
            supervised_graph: self.supervised_graph.then_some(true),
            per_layer_graph: self.per_layer_graph.then_some(true),
            lpp_ridge: self.lpp_ridge,
            normalize: self.normalize.as_deref().map(settings::parse_normalize).transpose()?,
            seed: self.seed,
            ..Default::default()
        })
    }
}

/// Flags layered over the config file named by `--config`.
pub fn resolve(data: &DataArgs, tuning: &TuningArgs, extra: Settings) -> CliResult<Settings> {
    let flags = extra.over(tuning.settings()?).over(data.settings());
    let file = match &tuning.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    Ok(flags.over(file))
}
