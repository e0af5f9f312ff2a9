//! Command-line surface.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "ranknorm",
    version,
    about = "Audit harness for rank-based input normalization operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Audit one operator against the three admissibility axioms.
    Comply(ComplyArgs),
    /// Full operator-level stability table: every operator, every axiom.
    Stability(StabilityArgs),
    /// Model-level robustness under monotone distribution shift.
    Robustness(RobustnessArgs),
    /// Tabular regression protocol on a user-supplied numeric CSV.
    Tabular(TabularArgs),
    /// Counterexample controls that must detect each axiom violation.
    Controls(ControlsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    Qnorm,
    Softsort,
    Sinkhorn,
}

impl OperatorArg {
    pub fn kind(self) -> ranknorm::OperatorKind {
        match self {
            OperatorArg::Qnorm => ranknorm::OperatorKind::QNorm,
            OperatorArg::Softsort => ranknorm::OperatorKind::SoftSort,
            OperatorArg::Sinkhorn => ranknorm::OperatorKind::Sinkhorn,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QNormModeArg {
    RankLayer,
    RelaxedRefit,
    RelaxedFrozen,
}

impl QNormModeArg {
    pub fn mode(self) -> ranknorm::learner::QNormMode {
        match self {
            QNormModeArg::RankLayer => ranknorm::learner::QNormMode::RankLayer,
            QNormModeArg::RelaxedRefit => ranknorm::learner::QNormMode::RelaxedRefit,
            QNormModeArg::RelaxedFrozen => ranknorm::learner::QNormMode::RelaxedFrozen,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Master seed; every random stream derives from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving report.txt and metrics.csv.
    #[arg(long, default_value = "reports")]
    pub out: PathBuf,
}

/// Operator hyperparameter overrides.
#[derive(Debug, Args)]
pub struct OperatorOverrides {
    /// SoftSort temperature.
    #[arg(long, default_value_t = ranknorm::operators::DEFAULT_TAU)]
    pub tau: f64,
    /// Sinkhorn entropic regularization.
    #[arg(long = "sinkhorn-eps", default_value_t = ranknorm::operators::DEFAULT_SINKHORN_EPSILON)]
    pub sinkhorn_eps: f64,
    /// Sinkhorn iteration count.
    #[arg(long = "sinkhorn-iters", default_value_t = ranknorm::operators::DEFAULT_SINKHORN_ITERS)]
    pub sinkhorn_iters: usize,
    /// QNorm output clamp epsilon.
    #[arg(long = "epsilon-out", default_value_t = ranknorm::operators::DEFAULT_EPSILON_OUT)]
    pub epsilon_out: f64,
}

/// Compliance experiment size and probe overrides.
#[derive(Debug, Args)]
pub struct ComplianceOverrides {
    /// Sample count for the invariance and stability populations.
    #[arg(long = "n-samples", default_value_t = 2000)]
    pub n_samples: usize,
    /// Population the batch-independence batches are drawn from.
    #[arg(long = "population-size", default_value_t = 8000)]
    pub population_size: usize,
    /// Number of batches sharing the probe sample.
    #[arg(long = "n-batches", default_value_t = 200)]
    pub n_batches: usize,
    /// Size of each batch, probe included.
    #[arg(long = "batch-size", default_value_t = 256)]
    pub batch_size: usize,
    /// Forward-difference perturbation.
    #[arg(long = "eps-perturb", default_value_t = 1e-3)]
    pub eps_perturb: f64,
    /// Central-difference step.
    #[arg(long = "grad-h", default_value_t = 1e-3)]
    pub grad_h: f64,
    /// Lower end of the sensitivity probe grid.
    #[arg(long = "probe-lo", default_value_t = -ranknorm::compliance::DEFAULT_PROBE_HALF_WIDTH)]
    pub probe_lo: f64,
    /// Upper end of the sensitivity probe grid.
    #[arg(long = "probe-hi", default_value_t = ranknorm::compliance::DEFAULT_PROBE_HALF_WIDTH)]
    pub probe_hi: f64,
    /// Number of probe points.
    #[arg(long = "probe-points", default_value_t = ranknorm::compliance::DEFAULT_PROBE_POINTS)]
    pub probe_points: usize,
}

#[derive(Debug, Args)]
pub struct ComplyArgs {
    /// Operator under audit.
    #[arg(long, value_enum, default_value_t = OperatorArg::Qnorm)]
    pub operator: OperatorArg,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub operator_overrides: OperatorOverrides,
    #[command(flatten)]
    pub compliance: ComplianceOverrides,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub operator_overrides: OperatorOverrides,
    #[command(flatten)]
    pub compliance: ComplianceOverrides,
}

#[derive(Debug, Args)]
pub struct RobustnessArgs {
    /// Operators to train and evaluate (repeatable).
    #[arg(long, value_enum)]
    pub operator: Vec<OperatorArg>,
    /// Sample count of the synthetic task.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Feature count of the synthetic task.
    #[arg(long, default_value_t = 6)]
    pub d: usize,
    /// Held-out share of samples.
    #[arg(long = "test-ratio", default_value_t = 0.25)]
    pub test_ratio: f64,
    /// Hidden width of the model.
    #[arg(long, default_value_t = 16)]
    pub hidden: usize,
    /// Training epochs.
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    /// Learning rate.
    #[arg(long, default_value_t = 0.003)]
    pub lr: f64,
    /// L2 weight decay.
    #[arg(long = "weight-decay", default_value_t = 0.0)]
    pub weight_decay: f64,
    /// Rank representation used by the QNorm front-end.
    #[arg(long = "qnorm-mode", value_enum, default_value_t = QNormModeArg::RankLayer)]
    pub qnorm_mode: QNormModeArg,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub operator_overrides: OperatorOverrides,
}

#[derive(Debug, Args)]
pub struct TabularArgs {
    /// Input CSV with a header row; all selected columns must be numeric.
    #[arg(long)]
    pub csv: PathBuf,
    /// Name of the target column.
    #[arg(long)]
    pub target: String,
    /// Comma-separated feature columns; defaults to all non-target columns.
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    /// Held-out share of rows.
    #[arg(long = "test-ratio", default_value_t = 0.25)]
    pub test_ratio: f64,
    /// Comma-separated hidden layer widths.
    #[arg(long, value_delimiter = ',', default_values_t = vec![128, 128, 64, 32])]
    pub hidden: Vec<usize>,
    /// Training epochs.
    #[arg(long, default_value_t = 400)]
    pub epochs: usize,
    /// Learning rate.
    #[arg(long, default_value_t = 0.003)]
    pub lr: f64,
    /// L2 weight decay.
    #[arg(long = "weight-decay", default_value_t = 1e-4)]
    pub weight_decay: f64,
    /// QNorm output clamp epsilon.
    #[arg(long = "epsilon-out", default_value_t = ranknorm::operators::DEFAULT_EPSILON_OUT)]
    pub epsilon_out: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ControlsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Forward-difference perturbation for the temperature control.
    #[arg(long = "eps-perturb", default_value_t = 1e-3)]
    pub eps_perturb: f64,
}
