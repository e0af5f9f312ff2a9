//! Model-level experiments: a synthetic latent-ranking task, a small MLP
//! trained by full-batch Adam on hand-derived gradients, operator front-ends
//! feeding the MLP, and the robustness / tabular protocols.

mod frontend;
mod mlp;
mod robustness;
mod tabular;
mod task;

pub use frontend::{FittedFrontEnd, FrontEndKind, QNormMode};
pub use mlp::{train, Gradients, Mlp, TrainConfig, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};
pub use robustness::{
    run_robustness, OperatorRobustness, RobustnessConfig, RobustnessResult, TransformEval,
};
pub use tabular::{run_tabular_protocol, TabularConfig, TabularResult};
pub use task::{gen_synthetic_task, train_test_split, TaskData};

use crate::matrix::MatrixError;
use crate::metrics::MetricError;
use crate::operators::OperatorError;
use crate::rank::RankError;
use crate::transform::TransformError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("input has {got} features, model expects {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("targets have length {targets}, inputs have {inputs} rows")]
    TargetLength { inputs: usize, targets: usize },
    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("target column is degenerate (std {std:e}); z-scoring rejected")]
    DegenerateTarget { std: f64 },
    #[error("split leaves an empty {side} set (n = {n}, test_ratio = {ratio})")]
    EmptySplit {
        side: &'static str,
        n: usize,
        ratio: f64,
    },
    #[error("network needs at least input and output layers, got {got}")]
    TooFewLayers { got: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}
