//! Model-level robustness under monotone distribution shift.
//!
//! Protocol: generate the synthetic task, split it, normalize the training
//! batch with an operator front-end, train the small MLP, then evaluate rank
//! metrics on the test split both clean and under each shift-catalog
//! transform.
//!
//! The operator context is recomputed on whatever batch arrives: the QNorm
//! rank layer ranks within the incoming batch (for exact ranks the transform
//! changes nothing, bitwise), and the soft permutation layers rank each
//! sample's features against themselves, so their context travels with the
//! sample. Degradation of the baselines comes from the transforms distorting
//! the value gaps their kernels are built from.

use super::frontend::{FittedFrontEnd, FrontEndKind, QNormMode};
use super::mlp::{train, TrainConfig};
use super::task::{gen_synthetic_task, train_test_split};
use super::LearnError;
use crate::matrix::FeatureMatrix;
use crate::metrics::{ndcg, spearman};
use crate::operators::{OperatorConfig, OperatorKind, MODEL_LEVEL_SINKHORN_ITERS};
use crate::transform::MonotoneTransform;

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessConfig {
    pub n: usize,
    pub d: usize,
    pub test_ratio: f64,
    pub hidden: usize,
    pub train: TrainConfig,
    pub qnorm_mode: QNormMode,
    pub operators: Vec<OperatorKind>,
    pub tau: f64,
    pub sinkhorn_epsilon: f64,
    pub sinkhorn_iters: usize,
    pub epsilon_out: f64,
}

impl RobustnessConfig {
    pub fn with_seed(seed: u64) -> Self {
        RobustnessConfig {
            n: 1000,
            d: 6,
            test_ratio: 0.25,
            hidden: 16,
            train: TrainConfig::model_level(seed),
            qnorm_mode: QNormMode::RankLayer,
            operators: vec![
                OperatorKind::QNorm,
                OperatorKind::SoftSort,
                OperatorKind::Sinkhorn,
            ],
            tau: crate::operators::DEFAULT_TAU,
            sinkhorn_epsilon: crate::operators::DEFAULT_SINKHORN_EPSILON,
            sinkhorn_iters: MODEL_LEVEL_SINKHORN_ITERS,
            epsilon_out: crate::operators::DEFAULT_EPSILON_OUT,
        }
    }

    fn operator_config(&self, kind: OperatorKind) -> OperatorConfig {
        let mut cfg = OperatorConfig::new(kind);
        cfg.tau = self.tau;
        cfg.sinkhorn_epsilon = self.sinkhorn_epsilon;
        cfg.sinkhorn_iters = self.sinkhorn_iters;
        cfg.epsilon_out = self.epsilon_out;
        cfg
    }

    fn front_end_kind(&self, kind: OperatorKind) -> Result<FrontEndKind, LearnError> {
        match kind {
            OperatorKind::QNorm => Ok(FrontEndKind::QNorm(self.qnorm_mode)),
            OperatorKind::SoftSort => Ok(FrontEndKind::SoftSort),
            OperatorKind::Sinkhorn => Ok(FrontEndKind::Sinkhorn),
            other => Err(LearnError::Operator(
                crate::operators::OperatorError::NotBatchOperator { kind: other.name() },
            )),
        }
    }
}

/// Rank metrics for one transform of the test inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformEval {
    pub transform: String,
    pub ndcg: Option<f64>,
    pub spearman: Option<f64>,
    /// Test predictions under this transform, kept for order comparisons.
    pub predictions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorRobustness {
    pub operator: OperatorKind,
    pub clean: TransformEval,
    pub shifted: Vec<TransformEval>,
    pub initial_train_loss: f64,
    pub final_train_loss: f64,
}

impl OperatorRobustness {
    pub fn spearman_values(&self) -> Vec<(String, Option<f64>)> {
        let mut out = vec![("clean".to_string(), self.clean.spearman)];
        out.extend(
            self.shifted
                .iter()
                .map(|e| (e.transform.clone(), e.spearman)),
        );
        out
    }

    /// Max minus min defined Spearman across the shifted evaluations.
    pub fn spearman_spread(&self) -> Option<f64> {
        let defined: Vec<f64> = self.shifted.iter().filter_map(|e| e.spearman).collect();
        if defined.len() != self.shifted.len() {
            return None;
        }
        let max = defined.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = defined.iter().cloned().fold(f64::INFINITY, f64::min);
        Some(max - min)
    }

    /// Largest drop of shifted Spearman below the clean value.
    pub fn worst_spearman_drop(&self) -> Option<f64> {
        let clean = self.clean.spearman?;
        self.shifted
            .iter()
            .map(|e| e.spearman.map(|s| clean - s))
            .collect::<Option<Vec<f64>>>()
            .map(|drops| drops.into_iter().fold(f64::NEG_INFINITY, f64::max))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessResult {
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub per_operator: Vec<OperatorRobustness>,
}

/// Min-max normalized relevance over the evaluation targets.
fn relevance(targets: &[f64]) -> Vec<f64> {
    let min = targets.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = targets.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return vec![0.0; targets.len()];
    }
    targets.iter().map(|&y| (y - min) / (max - min)).collect()
}

fn evaluate(
    front_end: &FittedFrontEnd,
    model: &super::mlp::Mlp,
    inputs: &FeatureMatrix,
    targets: &[f64],
    rel: &[f64],
    label: &str,
) -> Result<TransformEval, LearnError> {
    let features = front_end.apply(inputs)?;
    let predictions = model.forward(&features)?;
    let rho = spearman(&predictions, targets)?;
    let k = targets.len();
    let ndcg_value = ndcg(&predictions, rel, k)?;
    Ok(TransformEval {
        transform: label.to_string(),
        ndcg: ndcg_value,
        spearman: rho,
        predictions,
    })
}

/// Run the robustness protocol for every configured operator.
pub fn run_robustness(cfg: &RobustnessConfig) -> Result<RobustnessResult, LearnError> {
    let seed = cfg.train.seed;
    let task = gen_synthetic_task(cfg.n, cfg.d, seed);
    let (train_idx, test_idx) = train_test_split(cfg.n, cfg.test_ratio, seed)?;
    let x_train = task.x.select_rows(&train_idx)?;
    let y_train: Vec<f64> = train_idx.iter().map(|&i| task.y[i]).collect();
    let x_test = task.x.select_rows(&test_idx)?;
    let y_test: Vec<f64> = test_idx.iter().map(|&i| task.y[i]).collect();
    let rel = relevance(&y_test);
    let layer_sizes = [cfg.d, cfg.hidden, 1];

    let mut per_operator = Vec::new();
    for &kind in &cfg.operators {
        let fe_kind = cfg.front_end_kind(kind)?;
        let op_cfg = cfg.operator_config(kind);
        let front_end = FittedFrontEnd::fit(fe_kind, op_cfg, &x_train)?;
        let features_train = front_end.apply(&x_train)?;
        let (model, losses) = train(&features_train, &y_train, &layer_sizes, &cfg.train)?;

        let clean = evaluate(&front_end, &model, &x_test, &y_test, &rel, "clean")?;
        let mut shifted = Vec::new();
        for t in MonotoneTransform::shift_catalog() {
            let x_shifted = t.apply_matrix(&x_test)?;
            shifted.push(evaluate(
                &front_end,
                &model,
                &x_shifted,
                &y_test,
                &rel,
                t.name(),
            )?);
        }
        per_operator.push(OperatorRobustness {
            operator: kind,
            clean,
            shifted,
            initial_train_loss: *losses.first().expect("at least one epoch"),
            final_train_loss: *losses.last().expect("at least one epoch"),
        });
    }
    Ok(RobustnessResult {
        seed,
        n_train: train_idx.len(),
        n_test: test_idx.len(),
        per_operator,
    })
}
