//! Tabular regression protocol for user-supplied numeric data.
//!
//! Pipeline: deterministic train/test split, per-feature z-scoring fitted on
//! the training split only, target z-scoring fitted on the training split,
//! relaxed QNorm with statistics frozen from the scaled training features,
//! then a deeper MLP trained by full-batch Adam. Metrics are reported on
//! both splits in normalized-target units.

use super::mlp::{train, TrainConfig};
use super::task::train_test_split;
use super::LearnError;
use crate::matrix::FeatureMatrix;
use crate::metrics::spearman;
use crate::operators::{qnorm_apply, OperatorConfig};
use crate::rank::{fit_stats, NormalizationStats};

/// Targets whose training-split std falls below this cannot be z-scored.
pub const TARGET_STD_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TabularConfig {
    pub test_ratio: f64,
    /// Hidden layer widths; input and the final width-1 layer are implied.
    pub hidden: Vec<usize>,
    pub train: TrainConfig,
    pub epsilon_out: f64,
}

impl TabularConfig {
    pub fn with_seed(seed: u64) -> Self {
        TabularConfig {
            test_ratio: 0.25,
            hidden: vec![128, 128, 64, 32],
            train: TrainConfig::tabular(seed),
            epsilon_out: crate::operators::DEFAULT_EPSILON_OUT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabularResult {
    pub n_train: usize,
    pub n_test: usize,
    pub train_mse: f64,
    pub test_mse: f64,
    pub train_spearman: Option<f64>,
    pub test_spearman: Option<f64>,
    pub final_train_loss: f64,
}

fn zscore_matrix(
    x: &FeatureMatrix,
    stats: &NormalizationStats,
) -> Result<FeatureMatrix, LearnError> {
    stats.check_dim(x.d())?;
    let mut values = Vec::with_capacity(x.n() * x.d());
    for i in 0..x.n() {
        for j in 0..x.d() {
            values.push(stats.zscore(x.get(i, j), j));
        }
    }
    Ok(FeatureMatrix::new(x.n(), x.d(), values)?)
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Run the tabular pipeline on features `x` and raw targets `y`.
pub fn run_tabular_protocol(
    x: &FeatureMatrix,
    y: &[f64],
    cfg: &TabularConfig,
) -> Result<TabularResult, LearnError> {
    if y.len() != x.n() {
        return Err(LearnError::TargetLength {
            inputs: x.n(),
            targets: y.len(),
        });
    }
    let (train_idx, test_idx) = train_test_split(x.n(), cfg.test_ratio, cfg.train.seed)?;
    let x_train = x.select_rows(&train_idx)?;
    let x_test = x.select_rows(&test_idx)?;
    let y_train_raw: Vec<f64> = train_idx.iter().map(|&i| y[i]).collect();
    let y_test_raw: Vec<f64> = test_idx.iter().map(|&i| y[i]).collect();

    // Feature scaler from the training split only.
    let scaler = fit_stats(&x_train);
    let x_train_scaled = zscore_matrix(&x_train, &scaler)?;
    let x_test_scaled = zscore_matrix(&x_test, &scaler)?;

    // Target z-scoring, also train-split only; degenerate targets rejected.
    let n_train = y_train_raw.len() as f64;
    let y_mean = y_train_raw.iter().sum::<f64>() / n_train;
    let y_std = (y_train_raw
        .iter()
        .map(|v| (v - y_mean) * (v - y_mean))
        .sum::<f64>()
        / n_train)
        .sqrt();
    if y_std < TARGET_STD_FLOOR {
        return Err(LearnError::DegenerateTarget { std: y_std });
    }
    let y_train: Vec<f64> = y_train_raw.iter().map(|v| (v - y_mean) / y_std).collect();
    let y_test: Vec<f64> = y_test_raw.iter().map(|v| (v - y_mean) / y_std).collect();

    // Frozen-statistics QNorm on the scaled features.
    let mut op_cfg = OperatorConfig::qnorm();
    op_cfg.epsilon_out = cfg.epsilon_out;
    let qnorm_stats = fit_stats(&x_train_scaled);
    let feat_train = qnorm_apply(&x_train_scaled, &qnorm_stats, &op_cfg)?;
    let feat_test = qnorm_apply(&x_test_scaled, &qnorm_stats, &op_cfg)?;
    let feat_train = FeatureMatrix::new(x_train.n(), x.d(), feat_train.values().to_vec())?;
    let feat_test = FeatureMatrix::new(x_test.n(), x.d(), feat_test.values().to_vec())?;

    let mut layer_sizes = Vec::with_capacity(cfg.hidden.len() + 2);
    layer_sizes.push(x.d());
    layer_sizes.extend_from_slice(&cfg.hidden);
    layer_sizes.push(1);

    let (model, losses) = train(&feat_train, &y_train, &layer_sizes, &cfg.train)?;
    let pred_train = model.forward(&feat_train)?;
    let pred_test = model.forward(&feat_test)?;

    Ok(TabularResult {
        n_train: train_idx.len(),
        n_test: test_idx.len(),
        train_mse: mse(&pred_train, &y_train),
        test_mse: mse(&pred_test, &y_test),
        train_spearman: spearman(&pred_train, &y_train)?,
        test_spearman: spearman(&pred_test, &y_test)?,
        final_train_loss: *losses.last().expect("at least one epoch"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::task::gen_synthetic_task;

    fn quick_config(seed: u64) -> TabularConfig {
        let mut cfg = TabularConfig::with_seed(seed);
        cfg.hidden = vec![16, 8];
        cfg.train.epochs = 60;
        cfg
    }

    #[test]
    fn learns_the_synthetic_task() {
        let task = gen_synthetic_task(300, 4, 0);
        let result = run_tabular_protocol(&task.x, &task.y, &quick_config(0)).unwrap();
        assert_eq!(result.n_train, 225);
        assert_eq!(result.n_test, 75);
        assert!(
            result.test_spearman.unwrap() > 0.6,
            "{:?}",
            result.test_spearman
        );
        assert!(result.train_mse < 1.0);
    }

    #[test]
    fn constant_target_is_rejected() {
        let task = gen_synthetic_task(50, 3, 1);
        let y = vec![7.5; 50];
        let err = run_tabular_protocol(&task.x, &y, &quick_config(1)).unwrap_err();
        assert!(matches!(err, LearnError::DegenerateTarget { .. }));
    }

    #[test]
    fn protocol_is_deterministic_per_seed() {
        let task = gen_synthetic_task(120, 3, 2);
        let a = run_tabular_protocol(&task.x, &task.y, &quick_config(2)).unwrap();
        let b = run_tabular_protocol(&task.x, &task.y, &quick_config(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn target_length_mismatch_is_an_error() {
        let task = gen_synthetic_task(30, 2, 3);
        let err = run_tabular_protocol(&task.x, &task.y[..20], &quick_config(3)).unwrap_err();
        assert!(matches!(
            err,
            LearnError::TargetLength {
                inputs: 30,
                targets: 20
            }
        ));
    }
}
