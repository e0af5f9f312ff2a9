//! Normalization operators under audit.
//!
//! QNorm is the admissible operator: a pointwise logistic of the frozen
//! z-score, affinely clamped into `[eps, 1 - eps]`. SoftSort and SinkhornSort
//! are the differentiable-sorting baselines built from pairwise value gaps
//! over a batch column; they are retained precisely because they violate the
//! admissibility axioms. The batch-ECDF and value-gap operators are minimal
//! counterexamples used by the negative controls.

use crate::matrix::FeatureMatrix;
use crate::rank::{fit_stats, logistic, NormalizationStats, RankError, RankRepresentation};
use crate::transform::{MonotoneTransform, TransformError};
use thiserror::Error;

/// Kernel entries are floored here before any Sinkhorn division; without the
/// floor, far-separated points underflow `exp(-C/eps)` to zero and the
/// iteration divides by zero.
pub const KERNEL_FLOOR: f64 = 1e-30;

/// Default output clamp for QNorm.
pub const DEFAULT_EPSILON_OUT: f64 = 1e-6;
/// Default SoftSort temperature.
pub const DEFAULT_TAU: f64 = 0.1;
/// Default Sinkhorn entropic regularization.
pub const DEFAULT_SINKHORN_EPSILON: f64 = 0.1;
/// Default Sinkhorn iteration count for operator-level audits.
pub const DEFAULT_SINKHORN_ITERS: usize = 15;
/// Sinkhorn iteration count used when the operator feeds a model.
pub const MODEL_LEVEL_SINKHORN_ITERS: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("operator input has {got} features, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty input column")]
    EmptyColumn,
    #[error("empty batch")]
    EmptyBatch,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weight vector has length {got}, expected {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("non-finite Sinkhorn scaling at iteration {iteration}")]
    SinkhornDiverged { iteration: usize },
    #[error("{kind} is not a feature-wise batch operator")]
    NotBatchOperator { kind: &'static str },
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OperatorKind {
    QNorm,
    SoftSort,
    Sinkhorn,
    BatchEcdf,
    ValueGapPair,
}

impl OperatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::QNorm => "qnorm",
            OperatorKind::SoftSort => "softsort",
            OperatorKind::Sinkhorn => "sinkhorn",
            OperatorKind::BatchEcdf => "batch-ecdf",
            OperatorKind::ValueGapPair => "value-gap-pair",
        }
    }
}

/// Hyperparameters shared by all operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorConfig {
    pub kind: OperatorKind,
    /// QNorm output clamp; outputs live in `[epsilon_out, 1 - epsilon_out]`.
    pub epsilon_out: f64,
    /// SoftSort temperature.
    pub tau: f64,
    /// Sinkhorn entropic regularization.
    pub sinkhorn_epsilon: f64,
    /// Sinkhorn iteration count.
    pub sinkhorn_iters: usize,
    /// Optional nonnegative scalarization weights of length d.
    pub weights: Option<Vec<f64>>,
}

impl OperatorConfig {
    pub fn new(kind: OperatorKind) -> Self {
        OperatorConfig {
            kind,
            epsilon_out: DEFAULT_EPSILON_OUT,
            tau: DEFAULT_TAU,
            sinkhorn_epsilon: DEFAULT_SINKHORN_EPSILON,
            sinkhorn_iters: DEFAULT_SINKHORN_ITERS,
            weights: None,
        }
    }

    pub fn qnorm() -> Self {
        OperatorConfig::new(OperatorKind::QNorm)
    }

    pub fn softsort() -> Self {
        OperatorConfig::new(OperatorKind::SoftSort)
    }

    pub fn sinkhorn() -> Self {
        OperatorConfig::new(OperatorKind::Sinkhorn)
    }

    pub fn validate(&self) -> Result<(), OperatorError> {
        if self.tau <= 0.0 || self.tau.is_nan() {
            return Err(OperatorError::InvalidConfig(format!(
                "tau must be > 0, got {}",
                self.tau
            )));
        }
        if self.sinkhorn_epsilon <= 0.0 || self.sinkhorn_epsilon.is_nan() {
            return Err(OperatorError::InvalidConfig(format!(
                "sinkhorn_epsilon must be > 0, got {}",
                self.sinkhorn_epsilon
            )));
        }
        if self.sinkhorn_iters == 0 {
            return Err(OperatorError::InvalidConfig(
                "sinkhorn_iters must be >= 1".into(),
            ));
        }
        if !(0.0..0.5).contains(&self.epsilon_out) {
            return Err(OperatorError::InvalidConfig(format!(
                "epsilon_out must lie in [0, 0.5), got {}",
                self.epsilon_out
            )));
        }
        if let Some(w) = &self.weights {
            for (index, &value) in w.iter().enumerate() {
                if value < 0.0 || value.is_nan() {
                    return Err(OperatorError::NegativeWeight { index, value });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermutationKind {
    /// Each row sums to 1 (softmax rows).
    RowStochastic,
    /// Rows and columns sum approximately to 1 after Sinkhorn scaling.
    DoublyStochasticApprox,
}

/// Dense `n x n` soft permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftPermutation {
    n: usize,
    matrix: Vec<f64>,
    kind: PermutationKind,
}

impl SoftPermutation {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> PermutationKind {
        self.kind
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.n + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.matrix[i * self.n..(i + 1) * self.n].iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for i in 0..self.n {
            for (j, sum) in sums.iter_mut().enumerate() {
                *sum += self.get(i, j);
            }
        }
        sums
    }

    /// Largest deviation of any row or column sum from 1.
    pub fn max_marginal_error(&self) -> f64 {
        self.row_sums()
            .iter()
            .chain(self.col_sums().iter())
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Operator output matrix with entries in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorOutput {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl OperatorOutput {
    fn new(n: usize, d: usize, values: Vec<f64>) -> Self {
        debug_assert!(
            values.iter().all(|v| (0.0..=1.0).contains(v)),
            "output left [0,1]"
        );
        OperatorOutput { n, d, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.d + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, col)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Endpoint-inclusive grid of `n` values from 0 to 1; `[0.0]` when `n == 1`.
pub fn linspace01(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    let denom = (n - 1) as f64;
    (0..n).map(|i| i as f64 / denom).collect()
}

/// QNorm on one standardized coordinate: `logistic(z) * (1 - 2e) + e`.
#[inline]
pub fn qnorm_scalar(x: f64, stats: &NormalizationStats, j: usize, epsilon_out: f64) -> f64 {
    logistic(stats.zscore(x, j)) * (1.0 - 2.0 * epsilon_out) + epsilon_out
}

/// Relaxed rank of one coordinate: `logistic((x - mu[j]) / sigma[j])`.
#[inline]
pub fn relaxed_rank_scalar(x: f64, stats: &NormalizationStats, j: usize) -> f64 {
    logistic(stats.zscore(x, j))
}

/// Entry-wise QNorm under frozen statistics.
///
/// Strictly increasing per feature and free of any cross-sample interaction,
/// so applying it to a sub-batch reproduces the full-batch outputs bitwise.
pub fn qnorm_apply(
    x: &FeatureMatrix,
    stats: &NormalizationStats,
    cfg: &OperatorConfig,
) -> Result<OperatorOutput, OperatorError> {
    cfg.validate()?;
    stats.check_dim(x.d())?;
    let mut values = Vec::with_capacity(x.n() * x.d());
    for i in 0..x.n() {
        for j in 0..x.d() {
            values.push(qnorm_scalar(x.get(i, j), stats, j, cfg.epsilon_out));
        }
    }
    Ok(OperatorOutput::new(x.n(), x.d(), values))
}

/// Scalarization mode: `logistic(w . r) * (1 - 2e) + e`, one output per row.
///
/// Weights must be nonnegative so the score is monotone in every rank
/// coordinate. `None` falls back to `cfg.weights`, then to the uniform
/// vector `1/d`.
pub fn qnorm_scalarize(
    ranks: &RankRepresentation,
    weights: Option<&[f64]>,
    cfg: &OperatorConfig,
) -> Result<OperatorOutput, OperatorError> {
    cfg.validate()?;
    let d = ranks.d();
    let uniform;
    let w = match weights.or(cfg.weights.as_deref()) {
        Some(w) => {
            if w.len() != d {
                return Err(OperatorError::WeightLength {
                    expected: d,
                    got: w.len(),
                });
            }
            for (index, &value) in w.iter().enumerate() {
                if value < 0.0 || value.is_nan() {
                    return Err(OperatorError::NegativeWeight { index, value });
                }
            }
            w
        }
        None => {
            uniform = vec![1.0 / d as f64; d];
            &uniform
        }
    };
    let mut values = Vec::with_capacity(ranks.n());
    for i in 0..ranks.n() {
        let score: f64 = (0..d).map(|j| w[j] * ranks.get(i, j)).sum();
        values.push(logistic(score) * (1.0 - 2.0 * cfg.epsilon_out) + cfg.epsilon_out);
    }
    Ok(OperatorOutput::new(ranks.n(), 1, values))
}

/// SoftSort over one batch column.
///
/// `W[i][j] = softmax_j(-(x_i - x_j)^2 / tau)` with row-wise max subtraction,
/// then `outputs = W * linspace01(n)`. The weight matrix depends on raw value
/// gaps, which is what breaks monotone invariance.
pub fn softsort_apply(
    column: &[f64],
    cfg: &OperatorConfig,
) -> Result<(Vec<f64>, SoftPermutation), OperatorError> {
    cfg.validate()?;
    let n = column.len();
    if n == 0 {
        return Err(OperatorError::EmptyColumn);
    }
    let v = linspace01(n);
    let mut matrix = vec![0.0; n * n];
    let mut outputs = vec![0.0; n];
    let mut logits = vec![0.0; n];
    for i in 0..n {
        let mut max_logit = f64::NEG_INFINITY;
        for j in 0..n {
            let gap = column[i] - column[j];
            let l = -(gap * gap) / cfg.tau;
            logits[j] = l;
            if l > max_logit {
                max_logit = l;
            }
        }
        let row = &mut matrix[i * n..(i + 1) * n];
        let mut z = 0.0;
        for j in 0..n {
            let w = (logits[j] - max_logit).exp();
            row[j] = w;
            z += w;
        }
        let mut out = 0.0;
        for j in 0..n {
            row[j] /= z;
            out += row[j] * v[j];
        }
        outputs[i] = out;
    }
    Ok((
        outputs,
        SoftPermutation {
            n,
            matrix,
            kind: PermutationKind::RowStochastic,
        },
    ))
}

/// SinkhornSort over one batch column.
///
/// Cost `C[i][j] = |x_i - x_j|`, kernel `K = exp(-C / eps)` floored at
/// [`KERNEL_FLOOR`], then `iters` rounds of `u <- 1/(K v)`, `v <- 1/(K^T u)`
/// from `v = 1`. Output is `P * linspace01(n)` with `P = diag(u) K diag(v)`.
pub fn sinkhorn_apply(
    column: &[f64],
    cfg: &OperatorConfig,
) -> Result<(Vec<f64>, SoftPermutation), OperatorError> {
    cfg.validate()?;
    let n = column.len();
    if n == 0 {
        return Err(OperatorError::EmptyColumn);
    }
    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let cost = (column[i] - column[j]).abs();
            kernel[i * n + j] = (-cost / cfg.sinkhorn_epsilon).exp().max(KERNEL_FLOOR);
        }
    }
    let mut u = vec![1.0; n];
    let mut v = vec![1.0; n];
    for iteration in 0..cfg.sinkhorn_iters {
        for i in 0..n {
            let kv: f64 = (0..n).map(|j| kernel[i * n + j] * v[j]).sum();
            u[i] = 1.0 / kv;
        }
        for j in 0..n {
            let ktu: f64 = (0..n).map(|i| kernel[i * n + j] * u[i]).sum();
            v[j] = 1.0 / ktu;
        }
        if u.iter().chain(v.iter()).any(|s| !s.is_finite()) {
            return Err(OperatorError::SinkhornDiverged { iteration });
        }
    }
    let grid = linspace01(n);
    let mut matrix = vec![0.0; n * n];
    let mut outputs = vec![0.0; n];
    for i in 0..n {
        let mut out = 0.0;
        for j in 0..n {
            let p = u[i] * kernel[i * n + j] * v[j];
            matrix[i * n + j] = p;
            out += p * grid[j];
        }
        // The iteration ends on the v update, so columns of P sum to 1
        // exactly but rows only approximately; on badly separated columns a
        // row sum above 1 can push the readout past the grid ends.
        outputs[i] = out.clamp(0.0, 1.0);
    }
    Ok((
        outputs,
        SoftPermutation {
            n,
            matrix,
            kind: PermutationKind::DoublyStochasticApprox,
        },
    ))
}

/// Within-batch cumulative fraction `(1/|B|) * #{y in B : y <= x}`.
///
/// Counts batch members at or below the probe. The mirrored direction
/// `#{y : x <= y}` appears in some writeups of this counterexample but does
/// not reproduce its worked values (1/2 for the lower member of a pair, 1
/// for the upper), so this implementation fixes the `y <= x` convention.
pub fn batch_ecdf_apply(x: f64, batch: &[f64]) -> Result<f64, OperatorError> {
    if batch.is_empty() {
        return Err(OperatorError::EmptyBatch);
    }
    let count = batch.iter().filter(|&&y| y <= x).count();
    Ok(count as f64 / batch.len() as f64)
}

/// Gap of a pair before and after a monotone transform.
///
/// Negative control for monotone invariance: any nonlinear strictly
/// increasing `g` changes `|u - v|`, so no function of the raw gap can be
/// rank-invariant.
pub fn value_gap_pair(u: f64, v: f64, g: &MonotoneTransform) -> Result<(f64, f64), OperatorError> {
    let gap = (u - v).abs();
    let transformed = (g.apply_scalar(u)? - g.apply_scalar(v)?).abs();
    Ok((gap, transformed))
}

/// A configured operator with whatever reference state it needs frozen.
///
/// QNorm freezes per-feature statistics at fit time and never touches the
/// evaluation batch; SoftSort and Sinkhorn carry no state because their
/// context is intrinsically the batch they are applied to.
#[derive(Debug, Clone)]
pub struct FittedOperator {
    kind: OperatorKind,
    cfg: OperatorConfig,
    stats: Option<NormalizationStats>,
}

impl FittedOperator {
    pub fn fit(
        kind: OperatorKind,
        cfg: OperatorConfig,
        reference: &FeatureMatrix,
    ) -> Result<Self, OperatorError> {
        cfg.validate()?;
        match kind {
            OperatorKind::QNorm => Ok(FittedOperator {
                kind,
                cfg,
                stats: Some(fit_stats(reference)),
            }),
            OperatorKind::SoftSort | OperatorKind::Sinkhorn => Ok(FittedOperator {
                kind,
                cfg,
                stats: None,
            }),
            OperatorKind::BatchEcdf | OperatorKind::ValueGapPair => {
                Err(OperatorError::NotBatchOperator { kind: kind.name() })
            }
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn config(&self) -> &OperatorConfig {
        &self.cfg
    }

    pub fn stats(&self) -> Option<&NormalizationStats> {
        self.stats.as_ref()
    }

    /// Feature-wise application over a batch.
    pub fn apply(&self, x: &FeatureMatrix) -> Result<OperatorOutput, OperatorError> {
        match self.kind {
            OperatorKind::QNorm => {
                let stats = self
                    .stats
                    .as_ref()
                    .expect("qnorm is always fitted with stats");
                qnorm_apply(x, stats, &self.cfg)
            }
            OperatorKind::SoftSort | OperatorKind::Sinkhorn => {
                let mut values = vec![0.0; x.n() * x.d()];
                for j in 0..x.d() {
                    let col = x.column(j);
                    let outputs = match self.kind {
                        OperatorKind::SoftSort => softsort_apply(&col, &self.cfg)?.0,
                        _ => sinkhorn_apply(&col, &self.cfg)?.0,
                    };
                    for i in 0..x.n() {
                        values[i * x.d() + j] = outputs[i];
                    }
                }
                Ok(OperatorOutput::new(x.n(), x.d(), values))
            }
            _ => Err(OperatorError::NotBatchOperator {
                kind: self.kind.name(),
            }),
        }
    }

    /// Pointwise scalar map for feature `j`; only QNorm has one.
    pub fn scalar_map(&self, j: usize) -> Option<impl Fn(f64) -> f64 + '_> {
        match (&self.kind, &self.stats) {
            (OperatorKind::QNorm, Some(stats)) => {
                let eps = self.cfg.epsilon_out;
                Some(move |x: f64| qnorm_scalar(x, stats, j, eps))
            }
            _ => None,
        }
    }
}
