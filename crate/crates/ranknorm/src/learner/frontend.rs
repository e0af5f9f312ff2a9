//! Operator front-ends: normalization layers applied feature-wise to a batch
//! before it reaches the model. All front-ends emit values in [0, 1].
//!
//! The QNorm front-end maps each coordinate to its rank representation
//! within the batch column. The soft permutation front-ends feed each column
//! through the operator in ascending value order and restore sample order
//! afterwards, so the grid vector aligns with sorted positions and the
//! outputs are soft ranks; fed in arbitrary row order, the kernel would
//! average meaningless position indices and the features would carry nothing
//! a model could learn. Sorting changes none of the failure modes under
//! audit: the outputs still depend on raw value gaps and the whole batch.

use super::LearnError;
use crate::matrix::FeatureMatrix;
use crate::operators::{qnorm_apply, sinkhorn_apply, softsort_apply, OperatorConfig, OperatorKind};
use crate::rank::{empirical_rank, fit_stats, NormalizationStats};

/// How the QNorm front-end derives its rank representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QNormMode {
    /// Exact empirical ranks within the incoming batch, affinely clamped.
    ///
    /// The rank layer: bitwise invariant under any strictly increasing
    /// feature-wise transform of the batch, so model predictions keep their
    /// order exactly under monotone distribution shift.
    RankLayer,
    /// Relaxed logistic surrogate with statistics refitted on each batch.
    RelaxedRefit,
    /// Relaxed surrogate with statistics frozen at fit time.
    RelaxedFrozen,
}

impl QNormMode {
    pub fn name(&self) -> &'static str {
        match self {
            QNormMode::RankLayer => "rank-layer",
            QNormMode::RelaxedRefit => "relaxed-refit",
            QNormMode::RelaxedFrozen => "relaxed-frozen",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontEndKind {
    QNorm(QNormMode),
    SoftSort,
    Sinkhorn,
}

impl FrontEndKind {
    pub fn operator_kind(&self) -> OperatorKind {
        match self {
            FrontEndKind::QNorm(_) => OperatorKind::QNorm,
            FrontEndKind::SoftSort => OperatorKind::SoftSort,
            FrontEndKind::Sinkhorn => OperatorKind::Sinkhorn,
        }
    }
}

/// A front-end ready to map batches to model inputs.
#[derive(Debug, Clone)]
pub struct FittedFrontEnd {
    kind: FrontEndKind,
    cfg: OperatorConfig,
    frozen_stats: Option<NormalizationStats>,
}

impl FittedFrontEnd {
    /// Configure the front-end; `RelaxedFrozen` fits its statistics on
    /// `reference` (the training inputs), the other kinds carry no state.
    pub fn fit(
        kind: FrontEndKind,
        cfg: OperatorConfig,
        reference: &FeatureMatrix,
    ) -> Result<Self, LearnError> {
        cfg.validate()?;
        let frozen_stats = match kind {
            FrontEndKind::QNorm(QNormMode::RelaxedFrozen) => Some(fit_stats(reference)),
            _ => None,
        };
        Ok(FittedFrontEnd {
            kind,
            cfg,
            frozen_stats,
        })
    }

    pub fn kind(&self) -> FrontEndKind {
        self.kind
    }

    /// Normalize a batch into model inputs in [0, 1].
    ///
    /// The batch itself is the operator context everywhere except the frozen
    /// mode, which reuses its fit-time statistics.
    pub fn apply(&self, batch: &FeatureMatrix) -> Result<FeatureMatrix, LearnError> {
        match self.kind {
            FrontEndKind::QNorm(QNormMode::RankLayer) => {
                let ranks = empirical_rank(batch);
                let eps = self.cfg.epsilon_out;
                let scale = 1.0 - 2.0 * eps;
                let values: Vec<f64> = ranks.values().iter().map(|r| r * scale + eps).collect();
                Ok(FeatureMatrix::new(batch.n(), batch.d(), values)?)
            }
            FrontEndKind::QNorm(QNormMode::RelaxedRefit) => {
                let stats = fit_stats(batch);
                let out = qnorm_apply(batch, &stats, &self.cfg)?;
                Ok(FeatureMatrix::new(
                    batch.n(),
                    batch.d(),
                    out.values().to_vec(),
                )?)
            }
            FrontEndKind::QNorm(QNormMode::RelaxedFrozen) => {
                let stats = self
                    .frozen_stats
                    .as_ref()
                    .expect("frozen mode fitted with stats");
                let out = qnorm_apply(batch, stats, &self.cfg)?;
                Ok(FeatureMatrix::new(
                    batch.n(),
                    batch.d(),
                    out.values().to_vec(),
                )?)
            }
            FrontEndKind::SoftSort | FrontEndKind::Sinkhorn => {
                let mut values = vec![0.0; batch.n() * batch.d()];
                for j in 0..batch.d() {
                    let outputs = self.soft_rank_vector(&batch.column(j))?;
                    for (i, v) in outputs.into_iter().enumerate() {
                        values[i * batch.d() + j] = v;
                    }
                }
                Ok(FeatureMatrix::new(batch.n(), batch.d(), values)?)
            }
        }
    }

    /// Soft ranks of one value vector: the operator runs over the vector in
    /// ascending order (so the grid aligns with sorted positions) and the
    /// outputs are returned in the original coordinate order.
    fn soft_rank_vector(&self, vector: &[f64]) -> Result<Vec<f64>, LearnError> {
        let mut order: Vec<usize> = (0..vector.len()).collect();
        order.sort_by(|&a, &b| vector[a].partial_cmp(&vector[b]).unwrap());
        let sorted: Vec<f64> = order.iter().map(|&i| vector[i]).collect();
        let outputs = match self.kind {
            FrontEndKind::SoftSort => softsort_apply(&sorted, &self.cfg)?.0,
            _ => sinkhorn_apply(&sorted, &self.cfg)?.0,
        };
        let mut unpermuted = vec![0.0; vector.len()];
        for (pos, &idx) in order.iter().enumerate() {
            unpermuted[idx] = outputs[pos];
        }
        Ok(unpermuted)
    }
}
