//! Rank representations and per-feature normalization statistics.
//!
//! The exact representation maps each feature column to midrank positions
//! normalized into [0, 1]; it is invariant under strictly increasing
//! transforms by construction. The relaxed representation is the continuous
//! surrogate `logistic((x - mu) / sigma)`, which preserves coordinate order
//! but not exact rank values.

use crate::matrix::FeatureMatrix;
use thiserror::Error;

/// Additive floor applied to every fitted standard deviation.
pub const SIGMA_FLOOR: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum RankError {
    #[error("statistics were fitted for {expected} features but input has {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Numerically stable logistic function `1 / (1 + exp(-z))`.
#[inline]
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Per-feature location/scale frozen at fit time.
///
/// `sigma` is the population standard deviation plus [`SIGMA_FLOOR`], so it
/// is strictly positive even on constant columns. Once fitted, the values
/// are immutable: batch independence of the normalization hinges on never
/// refitting per batch.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationStats {
    mu: Vec<f64>,
    sigma: Vec<f64>,
}

impl NormalizationStats {
    pub fn d(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Standardized coordinate `(x - mu[j]) / sigma[j]`.
    #[inline]
    pub fn zscore(&self, x: f64, j: usize) -> f64 {
        (x - self.mu[j]) / self.sigma[j]
    }

    pub fn check_dim(&self, d: usize) -> Result<(), RankError> {
        if self.d() == d {
            Ok(())
        } else {
            Err(RankError::DimensionMismatch {
                expected: self.d(),
                got: d,
            })
        }
    }

    #[cfg(test)]
    pub(crate) fn test_fixture(mu: Vec<f64>, sigma: Vec<f64>) -> Self {
        NormalizationStats { mu, sigma }
    }
}

/// Fit per-feature mean and floored population standard deviation.
pub fn fit_stats(x: &FeatureMatrix) -> NormalizationStats {
    let n = x.n() as f64;
    let mut mu = Vec::with_capacity(x.d());
    let mut sigma = Vec::with_capacity(x.d());
    for j in 0..x.d() {
        let col = x.column(j);
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        mu.push(mean);
        sigma.push(var.sqrt() + SIGMA_FLOOR);
    }
    NormalizationStats { mu, sigma }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankKind {
    /// Midrank positions normalized to [0, 1]; exactly monotone-invariant.
    Exact,
    /// Logistic of the standardized value; order-preserving surrogate.
    Relaxed,
}

/// `n x d` matrix of rank values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct RankRepresentation {
    n: usize,
    d: usize,
    values: Vec<f64>,
    kind: RankKind,
}

impl RankRepresentation {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> RankKind {
        self.kind
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

/// 1-based midranks of a slice: ties share the average of their positions.
pub(crate) fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    // Finite by construction everywhere this is called.
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end averaged over the tie group
        let midrank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = midrank;
        }
        start = end;
    }
    ranks
}

/// Exact feature-wise empirical ranks, normalized as `(rank - 1) / (n - 1)`.
///
/// Ties take midranks; a single-sample column maps to 0.5.
pub fn empirical_rank(x: &FeatureMatrix) -> RankRepresentation {
    let n = x.n();
    let d = x.d();
    let mut values = vec![0.0; n * d];
    for j in 0..d {
        let col = x.column(j);
        if n == 1 {
            values[j] = 0.5;
            continue;
        }
        let ranks = midranks(&col);
        let denom = (n - 1) as f64;
        for i in 0..n {
            values[i * d + j] = (ranks[i] - 1.0) / denom;
        }
    }
    RankRepresentation {
        n,
        d,
        values,
        kind: RankKind::Exact,
    }
}

/// Relaxed rank surrogate `logistic((x - mu) / sigma)`, entries in (0, 1).
pub fn relaxed_rank(
    x: &FeatureMatrix,
    stats: &NormalizationStats,
) -> Result<RankRepresentation, RankError> {
    stats.check_dim(x.d())?;
    let mut values = Vec::with_capacity(x.n() * x.d());
    for i in 0..x.n() {
        for j in 0..x.d() {
            values.push(logistic(stats.zscore(x.get(i, j), j)));
        }
    }
    Ok(RankRepresentation {
        n: x.n(),
        d: x.d(),
        values,
        kind: RankKind::Relaxed,
    })
}
