//! Evaluation quantities: Spearman correlation, NDCG, finite-difference
//! sensitivity probes, operator shift, and output variance.
//!
//! Metrics that are mathematically undefined on their input (constant vector
//! for Spearman, all-zero relevance for NDCG) return `Ok(None)` rather than
//! NaN; reports serialize that as null.

use crate::rank::midranks;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("inputs have different lengths {a} and {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("need at least {need} values, got {got}")]
    TooFewValues { need: usize, got: usize },
    #[error("k = {k} is out of range 1..={n}")]
    InvalidK { k: usize, n: usize },
    #[error("negative relevance {value} at index {index}")]
    NegativeRelevance { index: usize, value: f64 },
    #[error("step must be {requirement}, got {got}")]
    InvalidStep { requirement: &'static str, got: f64 },
    #[error("map produced a non-finite value at probe {x}")]
    NonFiniteMap { x: f64 },
}

/// One named measurement plus context tags (operator, transform, probe...).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub name: String,
    /// `None` encodes a mathematically undefined result.
    pub value: Option<f64>,
    pub context: BTreeMap<String, String>,
}

impl MetricValue {
    pub fn new(name: impl Into<String>, value: Option<f64>) -> Self {
        MetricValue {
            name: name.into(),
            value,
            context: BTreeMap::new(),
        }
    }

    pub fn tag(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.context.insert(key.into(), value.into());
        self
    }
}

/// Tie-aware Spearman rank correlation: Pearson correlation of midranks.
///
/// Returns `Ok(None)` when either side is constant (the coefficient is
/// undefined there). With no ties this equals `1 - 6*sum(d^2)/(n(n^2-1))`.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<Option<f64>, MetricError> {
    if a.len() != b.len() {
        return Err(MetricError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(MetricError::TooFewValues {
            need: 2,
            got: a.len(),
        });
    }
    let ra = midranks(a);
    let rb = midranks(b);
    let mean = (a.len() + 1) as f64 / 2.0; // midranks always average to (n+1)/2
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for i in 0..a.len() {
        let da = ra[i] - mean;
        let db = rb[i] - mean;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Ok(None);
    }
    Ok(Some(cov / (var_a * var_b).sqrt()))
}

/// NDCG at `k` with graded relevance.
///
/// Items are ranked by descending predicted score, ties broken by original
/// index so results are deterministic. `Ok(None)` when every relevance is
/// zero (the ideal DCG vanishes).
pub fn ndcg(pred_scores: &[f64], relevance: &[f64], k: usize) -> Result<Option<f64>, MetricError> {
    let n = pred_scores.len();
    if relevance.len() != n {
        return Err(MetricError::LengthMismatch {
            a: n,
            b: relevance.len(),
        });
    }
    if k == 0 || k > n {
        return Err(MetricError::InvalidK { k, n });
    }
    for (index, &value) in relevance.iter().enumerate() {
        if value < 0.0 || value.is_nan() {
            return Err(MetricError::NegativeRelevance { index, value });
        }
    }
    if relevance.iter().all(|&r| r == 0.0) {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        pred_scores[j]
            .partial_cmp(&pred_scores[i])
            .unwrap()
            .then(i.cmp(&j))
    });
    let dcg: f64 = order[..k]
        .iter()
        .enumerate()
        .map(|(pos, &idx)| relevance[idx] / ((pos + 2) as f64).log2())
        .sum();
    let mut ideal = relevance.to_vec();
    ideal.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let idcg: f64 = ideal[..k]
        .iter()
        .enumerate()
        .map(|(pos, rel)| rel / ((pos + 2) as f64).log2())
        .sum();
    Ok(Some(dcg / idcg))
}

/// Forward-difference sensitivity `|f(x + eps) - f(x)| / |eps|`.
pub fn lipschitz_ratio(f: impl Fn(f64) -> f64, x: f64, eps: f64) -> Result<f64, MetricError> {
    if eps == 0.0 {
        return Err(MetricError::InvalidStep {
            requirement: "nonzero",
            got: eps,
        });
    }
    let fx = f(x);
    let fxe = f(x + eps);
    if !fx.is_finite() || !fxe.is_finite() {
        return Err(MetricError::NonFiniteMap { x });
    }
    Ok((fxe - fx).abs() / eps.abs())
}

/// Central-difference derivative estimate `(f(x + h) - f(x - h)) / (2h)`.
pub fn central_gradient(f: impl Fn(f64) -> f64, x: f64, h: f64) -> Result<f64, MetricError> {
    if h <= 0.0 || h.is_nan() {
        return Err(MetricError::InvalidStep {
            requirement: "positive",
            got: h,
        });
    }
    let hi = f(x + h);
    let lo = f(x - h);
    if !hi.is_finite() || !lo.is_finite() {
        return Err(MetricError::NonFiniteMap { x });
    }
    Ok((hi - lo) / (2.0 * h))
}

/// Mean squared difference between shifted and clean outputs.
pub fn operator_shift(shifted: &[f64], clean: &[f64]) -> Result<f64, MetricError> {
    if shifted.len() != clean.len() {
        return Err(MetricError::LengthMismatch {
            a: shifted.len(),
            b: clean.len(),
        });
    }
    if shifted.is_empty() {
        return Err(MetricError::TooFewValues { need: 1, got: 0 });
    }
    let n = shifted.len() as f64;
    Ok(shifted
        .iter()
        .zip(clean)
        .map(|(s, c)| (s - c) * (s - c))
        .sum::<f64>()
        / n)
}

/// Population variance of a sample.
///
/// A bitwise-constant sample has variance exactly 0; the early return keeps
/// summation roundoff from smearing that into ~1e-30, which matters when a
/// variance of zero is itself the claim under test.
pub fn output_variance(values: &[f64]) -> Result<f64, MetricError> {
    if values.is_empty() {
        return Err(MetricError::TooFewValues { need: 1, got: 0 });
    }
    if values.iter().all(|v| v.to_bits() == values[0].to_bits()) {
        return Ok(0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    Ok(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_identity_and_reversal() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(spearman(&a, &a).unwrap(), Some(1.0));
        assert_eq!(spearman(&a, &[3.0, 2.0, 1.0]).unwrap(), Some(-1.0));
    }

    #[test]
    fn spearman_single_swap_no_ties() {
        // 1 - 6*2/(3*8) = 0.5
        let rho = spearman(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0])
            .unwrap()
            .unwrap();
        assert!((rho - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spearman_constant_input_is_undefined() {
        assert_eq!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap(), None);
    }

    #[test]
    fn spearman_errors() {
        assert_eq!(
            spearman(&[1.0], &[1.0]).unwrap_err(),
            MetricError::TooFewValues { need: 2, got: 1 }
        );
        assert_eq!(
            spearman(&[1.0, 2.0], &[1.0]).unwrap_err(),
            MetricError::LengthMismatch { a: 2, b: 1 }
        );
    }

    #[test]
    fn spearman_with_ties_uses_midranks() {
        // ranks of a = (1.5, 1.5, 3); perfectly aligned with b's midranks
        let rho = spearman(&[1.0, 1.0, 2.0], &[5.0, 5.0, 9.0])
            .unwrap()
            .unwrap();
        assert!((rho - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ndcg_perfect_order_is_one() {
        let rho = ndcg(&[0.9, 0.5, 0.1], &[3.0, 2.0, 1.0], 3)
            .unwrap()
            .unwrap();
        assert!((rho - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ndcg_two_item_reversal_hand_value() {
        // reversed pair: DCG = 1/log2(3), IDCG = 1
        let v = ndcg(&[0.1, 0.9], &[1.0, 0.0], 2).unwrap().unwrap();
        assert!((v - 1.0 / 3.0f64.log2()).abs() < 1e-12);
        assert!((v - 0.6309).abs() < 1e-4);
    }

    #[test]
    fn ndcg_top1_with_best_item_first() {
        let v = ndcg(&[0.9, 0.1, 0.5], &[2.0, 0.0, 1.0], 1)
            .unwrap()
            .unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn ndcg_all_zero_relevance_undefined() {
        assert_eq!(ndcg(&[0.1, 0.9], &[0.0, 0.0], 2).unwrap(), None);
    }

    #[test]
    fn ndcg_tie_break_is_stable_by_index() {
        // equal scores: index order decides, so relevance [0, 1] scores worse
        // than relevance [1, 0] under identical predictions
        let worse = ndcg(&[0.5, 0.5], &[0.0, 1.0], 2).unwrap().unwrap();
        let better = ndcg(&[0.5, 0.5], &[1.0, 0.0], 2).unwrap().unwrap();
        assert!(worse < better);
        assert_eq!(better, 1.0);
    }

    #[test]
    fn ndcg_argument_errors() {
        assert!(matches!(
            ndcg(&[0.1], &[1.0], 2).unwrap_err(),
            MetricError::InvalidK { k: 2, n: 1 }
        ));
        assert!(matches!(
            ndcg(&[0.1, 0.2], &[1.0, -1.0], 2).unwrap_err(),
            MetricError::NegativeRelevance { index: 1, .. }
        ));
    }

    #[test]
    fn lipschitz_ratio_basic_maps() {
        assert_eq!(lipschitz_ratio(|_| 3.0, 0.2, 1e-3).unwrap(), 0.0);
        assert!((lipschitz_ratio(|x| x, 0.2, 1e-3).unwrap() - 1.0).abs() < 1e-9);
        assert!(matches!(
            lipschitz_ratio(|x| x, 0.2, 0.0).unwrap_err(),
            MetricError::InvalidStep { .. }
        ));
        assert!(matches!(
            lipschitz_ratio(|_| f64::NAN, 0.2, 1e-3).unwrap_err(),
            MetricError::NonFiniteMap { .. }
        ));
    }

    #[test]
    fn central_gradient_exact_for_quadratics() {
        let g = central_gradient(|x| x * x, 1.0, 1e-3).unwrap();
        assert!((g - 2.0).abs() < 1e-9);
        assert_eq!(central_gradient(|_| 7.0, 1.0, 1e-3).unwrap(), 0.0);
        for x in [-10.0, -1.5, 0.0, 2.5, 10.0] {
            let g = central_gradient(|t| 3.0 * t * t - 2.0 * t + 1.0, x, 1e-3).unwrap();
            assert!((g - (6.0 * x - 2.0)).abs() < 1e-9, "at {x}: {g}");
        }
    }

    #[test]
    fn operator_shift_hand_values() {
        assert_eq!(operator_shift(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(operator_shift(&[1.0, 1.0], &[0.0, 0.0]).unwrap(), 1.0);
        // (1 + 1)/2
        assert_eq!(operator_shift(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!(matches!(
            operator_shift(&[1.0], &[1.0, 2.0]).unwrap_err(),
            MetricError::LengthMismatch { .. }
        ));
    }

    #[test]
    fn output_variance_hand_values() {
        assert_eq!(output_variance(&[3.0, 3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(output_variance(&[0.0, 1.0]).unwrap(), 0.25);
        assert_eq!(output_variance(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 1.25);
    }

    #[test]
    fn metric_value_carries_tags() {
        let m = MetricValue::new("spearman", Some(0.5))
            .tag("operator", "qnorm")
            .tag("transform", "exp");
        assert_eq!(m.context.get("operator").unwrap(), "qnorm");
        assert_eq!(m.value, Some(0.5));
    }
}
