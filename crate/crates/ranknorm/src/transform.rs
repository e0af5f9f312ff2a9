//! Catalog of strictly increasing scalar transforms.
//!
//! These model monotone distribution shifts: every transform preserves the
//! ordering of feature values while distorting magnitudes and gaps, which is
//! exactly the regime the admissibility audit probes.

use crate::matrix::{FeatureMatrix, MatrixError};
use thiserror::Error;

/// Default scale factor for [`MonotoneTransform::Scale`].
pub const DEFAULT_SCALE: f64 = 2.5;
/// Default offset for [`MonotoneTransform::Shift`].
pub const DEFAULT_SHIFT: f64 = 3.0;
/// Default steepness for [`MonotoneTransform::Warp`].
pub const DEFAULT_WARP: f64 = 2.5;

/// Exponent magnitude beyond which `exp` is rejected rather than clamped.
pub const EXP_GUARD: f64 = 700.0;

#[derive(Debug, Error, PartialEq)]
pub enum TransformError {
    #[error("transform {name} overflows at input {input}")]
    Overflow { name: &'static str, input: f64 },
    #[error("transform {name} requires a positive parameter, got {param}")]
    InvalidParameter { name: &'static str, param: f64 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A strictly increasing map on the reals.
///
/// `Scale` and `Warp` parameters must be positive or the map stops being
/// increasing; `apply` rejects such parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonotoneTransform {
    Identity,
    /// sign(x) * ln(1 + |x|)
    LogSigned,
    /// sign(x) * sqrt(|x| + 1e-6)
    SqrtSigned,
    /// exp(0.1 * x)
    Exp01,
    /// c * x with c > 0
    Scale(f64),
    /// x + c
    Shift(f64),
    /// tanh(k * x) with k > 0
    Warp(f64),
}

impl MonotoneTransform {
    pub fn name(&self) -> &'static str {
        match self {
            MonotoneTransform::Identity => "identity",
            MonotoneTransform::LogSigned => "log",
            MonotoneTransform::SqrtSigned => "sqrt",
            MonotoneTransform::Exp01 => "exp",
            MonotoneTransform::Scale(_) => "scale",
            MonotoneTransform::Shift(_) => "shift",
            MonotoneTransform::Warp(_) => "warp",
        }
    }

    pub fn apply_scalar(&self, x: f64) -> Result<f64, TransformError> {
        match *self {
            MonotoneTransform::Identity => Ok(x),
            MonotoneTransform::LogSigned => Ok(x.signum() * x.abs().ln_1p()),
            MonotoneTransform::SqrtSigned => Ok(x.signum() * (x.abs() + 1e-6).sqrt()),
            MonotoneTransform::Exp01 => {
                let z = 0.1 * x;
                if z.abs() > EXP_GUARD {
                    Err(TransformError::Overflow {
                        name: "exp",
                        input: x,
                    })
                } else {
                    Ok(z.exp())
                }
            }
            MonotoneTransform::Scale(c) => {
                if c <= 0.0 {
                    Err(TransformError::InvalidParameter {
                        name: "scale",
                        param: c,
                    })
                } else {
                    Ok(c * x)
                }
            }
            MonotoneTransform::Shift(c) => Ok(x + c),
            MonotoneTransform::Warp(k) => {
                if k <= 0.0 {
                    Err(TransformError::InvalidParameter {
                        name: "warp",
                        param: k,
                    })
                } else {
                    Ok((k * x).tanh())
                }
            }
        }
    }

    pub fn apply_matrix(&self, x: &FeatureMatrix) -> Result<FeatureMatrix, TransformError> {
        let mut out = Vec::with_capacity(x.n() * x.d());
        for &v in x.data() {
            out.push(self.apply_scalar(v)?);
        }
        Ok(FeatureMatrix::new(x.n(), x.d(), out)?)
    }

    pub fn apply_column(&self, column: &[f64]) -> Result<Vec<f64>, TransformError> {
        column.iter().map(|&v| self.apply_scalar(v)).collect()
    }

    /// Transforms used by the monotone-invariance audit: log, sqrt, exp, scale.
    pub fn invariance_catalog() -> Vec<MonotoneTransform> {
        vec![
            MonotoneTransform::LogSigned,
            MonotoneTransform::SqrtSigned,
            MonotoneTransform::Exp01,
            MonotoneTransform::Scale(DEFAULT_SCALE),
        ]
    }

    /// Distribution shifts for model-level robustness: scale, shift, warp, exp.
    pub fn shift_catalog() -> Vec<MonotoneTransform> {
        vec![
            MonotoneTransform::Scale(DEFAULT_SCALE),
            MonotoneTransform::Shift(DEFAULT_SHIFT),
            MonotoneTransform::Warp(DEFAULT_WARP),
            MonotoneTransform::Exp01,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_scale_match_definitions() {
        let m = FeatureMatrix::from_column(vec![1.0, 2.0]).unwrap();
        let id = MonotoneTransform::Identity.apply_matrix(&m).unwrap();
        assert_eq!(id, m);
        let scaled = MonotoneTransform::Scale(2.5).apply_matrix(&m).unwrap();
        assert_eq!(scaled.column(0), vec![2.5, 5.0]);
    }

    #[test]
    fn warp_fixes_origin() {
        assert_eq!(
            MonotoneTransform::Warp(DEFAULT_WARP).apply_scalar(0.0),
            Ok(0.0)
        );
    }

    #[test]
    fn exp_guard_rejects_overflow() {
        let t = MonotoneTransform::Exp01;
        assert_eq!(t.apply_scalar(7000.0), Ok(700.0f64.exp()));
        let err = t.apply_scalar(7001.0).unwrap_err();
        assert_eq!(
            err,
            TransformError::Overflow {
                name: "exp",
                input: 7001.0
            }
        );
    }

    #[test]
    fn nonpositive_parameters_rejected() {
        assert!(matches!(
            MonotoneTransform::Scale(-1.0).apply_scalar(1.0),
            Err(TransformError::InvalidParameter { name: "scale", .. })
        ));
        assert!(matches!(
            MonotoneTransform::Warp(0.0).apply_scalar(1.0),
            Err(TransformError::InvalidParameter { name: "warp", .. })
        ));
    }

    #[test]
    fn catalog_members_are_strictly_increasing_on_probe_grid() {
        let mut catalog = MonotoneTransform::invariance_catalog();
        catalog.extend(MonotoneTransform::shift_catalog());
        catalog.push(MonotoneTransform::Identity);
        for t in catalog {
            // 1000-point probe grid over [-10, 10]; warp is probed on the
            // range where the tanh increment between adjacent probes still
            // clears one f64 ulp near +-1 (|k*x| <= 16). Past that the curve
            // flattens below float resolution and no implementation can stay
            // strictly increasing.
            let half_span = match t {
                MonotoneTransform::Warp(k) => (16.0 / k).min(10.0),
                _ => 10.0,
            };
            let grid: Vec<f64> = (0..1000)
                .map(|i| -half_span + 2.0 * half_span * i as f64 / 999.0)
                .collect();
            let mut prev = t.apply_scalar(grid[0]).unwrap();
            for &u in &grid[1..] {
                let cur = t.apply_scalar(u).unwrap();
                assert!(
                    cur > prev,
                    "{} is not strictly increasing near {u}",
                    t.name()
                );
                prev = cur;
            }
        }
    }

    #[test]
    fn log_signed_evaluates_definition() {
        let t = MonotoneTransform::LogSigned;
        assert_eq!(t.apply_scalar(0.0), Ok(0.0));
        assert!((t.apply_scalar(1.0).unwrap() - 2.0f64.ln()).abs() < 1e-15);
        assert!((t.apply_scalar(-1.0).unwrap() + 2.0f64.ln()).abs() < 1e-15);
    }
}
