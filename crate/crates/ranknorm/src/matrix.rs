//! Dense sample-by-feature matrix, the universal input container.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixError {
    #[error("matrix must have at least one row and one column, got {n}x{d}")]
    Empty { n: usize, d: usize },
    #[error("data length {len} does not match shape {n}x{d}")]
    ShapeMismatch { len: usize, n: usize, d: usize },
    #[error("non-finite entry {value} at row {row}, column {col}")]
    NonFinite { row: usize, col: usize, value: f64 },
}

/// `n x d` matrix of finite feature values, row-major.
///
/// Construction rejects empty shapes and any NaN/Inf entry, so downstream
/// code can assume finite inputs throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(n: usize, d: usize, data: Vec<f64>) -> Result<Self, MatrixError> {
        if n == 0 || d == 0 {
            return Err(MatrixError::Empty { n, d });
        }
        if data.len() != n * d {
            return Err(MatrixError::ShapeMismatch {
                len: data.len(),
                n,
                d,
            });
        }
        for (idx, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(MatrixError::NonFinite {
                    row: idx / d,
                    col: idx % d,
                    value: v,
                });
            }
        }
        Ok(FeatureMatrix { n, d, data })
    }

    /// Single-feature matrix from one column of samples.
    pub fn from_column(column: Vec<f64>) -> Result<Self, MatrixError> {
        let n = column.len();
        FeatureMatrix::new(n, 1, column)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * d);
        for row in rows {
            if row.len() != d {
                return Err(MatrixError::ShapeMismatch {
                    len: row.len(),
                    n,
                    d,
                });
            }
            data.extend_from_slice(row);
        }
        FeatureMatrix::new(n, d, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.d + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.d..(row + 1) * self.d]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, col)).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Matrix restricted to the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self, MatrixError> {
        let mut data = Vec::with_capacity(rows.len() * self.d);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix::new(rows.len(), self.d, data)
    }

    /// Element-wise map; the result is revalidated for finiteness.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, MatrixError> {
        let data: Vec<f64> = self.data.iter().map(|&v| f(v)).collect();
        FeatureMatrix::new(self.n, self.d, data)
    }
}
