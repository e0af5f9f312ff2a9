//! Plain numeric CSV ingestion and emission.
//!
//! The parser handles the format the experiments need: UTF-8, one header
//! row, comma-separated numeric cells, no quoting or escapes. Numbers are
//! written with 17 significant digits so a write/read round trip is exact.

use crate::matrix::{FeatureMatrix, MatrixError};
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} is empty")]
    EmptyFile { path: String },
    #[error("{path} has a header but no data rows")]
    NoRows { path: String },
    #[error("missing column '{column}' in header [{header}]")]
    MissingColumn { column: String, header: String },
    #[error("row {row} has {got} cells, header has {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("cell '{cell}' in row {row}, column '{column}' is not numeric")]
    NonNumericCell {
        row: usize,
        column: String,
        cell: String,
    },
    #[error("no feature columns remain after removing the target")]
    NoFeatures,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Number formatting with 17 significant digits, enough for f64 round trip.
pub fn fmt_g17(value: f64) -> String {
    format!("{value:.16e}")
}

/// Parsed numeric CSV: features, targets, and the feature column names.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularData {
    pub features: FeatureMatrix,
    pub targets: Vec<f64>,
    pub feature_names: Vec<String>,
}

/// Read a numeric CSV with a header row.
///
/// `target` selects the label column; features default to every other
/// column unless `feature_columns` names an explicit subset. Parse errors
/// report the 1-based file row and the column name.
pub fn ingest_csv(
    path: &Path,
    target: &str,
    feature_columns: Option<&[String]>,
) -> Result<TabularData, CsvError> {
    let text = fs::read_to_string(path).map_err(|source| CsvError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut lines = text.lines().enumerate();
    let (_, header_line) = lines.next().ok_or_else(|| CsvError::EmptyFile {
        path: path.display().to_string(),
    })?;
    let header: Vec<String> = header_line
        .split(',')
        .map(|h| h.trim().to_string())
        .collect();

    let column_index = |name: &str| -> Result<usize, CsvError> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CsvError::MissingColumn {
                column: name.to_string(),
                header: header.join(","),
            })
    };
    let target_idx = column_index(target)?;
    let feature_idx: Vec<usize> = match feature_columns {
        Some(names) => names
            .iter()
            .map(|n| column_index(n))
            .collect::<Result<Vec<_>, _>>()?,
        None => (0..header.len()).filter(|&i| i != target_idx).collect(),
    };
    if feature_idx.is_empty() {
        return Err(CsvError::NoFeatures);
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut targets = Vec::new();
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row = line_no + 1; // 1-based file row, header is row 1
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(CsvError::RaggedRow {
                row,
                expected: header.len(),
                got: cells.len(),
            });
        }
        let parse = |idx: usize| -> Result<f64, CsvError> {
            cells[idx]
                .parse::<f64>()
                .map_err(|_| CsvError::NonNumericCell {
                    row,
                    column: header[idx].clone(),
                    cell: cells[idx].to_string(),
                })
        };
        targets.push(parse(target_idx)?);
        rows.push(
            feature_idx
                .iter()
                .map(|&i| parse(i))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    if rows.is_empty() {
        return Err(CsvError::NoRows {
            path: path.display().to_string(),
        });
    }
    Ok(TabularData {
        features: FeatureMatrix::from_rows(&rows)?,
        targets,
        feature_names: feature_idx.iter().map(|&i| header[i].clone()).collect(),
    })
}

/// Write features and targets as a CSV with header `x1..xd,y`.
pub fn write_task_csv(
    path: &Path,
    features: &FeatureMatrix,
    targets: &[f64],
) -> Result<(), CsvError> {
    let mut out = String::new();
    for j in 0..features.d() {
        out.push_str(&format!("x{},", j + 1));
    }
    out.push_str("y\n");
    for (i, target) in targets.iter().enumerate() {
        for j in 0..features.d() {
            out.push_str(&fmt_g17(features.get(i, j)));
            out.push(',');
        }
        out.push_str(&fmt_g17(*target));
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| CsvError::Io {
        path: path.display().to_string(),
        source,
    })
}
