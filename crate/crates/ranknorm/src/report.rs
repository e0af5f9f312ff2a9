//! Canonical experiment reports.
//!
//! A report is a pure value: schema version, RNG algorithm, the fully
//! resolved configuration, metric rows, and verdicts. Serialization is
//! key-sorted and numbers carry 17 significant digits, so identical runs
//! emit byte-identical files.

use crate::csvio::fmt_g17;
use crate::metrics::MetricValue;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";
/// File name of the hierarchical key-value report.
pub const REPORT_FILE: &str = "report.txt";
/// File name of the flat metric table.
pub const METRICS_FILE: &str = "metrics.csv";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Unwritable {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One row of the flat metric table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub experiment: String,
    pub operator: String,
    pub transform: String,
    pub metric: String,
    /// `None` serializes as null (report) / empty field (CSV).
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub config: BTreeMap<String, String>,
    pub verdicts: BTreeMap<String, String>,
    rows: Vec<MetricRow>,
}

impl ExperimentReport {
    pub fn new() -> Self {
        ExperimentReport::default()
    }

    pub fn set_config(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.config.insert(key.into(), value.into());
    }

    pub fn set_verdict(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.verdicts.insert(key.into(), value.into());
    }

    pub fn push_row(
        &mut self,
        experiment: impl Into<String>,
        operator: impl Into<String>,
        transform: impl Into<String>,
        metric: impl Into<String>,
        value: Option<f64>,
    ) {
        self.rows.push(MetricRow {
            experiment: experiment.into(),
            operator: operator.into(),
            transform: transform.into(),
            metric: metric.into(),
            value,
        });
    }

    /// Absorb a tagged metric; missing tags become "none".
    pub fn push_metric(&mut self, experiment: &str, metric: &MetricValue) {
        let tag = |key: &str| {
            metric
                .context
                .get(key)
                .cloned()
                .unwrap_or_else(|| "none".to_string())
        };
        self.push_row(
            experiment,
            tag("operator"),
            tag("transform"),
            metric.name.clone(),
            metric.value,
        );
    }

    pub fn rows(&self) -> &[MetricRow] {
        &self.rows
    }

    fn sorted_rows(&self) -> Vec<&MetricRow> {
        let mut rows: Vec<&MetricRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| {
            (&a.experiment, &a.operator, &a.transform, &a.metric).cmp(&(
                &b.experiment,
                &b.operator,
                &b.transform,
                &b.metric,
            ))
        });
        rows
    }

    /// Hierarchical key-value rendering, keys sorted bytewise.
    pub fn render_text(&self) -> String {
        let mut lines = Vec::new();
        lines.push(format!(
            "meta.rng_algorithm = {}",
            crate::rng::RNG_ALGORITHM
        ));
        lines.push(format!("meta.schema_version = {SCHEMA_VERSION}"));
        for (key, value) in &self.config {
            lines.push(format!("config.{key} = {value}"));
        }
        for row in self.sorted_rows() {
            let value = row.value.map_or_else(|| "null".to_string(), fmt_g17);
            lines.push(format!(
                "row.{}.{}.{}.{} = {}",
                row.experiment, row.operator, row.transform, row.metric, value
            ));
        }
        for (key, value) in &self.verdicts {
            lines.push(format!("verdict.{key} = {value}"));
        }
        lines.sort();
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    /// Flat CSV rendering with the fixed column set.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("experiment,operator,transform,metric,value\n");
        for row in self.sorted_rows() {
            let value = row.value.map(fmt_g17).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.experiment, row.operator, row.transform, row.metric, value
            ));
        }
        out
    }

    /// Write both files into `out_dir`, creating it if needed.
    pub fn emit(&self, out_dir: &Path) -> Result<(PathBuf, PathBuf), ReportError> {
        fs::create_dir_all(out_dir).map_err(|source| ReportError::Unwritable {
            path: out_dir.display().to_string(),
            source,
        })?;
        let report_path = out_dir.join(REPORT_FILE);
        fs::write(&report_path, self.render_text()).map_err(|source| ReportError::Unwritable {
            path: report_path.display().to_string(),
            source,
        })?;
        let csv_path = out_dir.join(METRICS_FILE);
        fs::write(&csv_path, self.render_csv()).map_err(|source| ReportError::Unwritable {
            path: csv_path.display().to_string(),
            source,
        })?;
        Ok((report_path, csv_path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> ExperimentReport {
        let mut report = ExperimentReport::new();
        report.set_config("seed", "0");
        report.set_config("tau", fmt_g17(0.1));
        report.set_verdict("c1", "pass");
        report.push_row("c1", "qnorm", "exp", "spearman", Some(1.0));
        report.push_row("c1", "qnorm", "log", "spearman", Some(1.0));
        report.push_row("c2", "softsort", "none", "variance", Some(0.0172));
        report.push_row("robustness", "qnorm", "warp", "ndcg", None);
        report
    }

    #[test]
    fn render_is_sorted_and_stable() {
        let a = sample_report().render_text();
        let b = sample_report().render_text();
        assert_eq!(a, b);
        let lines: Vec<&str> = a.lines().collect();
        let mut sorted = lines.clone();
        sorted.sort_unstable();
        assert_eq!(lines, sorted);
        assert!(a.contains("meta.rng_algorithm = splitmix64+polar"));
        assert!(a.contains("row.robustness.qnorm.warp.ndcg = null"));
    }

    #[test]
    fn csv_has_fixed_columns_and_empty_nulls() {
        let csv = sample_report().render_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "experiment,operator,transform,metric,value"
        );
        assert!(csv.contains("robustness,qnorm,warp,ndcg,\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn emit_writes_byte_identical_files() {
        let dir = std::env::temp_dir().join("ranknorm-report-tests");
        let (r1, c1) = sample_report().emit(&dir.join("a")).unwrap();
        let (r2, c2) = sample_report().emit(&dir.join("b")).unwrap();
        assert_eq!(fs::read(&r1).unwrap(), fs::read(&r2).unwrap());
        assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());
    }

    #[test]
    fn unwritable_path_reports_error() {
        let report = sample_report();
        let err = report
            .emit(Path::new("/proc/definitely-not-writable/x"))
            .unwrap_err();
        assert!(matches!(err, ReportError::Unwritable { .. }));
    }

    #[test]
    fn metric_value_tags_map_to_columns() {
        let mut report = ExperimentReport::new();
        let m = MetricValue::new("spearman", Some(0.5)).tag("operator", "softsort");
        report.push_metric("c1", &m);
        let row = &report.rows()[0];
        assert_eq!(row.operator, "softsort");
        assert_eq!(row.transform, "none");
    }
}
