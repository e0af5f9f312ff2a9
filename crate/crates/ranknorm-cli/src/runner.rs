//! Subcommand execution: run the experiments, assemble canonical reports,
//! and classify the outcome for the exit code.
//!
//! Exit semantics: a run that completes with every verdict as expected
//! succeeds (finding a baseline inadmissible is the expected outcome, not a
//! failure). A verdict deviating from expectation means the audit itself is
//! broken. Usage and input-parse problems are the caller's to map to the
//! usage exit code.

use crate::args::{
    ComplianceOverrides, ComplyArgs, ControlsArgs, OperatorOverrides, RobustnessArgs,
    StabilityArgs, TabularArgs,
};
use ranknorm::compliance::{
    evaluate_negative_controls, expected_admissible, probe_grid, run_compliance, ComplianceConfig,
    ComplianceError, ComplianceReport,
};
use ranknorm::csvio::{fmt_g17, ingest_csv, CsvError};
use ranknorm::learner::{
    run_robustness, run_tabular_protocol, LearnError, OperatorRobustness, RobustnessConfig,
    TabularConfig,
};
use ranknorm::operators::{OperatorConfig, OperatorKind};
use ranknorm::report::{ExperimentReport, ReportError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Compliance(#[from] ComplianceError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

impl CliError {
    /// True for problems with user-supplied input rather than the suite.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, CliError::Csv(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// Everything ran and every verdict matched expectation.
    Success,
    /// The audit ran but a verdict deviated from expectation.
    VerdictFailure,
}

#[derive(Debug)]
pub struct RunOutput {
    pub report: ExperimentReport,
    pub summary: Vec<String>,
    pub status: RunStatus,
}

/// Config keys echoed by `comply` and `stability`.
pub const COMPLIANCE_CONFIG_KEYS: &[&str] = &[
    "subcommand",
    "operators",
    "seed",
    "tau",
    "sinkhorn_epsilon",
    "sinkhorn_iters",
    "epsilon_out",
    "n_samples",
    "population_size",
    "n_batches",
    "batch_size",
    "eps_perturb",
    "grad_h",
    "probe_lo",
    "probe_hi",
    "probe_points",
];

/// Config keys echoed by `robustness`.
pub const ROBUSTNESS_CONFIG_KEYS: &[&str] = &[
    "subcommand",
    "operators",
    "seed",
    "n",
    "d",
    "test_ratio",
    "hidden",
    "epochs",
    "lr",
    "weight_decay",
    "qnorm_mode",
    "tau",
    "sinkhorn_epsilon",
    "sinkhorn_iters",
    "epsilon_out",
];

/// Config keys echoed by `tabular`.
pub const TABULAR_CONFIG_KEYS: &[&str] = &[
    "subcommand",
    "csv",
    "target",
    "features",
    "seed",
    "test_ratio",
    "hidden",
    "epochs",
    "lr",
    "weight_decay",
    "epsilon_out",
];

/// Config keys echoed by `controls`.
pub const CONTROLS_CONFIG_KEYS: &[&str] = &[
    "subcommand",
    "seed",
    "eps_perturb",
    "near_tie_gap",
    "tau_wide",
    "tau_narrow",
];

fn compliance_config(seed: u64, overrides: &ComplianceOverrides) -> ComplianceConfig {
    ComplianceConfig {
        n_samples: overrides.n_samples,
        population_size: overrides.population_size,
        n_batches: overrides.n_batches,
        batch_size: overrides.batch_size,
        eps_perturb: overrides.eps_perturb,
        grad_h: overrides.grad_h,
        probe_grid: probe_grid_from(overrides),
        seed,
    }
}

fn probe_grid_from(overrides: &ComplianceOverrides) -> Vec<f64> {
    let half = (overrides.probe_hi - overrides.probe_lo) / 2.0;
    let center = (overrides.probe_hi + overrides.probe_lo) / 2.0;
    probe_grid(half, overrides.probe_points)
        .into_iter()
        .map(|x| x + center)
        .collect()
}

fn operator_config(kind: OperatorKind, overrides: &OperatorOverrides) -> OperatorConfig {
    let mut cfg = OperatorConfig::new(kind);
    cfg.tau = overrides.tau;
    cfg.sinkhorn_epsilon = overrides.sinkhorn_eps;
    cfg.sinkhorn_iters = overrides.sinkhorn_iters;
    cfg.epsilon_out = overrides.epsilon_out;
    cfg
}

fn echo_compliance_config(
    report: &mut ExperimentReport,
    subcommand: &str,
    operators: &[OperatorKind],
    seed: u64,
    op: &OperatorOverrides,
    cmp: &ComplianceOverrides,
) {
    let names: Vec<&str> = operators.iter().map(|k| k.name()).collect();
    report.set_config("subcommand", subcommand);
    report.set_config("operators", names.join(","));
    report.set_config("seed", seed.to_string());
    report.set_config("tau", fmt_g17(op.tau));
    report.set_config("sinkhorn_epsilon", fmt_g17(op.sinkhorn_eps));
    report.set_config("sinkhorn_iters", op.sinkhorn_iters.to_string());
    report.set_config("epsilon_out", fmt_g17(op.epsilon_out));
    report.set_config("n_samples", cmp.n_samples.to_string());
    report.set_config("population_size", cmp.population_size.to_string());
    report.set_config("n_batches", cmp.n_batches.to_string());
    report.set_config("batch_size", cmp.batch_size.to_string());
    report.set_config("eps_perturb", fmt_g17(cmp.eps_perturb));
    report.set_config("grad_h", fmt_g17(cmp.grad_h));
    report.set_config("probe_lo", fmt_g17(cmp.probe_lo));
    report.set_config("probe_hi", fmt_g17(cmp.probe_hi));
    report.set_config("probe_points", cmp.probe_points.to_string());
}

fn push_compliance_rows(report: &mut ExperimentReport, audit: &ComplianceReport) {
    let op = audit.operator.name();
    for (transform, rho) in &audit.c1.per_transform {
        report.push_row("c1", op, transform.clone(), "spearman", *rho);
    }
    report.push_row("c2", op, "none", "variance", Some(audit.c2.variance));
    report.push_row("c2", op, "none", "probe_value", Some(audit.c2.probe_value));
    report.push_row(
        "c3",
        op,
        "none",
        "lipschitz_min",
        Some(audit.c3.lipschitz_min),
    );
    report.push_row(
        "c3",
        op,
        "none",
        "lipschitz_max",
        Some(audit.c3.lipschitz_max),
    );
    report.push_row(
        "c3",
        op,
        "none",
        "gradient_min",
        Some(audit.c3.gradient_min),
    );
    report.push_row(
        "c3",
        op,
        "none",
        "gradient_max",
        Some(audit.c3.gradient_max),
    );
    report.push_row("c3", op, "none", "declared_bound", audit.c3.declared_bound);
    if let Some(prop1) = &audit.prop1 {
        report.push_row("prop1", op, "none", "pairs", Some(prop1.pairs as f64));
        report.push_row(
            "prop1",
            op,
            "none",
            "violations",
            Some(prop1.violations as f64),
        );
    }
}

fn audit_verdicts(report: &mut ExperimentReport, audit: &ComplianceReport) -> bool {
    let op = audit.operator.name();
    let expected = expected_admissible(audit.operator);
    let pass_fail = |b: bool| if b { "pass" } else { "fail" };
    report.set_verdict(format!("{op}.c1"), pass_fail(audit.verdicts.c1));
    report.set_verdict(format!("{op}.c2"), pass_fail(audit.verdicts.c2));
    report.set_verdict(format!("{op}.c3"), pass_fail(audit.verdicts.c3));
    report.set_verdict(
        format!("{op}.admissible"),
        if audit.admissible() { "yes" } else { "no" },
    );
    report.set_verdict(
        format!("{op}.expected_admissible"),
        if expected { "yes" } else { "no" },
    );
    let as_expected = audit.admissible() == expected;
    report.set_verdict(
        format!("{op}.audit"),
        if as_expected {
            "as-expected"
        } else {
            "unexpected"
        },
    );
    as_expected
}

fn compliance_summary(audit: &ComplianceReport) -> Vec<String> {
    let op = audit.operator.name();
    let mut lines = Vec::new();
    let rhos: Vec<String> = audit
        .c1
        .per_transform
        .iter()
        .map(|(t, r)| match r {
            Some(v) => format!("{t}={v:.6}"),
            None => format!("{t}=undefined"),
        })
        .collect();
    lines.push(format!(
        "{op} C1 {}: {}",
        if audit.verdicts.c1 { "pass" } else { "fail" },
        rhos.join(" ")
    ));
    lines.push(format!(
        "{op} C2 {}: variance {:e} at probe {:.6}",
        if audit.verdicts.c2 { "pass" } else { "fail" },
        audit.c2.variance,
        audit.c2.probe_value
    ));
    let bound = audit
        .c3
        .declared_bound
        .map_or("none".to_string(), |b| format!("{b:.6}"));
    lines.push(format!(
        "{op} C3 {}: lipschitz [{:.6}, {:.6}] gradient [{:.6}, {:.6}] bound {bound}",
        if audit.verdicts.c3 { "pass" } else { "fail" },
        audit.c3.lipschitz_min,
        audit.c3.lipschitz_max,
        audit.c3.gradient_min,
        audit.c3.gradient_max,
    ));
    if let Some(prop1) = &audit.prop1 {
        lines.push(format!(
            "{op} rank-Lipschitz contraction: {} violations over {} pairs",
            prop1.violations, prop1.pairs
        ));
    }
    lines.push(format!(
        "{op}: {} ({})",
        if audit.admissible() {
            "admissible"
        } else {
            "inadmissible"
        },
        if audit.admissible() == expected_admissible(audit.operator) {
            "as expected"
        } else {
            "UNEXPECTED"
        }
    ));
    lines
}

pub fn run_comply(args: &ComplyArgs) -> Result<RunOutput, CliError> {
    let kind = args.operator.kind();
    let cfg = compliance_config(args.common.seed, &args.compliance);
    let op_cfg = operator_config(kind, &args.operator_overrides);
    let audit = run_compliance(kind, &cfg, &op_cfg)?;

    let mut report = ExperimentReport::new();
    echo_compliance_config(
        &mut report,
        "comply",
        &[kind],
        args.common.seed,
        &args.operator_overrides,
        &args.compliance,
    );
    push_compliance_rows(&mut report, &audit);
    let as_expected = audit_verdicts(&mut report, &audit);
    Ok(RunOutput {
        report,
        summary: compliance_summary(&audit),
        status: if as_expected {
            RunStatus::Success
        } else {
            RunStatus::VerdictFailure
        },
    })
}

pub fn run_stability(args: &StabilityArgs) -> Result<RunOutput, CliError> {
    let kinds = [
        OperatorKind::QNorm,
        OperatorKind::SoftSort,
        OperatorKind::Sinkhorn,
    ];
    let cfg = compliance_config(args.common.seed, &args.compliance);

    let mut report = ExperimentReport::new();
    echo_compliance_config(
        &mut report,
        "stability",
        &kinds,
        args.common.seed,
        &args.operator_overrides,
        &args.compliance,
    );
    let mut summary = Vec::new();
    let mut all_as_expected = true;
    for kind in kinds {
        let op_cfg = operator_config(kind, &args.operator_overrides);
        let audit = run_compliance(kind, &cfg, &op_cfg)?;
        push_compliance_rows(&mut report, &audit);
        all_as_expected &= audit_verdicts(&mut report, &audit);
        summary.extend(compliance_summary(&audit));
    }
    Ok(RunOutput {
        report,
        summary,
        status: if all_as_expected {
            RunStatus::Success
        } else {
            RunStatus::VerdictFailure
        },
    })
}

fn push_robustness_rows(report: &mut ExperimentReport, op: &OperatorRobustness) {
    let name = op.operator.name();
    let mut push_eval = |eval: &ranknorm::learner::TransformEval| {
        report.push_row(
            "robustness",
            name,
            eval.transform.clone(),
            "spearman",
            eval.spearman,
        );
        report.push_row(
            "robustness",
            name,
            eval.transform.clone(),
            "ndcg",
            eval.ndcg,
        );
    };
    push_eval(&op.clean);
    for eval in &op.shifted {
        push_eval(eval);
    }
    report.push_row(
        "robustness",
        name,
        "none",
        "final_train_loss",
        Some(op.final_train_loss),
    );
    report.push_row(
        "robustness",
        name,
        "none",
        "spearman_spread",
        op.spearman_spread(),
    );
    report.push_row(
        "robustness",
        name,
        "none",
        "worst_spearman_drop",
        op.worst_spearman_drop(),
    );
}

pub fn run_robustness_cmd(args: &RobustnessArgs) -> Result<RunOutput, CliError> {
    let operators: Vec<OperatorKind> = if args.operator.is_empty() {
        vec![
            OperatorKind::QNorm,
            OperatorKind::SoftSort,
            OperatorKind::Sinkhorn,
        ]
    } else {
        args.operator.iter().map(|o| o.kind()).collect()
    };
    let mut cfg = RobustnessConfig::with_seed(args.common.seed);
    cfg.n = args.n;
    cfg.d = args.d;
    cfg.test_ratio = args.test_ratio;
    cfg.hidden = args.hidden;
    cfg.train.epochs = args.epochs;
    cfg.train.lr = args.lr;
    cfg.train.weight_decay = args.weight_decay;
    cfg.qnorm_mode = args.qnorm_mode.mode();
    cfg.operators = operators.clone();
    cfg.tau = args.operator_overrides.tau;
    cfg.sinkhorn_epsilon = args.operator_overrides.sinkhorn_eps;
    cfg.sinkhorn_iters = args.operator_overrides.sinkhorn_iters;
    cfg.epsilon_out = args.operator_overrides.epsilon_out;

    let result = run_robustness(&cfg)?;

    let mut report = ExperimentReport::new();
    let names: Vec<&str> = operators.iter().map(|k| k.name()).collect();
    report.set_config("subcommand", "robustness");
    report.set_config("operators", names.join(","));
    report.set_config("seed", args.common.seed.to_string());
    report.set_config("n", args.n.to_string());
    report.set_config("d", args.d.to_string());
    report.set_config("test_ratio", fmt_g17(args.test_ratio));
    report.set_config("hidden", args.hidden.to_string());
    report.set_config("epochs", args.epochs.to_string());
    report.set_config("lr", fmt_g17(args.lr));
    report.set_config("weight_decay", fmt_g17(args.weight_decay));
    report.set_config("qnorm_mode", cfg.qnorm_mode.name());
    report.set_config("tau", fmt_g17(cfg.tau));
    report.set_config("sinkhorn_epsilon", fmt_g17(cfg.sinkhorn_epsilon));
    report.set_config("sinkhorn_iters", cfg.sinkhorn_iters.to_string());
    report.set_config("epsilon_out", fmt_g17(cfg.epsilon_out));

    let mut summary = Vec::new();
    let mut status = RunStatus::Success;
    for op in &result.per_operator {
        push_robustness_rows(&mut report, op);
        let spearmen: Vec<String> = op
            .spearman_values()
            .iter()
            .map(|(t, r)| match r {
                Some(v) => format!("{t}={v:.4}"),
                None => format!("{t}=undefined"),
            })
            .collect();
        summary.push(format!(
            "{} spearman: {}",
            op.operator.name(),
            spearmen.join(" ")
        ));

        if op.operator == OperatorKind::QNorm {
            let exact = op
                .shifted
                .iter()
                .all(|e| e.predictions == op.clean.predictions);
            report.set_verdict(
                "qnorm.exact_order_invariance",
                if exact { "pass" } else { "fail" },
            );
            // Only the rank layer promises bitwise order invariance; the
            // relaxed modes preserve per-feature order but not values.
            let promised = cfg.qnorm_mode == ranknorm::learner::QNormMode::RankLayer;
            summary.push(format!(
                "qnorm exact prediction-order invariance: {}{}",
                if exact { "pass" } else { "fail" },
                if promised {
                    ""
                } else {
                    " (informational under relaxed modes)"
                }
            ));
            if promised && !exact {
                status = RunStatus::VerdictFailure;
            }
        }
    }
    Ok(RunOutput {
        report,
        summary,
        status,
    })
}

pub fn run_tabular_cmd(args: &TabularArgs) -> Result<RunOutput, CliError> {
    let data = ingest_csv(&args.csv, &args.target, args.features.as_deref())?;
    let mut cfg = TabularConfig::with_seed(args.common.seed);
    cfg.test_ratio = args.test_ratio;
    cfg.hidden = args.hidden.clone();
    cfg.train.epochs = args.epochs;
    cfg.train.lr = args.lr;
    cfg.train.weight_decay = args.weight_decay;
    cfg.epsilon_out = args.epsilon_out;

    let result = run_tabular_protocol(&data.features, &data.targets, &cfg)?;

    let mut report = ExperimentReport::new();
    let hidden: Vec<String> = args.hidden.iter().map(usize::to_string).collect();
    report.set_config("subcommand", "tabular");
    report.set_config("csv", args.csv.display().to_string());
    report.set_config("target", args.target.clone());
    report.set_config("features", data.feature_names.join(","));
    report.set_config("seed", args.common.seed.to_string());
    report.set_config("test_ratio", fmt_g17(args.test_ratio));
    report.set_config("hidden", hidden.join(","));
    report.set_config("epochs", args.epochs.to_string());
    report.set_config("lr", fmt_g17(args.lr));
    report.set_config("weight_decay", fmt_g17(args.weight_decay));
    report.set_config("epsilon_out", fmt_g17(args.epsilon_out));

    report.push_row(
        "tabular",
        "qnorm",
        "none",
        "n_train",
        Some(result.n_train as f64),
    );
    report.push_row(
        "tabular",
        "qnorm",
        "none",
        "n_test",
        Some(result.n_test as f64),
    );
    report.push_row(
        "tabular",
        "qnorm",
        "none",
        "train_mse",
        Some(result.train_mse),
    );
    report.push_row(
        "tabular",
        "qnorm",
        "none",
        "test_mse",
        Some(result.test_mse),
    );
    report.push_row(
        "tabular",
        "qnorm",
        "none",
        "train_spearman",
        result.train_spearman,
    );
    report.push_row(
        "tabular",
        "qnorm",
        "none",
        "test_spearman",
        result.test_spearman,
    );

    let fmt_opt = |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{x:.4}"));
    let summary = vec![
        format!("split: {} train / {} test", result.n_train, result.n_test),
        format!(
            "mse: train {:.6} test {:.6}",
            result.train_mse, result.test_mse
        ),
        format!(
            "spearman: train {} test {}",
            fmt_opt(result.train_spearman),
            fmt_opt(result.test_spearman)
        ),
    ];
    Ok(RunOutput {
        report,
        summary,
        status: RunStatus::Success,
    })
}

pub fn run_controls_cmd(args: &ControlsArgs) -> Result<RunOutput, CliError> {
    let mut cfg = ComplianceConfig::with_seed(args.common.seed);
    cfg.eps_perturb = args.eps_perturb;
    let controls = evaluate_negative_controls(&cfg)?;

    let mut report = ExperimentReport::new();
    report.set_config("subcommand", "controls");
    report.set_config("seed", args.common.seed.to_string());
    report.set_config("eps_perturb", fmt_g17(args.eps_perturb));
    report.set_config("near_tie_gap", fmt_g17(ranknorm::compliance::NEAR_TIE_GAP));
    report.set_config("tau_wide", fmt_g17(ranknorm::compliance::NEAR_TIE_TAU_WIDE));
    report.set_config(
        "tau_narrow",
        fmt_g17(ranknorm::compliance::NEAR_TIE_TAU_NARROW),
    );

    let mut summary = Vec::new();
    let mut status = RunStatus::Success;
    for outcome in [
        &controls.value_gap,
        &controls.batch_ecdf,
        &controls.near_tie,
    ] {
        report.set_verdict(
            outcome.name,
            if outcome.fired {
                "fired"
            } else {
                "did-not-fire"
            },
        );
        summary.push(format!(
            "control {}: {} ({})",
            outcome.name,
            if outcome.fired {
                "fired"
            } else {
                "DID NOT FIRE"
            },
            outcome.detail
        ));
        if !outcome.fired {
            status = RunStatus::VerdictFailure;
        }
    }
    for (name, value) in controls.measurements() {
        report.push_row("controls", "none", "none", name, Some(value));
    }
    Ok(RunOutput {
        report,
        summary,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{Cli, Command};
    use clap::Parser;

    fn parse(argv: &[&str]) -> Command {
        Cli::parse_from(argv).command
    }

    fn config_keys(report: &ExperimentReport) -> Vec<String> {
        report.config.keys().cloned().collect()
    }

    fn assert_schema(actual: Vec<String>, schema: &[&str]) {
        let mut expected: Vec<String> = schema.iter().map(|s| s.to_string()).collect();
        expected.sort();
        assert_eq!(actual, expected);
    }

    #[test]
    fn comply_echoes_exactly_the_schema() {
        let Command::Comply(args) = parse(&[
            "ranknorm",
            "comply",
            "--operator",
            "qnorm",
            "--n-samples",
            "64",
            "--population-size",
            "256",
            "--n-batches",
            "4",
            "--batch-size",
            "16",
            "--probe-points",
            "8",
        ]) else {
            panic!("wrong subcommand")
        };
        let out = run_comply(&args).unwrap();
        assert_schema(config_keys(&out.report), COMPLIANCE_CONFIG_KEYS);
        assert_eq!(out.status, RunStatus::Success);
    }

    #[test]
    fn stability_echoes_exactly_the_schema() {
        let Command::Stability(args) = parse(&[
            "ranknorm",
            "stability",
            "--n-samples",
            "64",
            "--population-size",
            "256",
            "--n-batches",
            "4",
            "--batch-size",
            "16",
            "--probe-points",
            "8",
        ]) else {
            panic!("wrong subcommand")
        };
        let out = run_stability(&args).unwrap();
        assert_schema(config_keys(&out.report), COMPLIANCE_CONFIG_KEYS);
        assert_eq!(out.status, RunStatus::Success);
    }

    #[test]
    fn robustness_echoes_exactly_the_schema() {
        let Command::Robustness(args) = parse(&[
            "ranknorm",
            "robustness",
            "--n",
            "80",
            "--epochs",
            "3",
            "--operator",
            "qnorm",
        ]) else {
            panic!("wrong subcommand")
        };
        let out = run_robustness_cmd(&args).unwrap();
        assert_schema(config_keys(&out.report), ROBUSTNESS_CONFIG_KEYS);
        assert_eq!(out.status, RunStatus::Success);
    }

    #[test]
    fn tabular_echoes_exactly_the_schema() {
        let dir = std::env::temp_dir().join("ranknorm-cli-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let csv = dir.join("schema.csv");
        let task = ranknorm::learner::gen_synthetic_task(40, 3, 1);
        ranknorm::csvio::write_task_csv(&csv, &task.x, &task.y).unwrap();
        let csv_str = csv.display().to_string();
        let Command::Tabular(args) = parse(&[
            "ranknorm", "tabular", "--csv", &csv_str, "--target", "y", "--epochs", "3", "--hidden",
            "8,4",
        ]) else {
            panic!("wrong subcommand")
        };
        let out = run_tabular_cmd(&args).unwrap();
        assert_schema(config_keys(&out.report), TABULAR_CONFIG_KEYS);
    }

    #[test]
    fn controls_echo_and_fire() {
        let Command::Controls(args) = parse(&["ranknorm", "controls"]) else {
            panic!("wrong subcommand")
        };
        let out = run_controls_cmd(&args).unwrap();
        assert_schema(config_keys(&out.report), CONTROLS_CONFIG_KEYS);
        assert_eq!(out.status, RunStatus::Success);
    }

    #[test]
    fn baseline_comply_is_inadmissible_but_expected() {
        let Command::Comply(args) = parse(&[
            "ranknorm",
            "comply",
            "--operator",
            "softsort",
            "--n-samples",
            "64",
            "--population-size",
            "256",
            "--n-batches",
            "4",
            "--batch-size",
            "16",
            "--probe-points",
            "8",
        ]) else {
            panic!("wrong subcommand")
        };
        let out = run_comply(&args).unwrap();
        assert_eq!(out.status, RunStatus::Success);
        assert_eq!(
            out.report.verdicts.get("softsort.admissible").unwrap(),
            "no"
        );
        assert_eq!(
            out.report.verdicts.get("softsort.audit").unwrap(),
            "as-expected"
        );
    }
}
