use clap::Parser;
use ranknorm_cli::args::{Cli, Command};
use ranknorm_cli::runner::{
    run_comply, run_controls_cmd, run_robustness_cmd, run_stability, run_tabular_cmd, CliError,
    RunOutput, RunStatus,
};
use std::path::PathBuf;
use std::process::ExitCode;

// Exit codes: 0 = ran with all verdicts as expected, 1 = verdict failure or
// suite error, 2 = usage or input-parse error (clap uses 2 on its own).
const EXIT_VERDICT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, out_dir) = dispatch(&cli.command);
    match result {
        Ok(output) => {
            for line in &output.summary {
                println!("{line}");
            }
            match output.report.emit(&out_dir) {
                Ok((report_path, csv_path)) => {
                    println!("report: {}", report_path.display());
                    println!("metrics: {}", csv_path.display());
                }
                Err(err) => {
                    eprintln!("error: {err}");
                    return ExitCode::from(EXIT_VERDICT_FAILURE);
                }
            }
            match output.status {
                RunStatus::Success => ExitCode::SUCCESS,
                RunStatus::VerdictFailure => {
                    eprintln!("error: a verdict deviated from expectation");
                    ExitCode::from(EXIT_VERDICT_FAILURE)
                }
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_parse_error() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_VERDICT_FAILURE)
            }
        }
    }
}

fn dispatch(command: &Command) -> (Result<RunOutput, CliError>, PathBuf) {
    match command {
        Command::Comply(args) => (run_comply(args), args.common.out.clone()),
        Command::Stability(args) => (run_stability(args), args.common.out.clone()),
        Command::Robustness(args) => (run_robustness_cmd(args), args.common.out.clone()),
        Command::Tabular(args) => (run_tabular_cmd(args), args.common.out.clone()),
        Command::Controls(args) => (run_controls_cmd(args), args.common.out.clone()),
    }
}
