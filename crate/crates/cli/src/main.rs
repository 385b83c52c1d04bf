use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lebesgue_cli::error::{CliError, CliResult};
use lebesgue_cli::report::Report;
use lebesgue_cli::schema::ToleranceOverrides;
use lebesgue_cli::{default_fixture_path, read_input, run_problem, run_selftest, Action};
use lebesgue_core::Method;

#[derive(Debug, Parser)]
#[command(name = "lebesgue", version, about = "Parallel sums and Lebesgue decompositions of PSD matrices, forms and functionals")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Relative rank cutoff.
    #[arg(long, global = true, value_name = "X")]
    tol_rank: Option<f64>,

    /// Stopping tolerance of the iterative methods.
    #[arg(long, global = true, value_name = "X")]
    iter_tol: Option<f64>,

    /// Iteration cap of the fixed-point method.
    #[arg(long, global = true, value_name = "N")]
    max_iter: Option<usize>,

    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Print the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parallel sum of the pair.
    Psum {
        /// Problem file, or `-` for standard input.
        input: PathBuf,
    },
    /// Lebesgue decomposition of the second member with respect to the first.
    Decompose {
        input: PathBuf,
        #[arg(long, default_value = "direct", value_parser = parse_method)]
        method: Method,
        /// Also run all three methods and report their pairwise discrepancies.
        #[arg(long)]
        cross_check: bool,
    },
    /// Absolute-continuity and singularity predicates with their residuals.
    Check { input: PathBuf },
    /// Run the bundled fixture suite.
    Selftest {
        #[arg(long, value_name = "PATH")]
        fixtures: Option<PathBuf>,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn emit(report: &Report, cli: &Cli) -> CliResult<()> {
    if let Some(path) = &cli.output {
        std::fs::write(path, report.to_json_string() + "\n")
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    }
    if cli.json {
        println!("{}", report.to_json_string());
    } else {
        print!("{}", report.to_text());
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<ExitCode> {
    let flags = ToleranceOverrides {
        rank_rtol: cli.tol_rank,
        iter_tol: cli.iter_tol,
        max_iter: cli.max_iter,
        ..ToleranceOverrides::default()
    };
    let (input, action) = match &cli.command {
        Command::Selftest { fixtures } => {
            let path = fixtures.clone().unwrap_or_else(default_fixture_path);
            let report = run_selftest(&path, &flags)?;
            emit(&report, cli)?;
            let failed = report
                .result
                .as_ref()
                .and_then(|r| r["failed"].as_u64())
                .unwrap_or(0);
            if failed > 0 {
                for f in report.result.as_ref().and_then(|r| r["failures"].as_array()).into_iter().flatten() {
                    eprintln!("FAIL {}: {}", f["name"].as_str().unwrap_or("?"), f["reason"].as_str().unwrap_or(""));
                }
                return Ok(ExitCode::from(1));
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::Psum { input } => (input, Action::Psum),
        Command::Decompose {
            input,
            method,
            cross_check,
        } => (
            input,
            Action::Decompose {
                method: *method,
                cross_check: *cross_check,
            },
        ),
        Command::Check { input } => (input, Action::Check),
    };
    let bytes = read_input(input)?;
    let report = run_problem(&bytes, &action, &flags)?;
    emit(&report, cli)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = CliError::input(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
