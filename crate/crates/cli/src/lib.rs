//! JSON front end for `lebesgue-core`: problem files in, reports out.

pub mod commands;
pub mod error;
pub mod report;
pub mod schema;
pub mod selftest;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lebesgue_core::Method;

use crate::error::{CliError, CliResult};
use crate::report::{digest, Report};
use crate::schema::{parse_problem, resolve_tolerances, ToleranceOverrides};

pub fn default_fixture_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join("selftest.json")
}

#[derive(Debug, Clone)]
pub enum Action {
    Psum,
    Decompose { method: Method, cross_check: bool },
    Check,
}

impl Action {
    fn name(&self) -> &'static str {
        match self {
            Action::Psum => "psum",
            Action::Decompose { .. } => "decompose",
            Action::Check => "check",
        }
    }
}

/// Reads a problem file, or standard input for `-`.
pub fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| CliError::input(format!("cannot read standard input: {e}")))?;
        return Ok(buf);
    }
    std::fs::read(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

pub fn run_problem(bytes: &[u8], action: &Action, flags: &ToleranceOverrides) -> CliResult<Report> {
    let start = Instant::now();
    let text = std::str::from_utf8(bytes).map_err(|_| CliError::input("input is not valid UTF-8"))?;
    let file = parse_problem(text)?;
    let tol = resolve_tolerances(file.tolerances.as_ref(), flags)?;
    let outcome = match action {
        Action::Psum => commands::psum(&file, &tol)?,
        Action::Decompose { method, cross_check } => {
            commands::decompose_cmd(&file, *method, *cross_check, &tol)?
        }
        Action::Check => commands::check(&file, &tol)?,
    };
    Ok(Report {
        command: action.name().into(),
        input_digest: digest(bytes),
        kind: Some(file.problem.kind().into()),
        method: outcome.method,
        decomposition: outcome.decomposition,
        result: outcome.result,
        diagnostics: outcome.diagnostics,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs the fixture suite; the report's `result.failed` counts failures.
pub fn run_selftest(path: &Path, flags: &ToleranceOverrides) -> CliResult<Report> {
    let start = Instant::now();
    resolve_tolerances(None, flags)?;
    let (bytes, file) = selftest::load_fixtures(path)?;
    let summary = selftest::run_suite(&file, flags);
    let mut diagnostics = report::Diagnostics::new();
    diagnostics.insert("fixture_file".into(), path.display().to_string().into());
    Ok(Report {
        command: "selftest".into(),
        input_digest: digest(&bytes),
        kind: None,
        method: None,
        decomposition: None,
        result: Some(summary.to_value()),
        diagnostics,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
