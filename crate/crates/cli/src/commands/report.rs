use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::suite::{SuiteResult, SCHEMA};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub path: String,
    pub suite: String,
    pub passed: bool,
    pub failed_checks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub passed: bool,
    pub suites: Vec<SuiteSummary>,
}

pub fn load(path: &PathBuf) -> Result<SuiteResult, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let s: SuiteResult =
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: not a suite result: {e}", path.display())))?;
    if s.schema != SCHEMA {
        return Err(CliError::Io(format!("{}: unsupported schema {}", path.display(), s.schema)));
    }
    Ok(s)
}

pub fn run(paths: &[PathBuf]) -> Result<Report, CliError> {
    if paths.is_empty() {
        return Err(CliError::Config("report needs at least one suite result".into()));
    }
    let suites = paths
        .iter()
        .map(|p| {
            let s = load(p)?;
            Ok(SuiteSummary {
                path: p.display().to_string(),
                suite: s.suite,
                passed: s.passed && s.checks.iter().all(|c| c.pass),
                failed_checks: s.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Report {
        schema: SCHEMA,
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}
