//! `lorentz-iso`: runs the verification suites and writes JSON/CSV reports.
//!
//! Exit codes: 0 every check passed, 1 a mathematical check failed,
//! 2 configuration or I/O error.

mod commands;
mod config;
mod error;
mod output;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::suite::SuiteResult;

#[derive(Debug, Parser)]
#[command(name = "lorentz-iso", version, about = "Verification suites for Lorentzian isoperimetric functionals")]
struct Cli {
    /// JSON run configuration; unknown keys are rejected.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory for suite JSON and CSV files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[arg(long = "tol-atomic", global = true, value_name = "X")]
    tol_atomic: Option<f64>,
    #[arg(long = "tol-quad", global = true, value_name = "X")]
    tol_quad: Option<f64>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Deficits, asymmetries and every inequality chain on graph instances.
    Verify,
    /// Perturbation ladder and fitted scaling exponents.
    Sharpness,
    /// Cone formula, containment and induction step on random simplices.
    Simplex,
    /// Scalar lemma sweeps, constants table and the step-function family.
    Scalar,
    /// Merge suite results; exit 0 iff all passed.
    Report {
        #[arg(value_name = "RESULT")]
        paths: Vec<PathBuf>,
    },
}

impl Sub {
    fn kind(&self) -> Command {
        match self {
            Self::Verify => Command::Verify,
            Self::Sharpness => Command::Sharpness,
            Self::Simplex => Command::Simplex,
            Self::Scalar => Command::Scalar,
            Self::Report { .. } => Command::Report,
        }
    }
}

fn configure(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if let Some(t) = cli.tol_atomic {
        cfg.tolerances.atomic = t;
    }
    if let Some(t) = cli.tol_quad {
        cfg.tolerances.quadrature = t;
    }
    cfg.validate(cli.command.kind())?;
    Ok(cfg)
}

fn emit(cfg: &RunConfig, result: SuiteResult) -> Result<bool, CliError> {
    let path = output::write_json(&cfg.out_dir, &format!("{}.json", result.suite), &result)?;
    for line in result.summary_lines() {
        println!("{line}");
    }
    println!("wrote {}", path.display());
    Ok(result.passed)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    if let Sub::Report { paths } = &cli.command {
        let report = commands::report::run(paths)?;
        for s in &report.suites {
            println!("{} {} ({})", if s.passed { "PASS" } else { "FAIL" }, s.suite, s.path);
            for c in &s.failed_checks {
                println!("  failed: {c}");
            }
        }
        if let Some(dir) = &cli.out {
            let path = output::write_json(dir, "report.json", &report)?;
            println!("wrote {}", path.display());
        }
        return Ok(report.passed);
    }
    let cfg = configure(&cli)?;
    let result = match cli.command {
        Sub::Verify => commands::verify::run(&cfg)?,
        Sub::Sharpness => commands::sharpness::run(&cfg)?,
        Sub::Simplex => commands::simplex::run(&cfg)?,
        Sub::Scalar => commands::scalar::run(&cfg)?,
        Sub::Report { .. } => unreachable!("handled above"),
    };
    emit(&cfg, result)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
