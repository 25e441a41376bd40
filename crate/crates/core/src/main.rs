use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qre::apps::app_presets;
use qre::estimator::CFactor;
use qre::job::{parse_job, resolve_job, run, DMAX_ENV};
use qre::qec::builtin_codes;
use qre::qubit::presets;
use qre::report::{render, Format};
use qre::Error;

#[derive(Parser)]
#[command(
    name = "qre",
    version,
    about = "Physical resource estimates for fault-tolerant quantum programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate physical qubits and runtime for a job
    Estimate {
        #[arg(long)]
        job: PathBuf,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Sweep the logical depth multiplier and emit the space-time tradeoff
    Frontier {
        #[arg(long)]
        job: PathBuf,
        /// comma-separated c_factors, e.g. 1,2,4,8 or 1,3/2,2; defaults to the
        /// job's frontier_factors
        #[arg(long, value_delimiter = ',')]
        factors: Vec<CFactor>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// List the built-in presets as JSON
    Presets {
        #[arg(value_enum)]
        kind: Option<PresetKind>,
    },
    /// Check a job file and print its resolved requirements
    Validate {
        #[arg(long)]
        job: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetKind {
    Qubits,
    Apps,
    Codes,
}

enum Failure {
    Domain(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn read_job(path: &Path) -> Result<qre::job::JobSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_job(&text)?)
}

fn presets_json(kind: Option<PresetKind>) -> String {
    #[derive(serde::Serialize)]
    struct All {
        qubits: Vec<qre::qubit::PhysicalQubitParams>,
        apps: Vec<qre::apps::AppPreset>,
        codes: Vec<qre::qec::QecCodeModel>,
    }
    let out = match kind {
        Some(PresetKind::Qubits) => serde_json::to_string_pretty(&presets()),
        Some(PresetKind::Apps) => serde_json::to_string_pretty(&app_presets()),
        Some(PresetKind::Codes) => serde_json::to_string_pretty(&builtin_codes()),
        None => serde_json::to_string_pretty(&All {
            qubits: presets(),
            apps: app_presets(),
            codes: builtin_codes(),
        }),
    };
    out.expect("presets serialize") + "\n"
}

fn execute(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Estimate { job, format } => {
            let job = read_job(&job)?;
            Ok(render(&run(&job)?, format))
        }
        Command::Frontier {
            job,
            factors,
            format,
        } => {
            let mut job = read_job(&job)?;
            if !factors.is_empty() {
                job.frontier_factors = Some(factors);
            }
            if job.frontier_factors.as_ref().is_none_or(Vec::is_empty) {
                return Err(Failure::Input(
                    "frontier needs --factors or frontier_factors in the job".into(),
                ));
            }
            Ok(render(&run(&job)?, format))
        }
        Command::Presets { kind } => Ok(presets_json(kind)),
        Command::Validate { job } => {
            let spec = read_job(&job)?;
            let env = std::env::var(DMAX_ENV).ok();
            let resolved = resolve_job(&spec, env.as_deref())?;
            let summary = serde_json::json!({
                "valid": true,
                "qubit": resolved.qubit.name,
                "application": resolved.application,
                "requirements": resolved.requirements,
                "c_factors": resolved.factors,
                "distance_cap": resolved.options.max_distance,
            });
            let mut out = serde_json::to_string_pretty(&summary).expect("json");
            out.push('\n');
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
