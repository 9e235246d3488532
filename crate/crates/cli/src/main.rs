//! `zeroflow`: reproducible batch runs over the derivative flow of zeros.
//!
//! Exit status: 0 when every check passes, 1 on a failed check, 2 on a
//! configuration or I/O error, 3 when a numerical method did not converge.

// `!(x < y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
mod settings;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use output::{write_manifest, ManifestInput, Run};
use settings::Settings;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] zeroflow_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Core(e) if e.is_numerical() => "numerical",
            CliError::Core(_) => "domain",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "zeroflow",
    version,
    about = "Zeros of repeatedly differentiated polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Differentiate k times and write the zeros.
    Flow(Invocation),
    /// KS and W1 distances to the limit law over a schedule of n and t.
    Compare(Invocation),
    /// Check the equilibrium conditions of the limit law.
    Equilibrium(Invocation),
    /// Finite-n contour bounds and the ellipse checks.
    Bounds(Invocation),
    /// Run the fixed regression schedule.
    Report(Invocation),
}

#[derive(Args)]
struct Invocation {
    /// TOML config, or the manifest.json of an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

type Handler = fn(&Settings, &mut Run) -> Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, handler, inv): (&str, Handler, Invocation) = match cli.command {
        Command::Flow(i) => ("flow", commands::flow, i),
        Command::Compare(i) => ("compare", commands::compare, i),
        Command::Equilibrium(i) => ("equilibrium", commands::equilibrium, i),
        Command::Bounds(i) => ("bounds", commands::bounds, i),
        Command::Report(i) => ("report", commands::report, i),
    };
    match execute(name, handler, inv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("zeroflow {name}: at least one check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("zeroflow {name}: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(name: &str, handler: Handler, inv: Invocation) -> Result<bool, CliError> {
    let file = match &inv.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let flags = inv.settings;
    let effective = flags.clone().over(file.clone());

    let started = Instant::now();
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64());
    let mut run = Run::new(&effective)?;
    let outcome = handler(&effective, &mut run).and_then(|()| run.finish_plots());
    if let Err(e @ CliError::Config(_)) = outcome {
        return Err(e);
    }

    let generators = effective.generators().unwrap_or_default();
    let error = outcome.as_ref().err().map(|e| (e.kind(), e.to_string()));
    write_manifest(
        &run,
        ManifestInput {
            command: name,
            config_file: inv.config.as_deref(),
            file: &file,
            flags: &flags,
            effective: &effective,
            rng_algorithm: generators.iter().find_map(|g| g.rng_algorithm()),
            seeds: generators.iter().filter_map(|g| g.seed()).collect(),
            started_unix,
            elapsed_seconds: started.elapsed().as_secs_f64(),
            error,
        },
    )?;
    for c in run.checks.iter().filter(|c| !c.passed) {
        eprintln!(
            "check failed: {} (observed {}, threshold {})",
            c.name, c.observed, c.threshold
        );
    }
    outcome.map(|()| run.passed())
}
