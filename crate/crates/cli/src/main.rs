//! `boolcube-vqml`: fit, synthesize, and verify variational linear quantum
//! models for real-valued functions on the Boolean cube.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage error.

mod config;
mod fit;
mod synth_cmd;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or config: exit code 2.
    Usage(String),
    /// The run itself failed (hypothesis violation, singular system, ...):
    /// exit code 1.
    Numerical(String),
}

impl From<boolcube_core::Error> for CliError {
    fn from(e: boolcube_core::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("io: {e}"))
    }
}

#[derive(Parser)]
#[command(
    name = "boolcube-vqml",
    about = "Variational linear quantum models on the Boolean cube",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a variational model against a target spectrum and emit
    /// loss/values/spectrum CSV reports plus summary.json.
    Fit {
        /// Experiment config (JSON, schema 1).
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthesize an exact observable or ensemble for the target spectrum
    /// and verify it over the full cube.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named verification suite and print a JSON report.
    Verify {
        /// One of: fourier, thm1, thm2, thm3, thm4, thm5, appendixA1,
        /// appendixA2, appendixB, kernel.
        suite: String,
        /// Optional directory for report.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    if let Err(code) = setup_threads() {
        return code;
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit { config, out } => fit::run(&config, &out),
        Command::Synth { config, out } => synth_cmd::run(&config, &out),
        Command::Verify { suite, out } => verify::run(&suite, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Honor BOOLCUBE_THREADS as a cap on worker threads.
fn setup_threads() -> Result<(), ExitCode> {
    if let Ok(raw) = std::env::var("BOOLCUBE_THREADS") {
        let threads: usize = match raw.parse() {
            Ok(t) if t >= 1 => t,
            _ => {
                eprintln!("usage error: BOOLCUBE_THREADS: expected a positive integer, got '{raw}'");
                return Err(ExitCode::from(2));
            }
        };
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .expect("global pool is configured once, before any use");
    }
    Ok(())
}

/// Write a file, creating the parent directory as needed.
pub fn write_report(dir: &std::path::Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}
