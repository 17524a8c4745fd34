//! Batch front-end: job configs in, circuits and reports out.
//!
//! Subcommands: `synthesize`, `verify`, `scaling`, `demo`. Exit codes:
//! 0 success, 1 verified-fail, 2 usage or schema error, 3 resource
//! refusal.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Refusal(String),
    Lib(qlt::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Refusal(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<qlt::Error> for CliError {
    fn from(e: qlt::Error) -> Self {
        match e {
            qlt::Error::TooManyQubits(_)
            | qlt::Error::VerificationTooLarge { .. }
            | qlt::Error::MatrixTooLarge(..) => {
                CliError::Refusal(format!("resource refusal: {e}"))
            }
            other => CliError::Lib(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Refusal(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "qlt",
    about = "Compile discrete Laplace transforms into block-encoding circuits, simulate and verify them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a transform and write circuit.qasm + report.json.
    Synthesize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compile, simulate densely and check against the exact matrix.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Construction-only resource table over a range of system sizes.
    Scaling {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
    },
    /// Packaged worked examples with fixed inputs.
    Demo {
        /// ztransform | continuous-laplace | fourier-diagonal
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run() -> Result<ExitCode, CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Synthesize { config, out, seed } => {
            commands::synthesize(&config, &out, seed)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { config, out, seed } => {
            let pass = commands::verify(&config, &out, seed)?;
            if pass {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("verification failed: measured error exceeds the accuracy target");
                Ok(ExitCode::from(1))
            }
        }
        Command::Scaling { config, out, seed, format } => {
            commands::scaling(&config, &out, seed, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Demo { name, out, seed } => {
            commands::demo(&name, &out, seed)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
