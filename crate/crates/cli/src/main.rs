use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod output;
mod problem;

/// Failures, each mapped to a fixed exit code.
#[derive(Debug)]
pub enum CliError {
    /// Parse or validation failure (exit 1).
    Input(String),
    /// Solver did not reach the requested tolerance (exit 2).
    NonConvergence(String),
    /// Oracle validation found mismatches (exit 3).
    Mismatch(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Input(_) => 1,
            Self::NonConvergence(_) => 2,
            Self::Mismatch(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Input(m) | Self::NonConvergence(m) | Self::Mismatch(m) => f.write_str(m),
        }
    }
}

impl From<qfe_core::Error> for CliError {
    fn from(e: qfe_core::Error) -> Self {
        use qfe_core::Error as E;
        match e {
            E::SolverNonConvergence { .. } | E::RecoveryFailure { .. } => {
                Self::NonConvergence(e.to_string())
            }
            _ => Self::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    T,
    #[value(name = "L", alias = "l")]
    L,
    Shots,
    P,
}

#[derive(Parser)]
#[command(name = "qfe", version, about = "Precision bounds and saturating protocols for Hamiltonian parameter functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
pub struct RunFlags {
    /// Solver tolerance (overrides the file).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub shots: Option<usize>,
    /// Product-formula step count (overrides the file).
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub reshape: Option<Switch>,
    /// Write JSON-lines records here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for γ and print the dual certificate.
    Bound {
        file: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the estimation protocol on the file's θ and t.
    Simulate {
        file: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
        /// Include every swap event in the record.
        #[arg(long)]
        schedule: bool,
    },
    /// Repeat the protocol over a list of values of one parameter.
    Sweep {
        file: PathBuf,
        #[arg(long, value_enum)]
        axis: Axis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Seeds per value, starting at --seed.
        #[arg(long, default_value_t = 20)]
        repeats: u64,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Compare the solver against every closed form in the oracle catalog.
    Validate {
        #[arg(long, default_value_t = 50)]
        draws: usize,
        #[arg(long, default_value_t = qfe_core::bound::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        rel_tol: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bound { file, tol, out } => commands::bound(&file, tol, out.as_deref()),
        Command::Simulate { file, flags, schedule } => commands::simulate(&file, &flags, schedule),
        Command::Sweep {
            file,
            axis,
            values,
            repeats,
            flags,
        } => commands::sweep(&file, axis, &values, repeats, &flags),
        Command::Validate {
            draws,
            tol,
            rel_tol,
            seed,
            out,
        } => commands::validate(draws, tol, rel_tol, seed, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
