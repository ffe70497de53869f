//! `vecmag` command-line front end.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "vecmag", version, about = "Spin-squeezed vector atomic magnetometer simulator")]
pub struct Cli {
    /// Output format; traces default to csv, scalar reports to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write here (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Physical constants and derived prefactors.
    Constants,
    /// Single-pulse microwave spectrum.
    Spectrum(commands::SpectrumArgs),
    /// Ramsey fringe around one transition.
    Ramsey(commands::RamseyArgs),
    /// Closed-form phase and field sensitivity report.
    Sensitivity(commands::SensitivityArgs),
    /// Echo-squeezing fringe versus phase.
    Gesp(commands::GespArgs),
    /// Inverse phase uncertainty versus twisting strength.
    SensitivityCurve(commands::CurveArgs),
    /// Driven-cavity eigenladder and twisting-strength report.
    Cavity(commands::CavityArgs),
    /// Recover B and θ from a spectrum CSV.
    Estimate(commands::EstimateArgs),
    /// Spectra for several field angles.
    Fig2(commands::Fig2Args),
    /// Unsqueezed and squeezed fringes side by side.
    Fig3(commands::Fig3Args),
    /// Sensitivity curves for several atom numbers.
    Fig4(commands::Fig4Args),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Io(std::io::Error),
}

impl From<vecmag::Error> for CliError {
    fn from(e: vecmag::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

const THREADS_VAR: &str = "VECMAG_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let out = commands::dispatch(&cli.command, cli.seed)?;
    let format = cli.format.unwrap_or_else(|| out.default_format());
    output::write_atomic(cli.output.as_deref(), &out.render(format)).map_err(CliError::Io)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help and version go to stdout with status 0, the rest is a usage error
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vecmag: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
