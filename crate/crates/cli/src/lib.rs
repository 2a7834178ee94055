//! Command-line front end for `dirac-qca`.
//!
//! Every subcommand either writes a data table (CSV or JSON) or runs a set of
//! residual checks. Data goes to `--out`, or to stdout when no path is given;
//! summaries go to stdout only when the data went to a file.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

mod commands;
pub mod emit;

pub use emit::{Cell, Format, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAM: i32 = 2;
pub const EXIT_CHECK: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Param(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Param(_) => EXIT_PARAM,
            CliError::Check(_) => EXIT_CHECK,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<dirac_qca::Error> for CliError {
    fn from(e: dirac_qca::Error) -> Self {
        CliError::Param(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dirac-qca",
    version,
    about = "Quantum circuit simulation of a 1+1-dimensional Dirac field"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Print the solved gate pair and check its identities.
    Gates,
    /// Tabulate zeta against mu on [0, 1].
    ZetaCurve,
    /// Tabulate the effective energy, group velocity and Hamiltonian norm over the zone.
    Dispersion,
    /// Evolve a Gaussian packet and record its trajectory.
    Evolve,
    /// Compare path-sum evolution with the two-step kernel.
    PathsumCheck,
    /// Run the Jordan-Wigner many-body checks on a small ring.
    ManybodyCheck,
    /// Check the Hamiltonian norm against 1/(n tau).
    BoundCheck,
}

/// Flags shared by all subcommands. Unset values take per-command defaults.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Mass ratio mu = 2a/lambda in [0, 1].
    #[arg(
        long,
        global = true,
        allow_negative_numbers = true,
        default_value_t = 0.5
    )]
    pub mu: f64,
    /// Ring size in cells (evolve 256, pathsum-check 16, manybody-check 3).
    #[arg(long, global = true)]
    pub cells: Option<usize>,
    #[arg(long, global = true, default_value_t = 100)]
    pub two_steps: usize,
    /// Packet center in cells (default: middle of the ring).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub center: Option<f64>,
    /// Packet width in cells (default: cells/32).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Packet carrier wavenumber.
    #[arg(
        long,
        global = true,
        allow_negative_numbers = true,
        default_value_t = 0.0
    )]
    pub k0: f64,
    /// Component mix `re+,im+,re-,im-` (or `re+,re-`), normalized before use.
    #[arg(long, global = true, allow_negative_numbers = true, value_parser = parse_mix, default_value = "1,0,0,0")]
    pub mix: [f64; 4],
    #[arg(long, global = true, default_value_t = 1024)]
    pub k_points: usize,
    #[arg(long, global = true, default_value_t = 101)]
    pub samples: usize,
    /// Path-sum depth in gate rows.
    #[arg(long, global = true, default_value_t = 8)]
    pub depth: usize,
    /// Order n of the bound 1/(n tau).
    #[arg(long, global = true, default_value_t = 2)]
    pub order: u32,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Overrides every tolerance of the check being run.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Writes every forward path of `pathsum-check` as JSON.
    #[arg(long, global = true)]
    pub dump_paths: Option<PathBuf>,
}

fn parse_mix(s: &str) -> Result<[f64; 4], String> {
    let parts = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<f64>, String>>()?;
    match parts[..] {
        [a, b] => Ok([a, 0.0, b, 0.0]),
        [a, b, c, d] => Ok([a, b, c, d]),
        _ => Err(format!(
            "expected 2 or 4 comma-separated numbers, got {}",
            parts.len()
        )),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::InvalidValue | ErrorKind::ValueValidation => EXIT_PARAM,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("dirac-qca: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Some(t) = cli.opts.tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::Param(format!(
                "tolerance must be finite and nonnegative, got {t}"
            )));
        }
    }
    match cli.command {
        Command::Gates => commands::gates(&cli.opts),
        Command::ZetaCurve => commands::zeta_curve(&cli.opts),
        Command::Dispersion => commands::dispersion(&cli.opts),
        Command::Evolve => commands::evolve(&cli.opts),
        Command::PathsumCheck => commands::pathsum_check(&cli.opts),
        Command::ManybodyCheck => commands::manybody_check(&cli.opts),
        Command::BoundCheck => commands::bound_check(&cli.opts),
    }
}
