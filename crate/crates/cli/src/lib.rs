//! Command-line front end: runs the experiments end to end and writes
//! seeded JSON or CSV records.

pub mod commands;
pub mod parse;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const TOOL: &str = "bellmean";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "bellmean",
    version,
    about = "Measurement statistics, CHSH tests and oracle checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Master seed; drawn from system entropy and reported on stderr if absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Outcome magnitude.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-outcome system prepared along +z and measured at angle theta.
    Qubit {
        #[arg(long, value_parser = parse::parse_angle)]
        theta: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// CHSH value of a correlator model, analytic and sampled.
    Chsh {
        /// Coplanar analyzers 45° apart.
        #[arg(long, conflicts_with = "config")]
        canonical: bool,
        /// JSON file with axes `n`, `n_prime`, `m`, `m_prime`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ChshModel::Quantum)]
        model: ChshModel,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Composite-system transition tables on a theta grid over [0, π].
    Composite {
        #[arg(long, value_enum, default_value_t = TableModel::Principled)]
        model: TableModel,
        #[arg(long, default_value_t = 13)]
        points: usize,
    },
    /// Single-quantum Stokes-parameter estimate.
    Stokes {
        #[arg(long, default_value_t = 1_000_000)]
        events: u64,
        #[arg(long, value_parser = parse::parse_axis, default_value = "z")]
        prep: bellmean::UnitAxis,
        #[arg(long, value_parser = parse::parse_axis, default_value = "x")]
        meas: bellmean::UnitAxis,
    },
    /// Engine/oracle agreement and invariant sweep.
    Verify {
        #[arg(long, default_value_t = bellmean::verify::DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Debug dump of spin-½ amplitudes for axes in the x-z plane.
    Oracle {
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChshModel {
    Quantum,
    LhvSign,
    LhvScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableModel {
    Principled,
    Mixture,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    let seed = cli.global.seed.unwrap_or_else(|| {
        let seed = rand::random::<u64>();
        let _ = writeln!(stderr, "seed: {seed}");
        seed
    });
    match commands::execute(&cli.command, &cli.global, seed) {
        Ok(out) => {
            let written = match &cli.global.out {
                Some(path) => fs::write(path, &out.body),
                None => stdout.write_all(out.body.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_FAILED;
            }
            if let Some(note) = out.note {
                let _ = writeln!(stderr, "{note}");
            }
            if out.success {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_FAILED
        }
    }
}
