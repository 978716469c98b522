mod commands;
mod plot;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use satharm::scenario::CancelModel;
use satharm::verify::Suite;
use satharm::Error;

/// Saturated-interference simulation, harmonic decomposition and cancellation.
///
/// Scenario settings come from the built-in defaults, then `--config FILE`,
/// then trailing `--key value` overrides (for example `--isr-db 20 --c 0.8`).
#[derive(Parser, Debug)]
#[command(name = "satharm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<std::path::PathBuf>,

    /// Also render PNG plots next to the CSV artifacts.
    #[arg(long)]
    plots: bool,

    /// Scenario overrides as `--key value` or `--key=value` pairs.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate unsaturated and saturated signals with spectra and TF maps.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Write the harmonic decomposition table.
    Decompose {
        #[command(flatten)]
        common: Common,
    },
    /// Reconstruct one harmonic and subtract it from the saturated signal.
    Cancel {
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// bessel or tanh
        #[arg(long, default_value = "bessel")]
        model: CancelModel,
        #[command(flatten)]
        common: Common,
    },
    /// Cancel interference harmonic (0, n) with both models and compare.
    Compare {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Run self-check suites: sat-integral, parity, oracle, jacobi-anger, all.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
}

pub enum Failure {
    Lib(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Lib(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) | Error::Parity { .. } | Error::Unsupported(_) => 2,
        Error::Convergence { .. } => 3,
        Error::ShapeMismatch(_) | Error::Format { .. } | Error::Io(_) => 1,
    }
}

fn init_threads() {
    let Ok(v) = std::env::var("SATHARM_THREADS") else { return };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("could not size the worker pool: {e}");
            }
        }
        _ => log::warn!("ignoring SATHARM_THREADS={v}: expected a positive integer"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { common } => commands::simulate(&common),
        Command::Decompose { common } => commands::decompose(&common),
        Command::Cancel { m, n, model, common } => commands::cancel(&common, m, n, model),
        Command::Compare { n, common } => commands::compare(&common, n),
        Command::Verify { suite, common } => commands::verify(&common, suite),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(4),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
