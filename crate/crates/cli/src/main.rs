//! Batch driver: distance time series, backflow sweeps, optimal-ordering
//! scans and covariance eigenvalues, written as CSV with JSON sidecars.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "phaseflow", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Reserved; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trace and Kolmogorov distances over time, one file per parameter set.
    Distances,
    /// Backflow of trace and Wigner distances over two parameter axes.
    Sweep,
    /// Kolmogorov-minus-trace deviation over s and the optimal ordering.
    Sstar,
    /// Covariance eigenvalues over time, one file per parameter set.
    Covariance,
    /// Print the effective configuration as TOML.
    Config,
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    if let Command::Config = cli.command {
        print!("{}", cfg.to_toml());
        return Ok(Vec::new());
    }
    configure_threads(cli.threads)?;
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::io(&cli.out, e))?;
    match cli.command {
        Command::Distances => commands::distances(&cfg, &cli.out),
        Command::Sweep => commands::sweep(&cfg, &cli.out),
        Command::Sstar => commands::sstar(&cfg, &cli.out),
        Command::Covariance => commands::covariance(&cfg, &cli.out),
        Command::Config => unreachable!("handled above"),
    }
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    if n == 1 {
        phaseflow::par::set_parallel(false);
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
