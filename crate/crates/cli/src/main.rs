//! `dunkl`: experiments on the fractional Dunkl heat flow.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or the run
//! breaks down, 2 for usage and configuration errors.

mod commands;
mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Report;
use crate::config::Config;
use crate::error::CliError;
use crate::output::OutDir;

/// Fallback output directory when neither `--out` nor `output.dir` is given.
pub const OUT_ENV: &str = "DUNKL_OUT_DIR";
const DEFAULT_OUT: &str = "dunkl-out";

#[derive(Parser, Debug)]
#[command(name = "dunkl", version, about = "Fractional Dunkl heat flow experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariant suite: normalization, Plancherel, round trip, translation,
    /// Young, semigroup law, subordination.
    Selftest(Common),
    /// Scaled linear error curves and decade-decay verdicts.
    Linear(Common),
    /// First-moment rate of the heat-flow error.
    MomentRate(Common),
    /// Absorption problem: mass trajectory, limit mass, error curves.
    Nonlinear(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Flat key = value config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir` and $DUNKL_OUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

fn out_dir(flag: Option<&Path>, cfg: &Config) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn set_threads(n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failure(format!("thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    eprintln!("note: built without the `parallel` feature; --threads {n} has no effect");
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (common, f): (&Common, fn(&Config) -> Result<Report, CliError>) = match &cli.command {
        Command::Selftest(c) => (c, commands::selftest),
        Command::Linear(c) => (c, commands::linear),
        Command::MomentRate(c) => (c, commands::moment_rate),
        Command::Nonlinear(c) => (c, commands::nonlinear),
    };
    let cfg = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(n) = common.threads {
        set_threads(n)?;
    }
    let dir = OutDir(out_dir(common.out.as_deref(), &cfg));
    let report = f(&cfg)?;
    for line in &report.lines {
        println!("{line}");
    }
    if let Some(csv) = &report.csv {
        println!("wrote {}", dir.csv(report.name, csv)?.display());
    }
    println!("wrote {}", dir.json(report.name, &report.json)?.display());
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
