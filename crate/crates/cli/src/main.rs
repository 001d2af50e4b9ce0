//! `heisproj`: reproducible vertical-projection experiments in the Heisenberg
//! group. Each command writes CSV/JSON (and SVG where useful) into `--out`.

mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{dims, fourier, oscillatory, project, sweep};
use config::FileConfig;
use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "heisproj", version, about = "Vertical projection experiments in the first Heisenberg group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// INI-style `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed recorded with generated measures (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; outputs do not depend on it (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Project a measure onto a vertical plane and write its plane coordinates.
    Project {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: project::ProjectArgs,
    },
    /// Projected energies over an angle grid and their integral.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: sweep::SweepArgs,
    },
    /// Box-counting dimension of the projections over an angle grid.
    Dims {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: dims::DimsArgs,
    },
    /// Dyadic pair sums of the oscillatory integral and their growth in j.
    Oscillatory {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: oscillatory::OscillatoryArgs,
    },
    /// Positivity and upper bound of the Fourier transform of f_s.
    FourierCheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: fourier::FourierArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Project { .. } => "project",
            Command::Sweep { .. } => "sweep",
            Command::Dims { .. } => "dims",
            Command::Oscillatory { .. } => "oscillatory",
            Command::FourierCheck { .. } => "fourier-check",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Project { common, .. }
            | Command::Sweep { common, .. }
            | Command::Dims { common, .. }
            | Command::Oscillatory { common, .. }
            | Command::FourierCheck { common, .. } => common,
        }
    }
}

fn run(command: Command) -> CliResult<commands::Violations> {
    let common = command.common();
    let file = match &common.config {
        Some(path) => FileConfig::load(path, command.name())?,
        None => FileConfig::default(),
    };
    let seed = file.resolve("seed", common.seed, 0u64)?;
    let out = file.resolve("out", common.out.clone(), PathBuf::from("out"))?;
    let threads = file.resolve("threads", common.threads, 0usize)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match command {
        Command::Project { args, .. } => project::run(args, &file, seed, &out),
        Command::Sweep { args, .. } => sweep::run(args, &file, seed, &out),
        Command::Dims { args, .. } => dims::run(args, &file, seed, &out),
        Command::Oscillatory { args, .. } => oscillatory::run(args, &file, seed, &out),
        Command::FourierCheck { args, .. } => fourier::run(args, &file, seed, &out),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(violations) if violations.is_empty() => ExitCode::SUCCESS,
        Ok(violations) => {
            for v in &violations {
                eprintln!("heisproj: check failed: {v}");
            }
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("heisproj: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
