mod curve_cmd;
mod data;
mod index_cmd;
mod output;
mod sparsity_cmd;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use padic_hilbert::Error;

#[derive(Parser, Debug)]
#[command(
    name = "padic-hilbert",
    version,
    about = "p-adic Gray-Hilbert curves and scaled tree indexes"
)]
struct Cli {
    /// Worker threads for per-point encoding (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Curve index -> cell word and coordinates.
    Encode(curve_cmd::EncodeArgs),
    /// Point coordinates or a cell word -> curve index.
    Decode(curve_cmd::DecodeArgs),
    /// Emit the curve polyline through every cell centre (SVG or CSV).
    Trace(curve_cmd::TraceArgs),
    /// Build a scaled tree and query or modify it.
    Index(index_cmd::IndexArgs),
    /// Capacity ratio and local sparsity report over a bucket sweep.
    Sparsity(sparsity_cmd::SparsityArgs),
    /// Time bulk encoding, sequential against parallel.
    Bench(sparsity_cmd::BenchArgs),
}

/// Failures the commands report; each maps to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(e) if e.is_data_error() => 3,
            CliError::Output(_) => 3,
            CliError::Lib(_) => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let exec = match cli.threads {
        Some(1) => padic_hilbert::Exec::Sequential,
        _ => padic_hilbert::Exec::Parallel,
    };
    match cli.command {
        Command::Encode(a) => curve_cmd::encode(a),
        Command::Decode(a) => curve_cmd::decode(a),
        Command::Trace(a) => curve_cmd::trace(a),
        Command::Index(a) => index_cmd::run(a, exec),
        Command::Sparsity(a) => sparsity_cmd::run(a, exec),
        Command::Bench(a) => sparsity_cmd::bench(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
