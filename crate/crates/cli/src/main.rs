use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod run;

use config::{CommandName, RunArgs};

/// Finite Latin-square approximations of groups.
#[derive(Parser)]
#[command(name = "latinapprox", version)]
struct Cli {
    /// JSON file whose keys mirror the flags; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate a compact group, or a window of the real line.
    Approximate(RunArgs),
    /// Approximate a compact group by a finite loop.
    Loop(RunArgs),
    /// Measure the line-sum disparity of a sampled tensor.
    Probe(RunArgs),
    /// Realize an integer amalgam as a (partial) Latin square.
    Realize(RunArgs),
    /// Embed a partial Latin square into a full one of twice the order.
    Complete(RunArgs),
    /// Compute the cell multiplication tensor.
    Tensor(RunArgs),
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("LATINAPPROX_THREADS") {
        let n: usize = v.parse().map_err(|_| anyhow::anyhow!("LATINAPPROX_THREADS: expected a number, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, flags) = match cli.command {
        Some(Command::Approximate(a)) => (Some(CommandName::Approximate), a),
        Some(Command::Loop(a)) => (Some(CommandName::Loop), a),
        Some(Command::Probe(a)) => (Some(CommandName::Probe), a),
        Some(Command::Realize(a)) => (Some(CommandName::Realize), a),
        Some(Command::Complete(a)) => (Some(CommandName::Complete), a),
        Some(Command::Tensor(a)) => (Some(CommandName::Tensor), a),
        None => (None, RunArgs::default()),
    };
    let result = init_threads().and_then(|()| {
        let base = match &cli.config {
            Some(path) => RunArgs::from_file(path)?,
            None => RunArgs::default(),
        };
        let cfg = base.overlay(&RunArgs { command: name, ..flags });
        run::run(&cfg)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(run::EXIT_ERROR)
        }
    }
}
