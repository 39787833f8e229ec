use std::path::PathBuf;
use std::process::ExitCode;

use cfa_cli::{execute, Command, Invocation};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cfa", version, about = "Simulate, tune, evaluate and compare parametric lookahead policies")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config (TOML), or any result file written by this tool.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory (default: the config's `output_dir`, else `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Parameter file written by `tune`: the starting point for `tune`, the
    /// policy for `simulate`/`evaluate`, the tuned side for `compare`.
    #[arg(long, global = true)]
    theta: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Roll the policy forward and write trajectories.
    Simulate,
    /// Tune policy parameters (SPSA, or grid search when [grid] is set).
    Tune,
    /// Estimate the policy's cost on validation paths.
    Evaluate,
    /// Tune, then compare against the unit-parameter baseline on common paths.
    Compare,
    /// Run built-in sanity checks.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Tune => Command::Tune,
        Cmd::Evaluate => Command::Evaluate,
        Cmd::Compare => Command::Compare,
        Cmd::Selftest => Command::Selftest,
    };
    let inv = Invocation {
        config: cli.config,
        seed: cli.seed,
        out: cli.out,
        theta: cli.theta,
    };
    let result = match cli.workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| execute(command, &inv)),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => execute(command, &inv),
    };
    match result {
        Ok(out) => {
            for line in &out.summary {
                println!("{line}");
            }
            for file in &out.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
