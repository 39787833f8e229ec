//! Experiment runner for the cost-function-approximation library.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use commands::{run, Command, RunOutput};
pub use config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

/// Command-line inputs besides the subcommand.
#[derive(Clone, Debug, Default)]
pub struct Invocation {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub theta: Option<PathBuf>,
}

/// Loads and resolves the config, then runs `command`.
pub fn execute(command: Command, inv: &Invocation) -> Result<RunOutput, CliError> {
    if command == Command::Selftest {
        return run(command, &selftest_placeholder(), Path::new("."));
    }
    let path = inv
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let config = ExperimentConfig::load(path)?;
    let out = inv
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let theta = inv.theta.as_deref().map(config::read_theta_file).transpose()?;
    let resolved = if command == Command::Compare {
        let mut config = config;
        if theta.is_some() {
            config.evaluation.tuned = theta;
        }
        config.resolve(inv.seed, None)?
    } else {
        config.resolve(inv.seed, theta)?
    };
    run(command, &resolved, &out)
}

fn selftest_placeholder() -> ExperimentConfig {
    ExperimentConfig::parse("problem = \"quadratic\"\n[quadratic]\ndimension = 1\n").expect("static config")
}
