//! `mrf-learn`: exact spectra, majority tables, learners and invariant checks
//! driven by a flat config file.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 size cap exceeded,
//! 3 numerical validation failure.

mod cache;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] mrf_learn::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Validation(_) => 3,
            CliError::Core(e) => match e {
                mrf_learn::Error::SizeCap(_) => 2,
                mrf_learn::Error::Numerical(_) => 3,
                _ => 1,
            },
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "mrf-learn", version, about = "Learning boolean functions under Markov random fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Config file; flags and `MRFL_*` variables override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Artifact directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Spectrum cache directory.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Largest support enumerated exactly.
    #[arg(long = "cap-states", global = true)]
    cap_states: Option<usize>,
    /// Overrides one config key, e.g. `--set model.beta=0.2`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Sorted eigenvalues for each coupling in `spectrum.betas`.
    Spectrum,
    /// Polynomial and eigenvector approximation errors of majority.
    MajorityTable,
    /// Agnostic learning with spectral features and L1 regression.
    Learn,
    /// Exact recovery of random juntas from labeled walks.
    Junta,
    /// Exact noise sensitivity curve of the target.
    Noise,
    /// Stationary samples or a labeled walk.
    Sample,
    /// Invariant suite for the model.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::MajorityTable => "majority-table",
            Command::Learn => "learn",
            Command::Junta => "junta",
            Command::Noise => "noise",
            Command::Sample => "sample",
            Command::Verify => "verify",
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        cfg.merge_text(&text)?;
    }
    cfg.merge_env(std::env::vars())?;
    for kv in &cli.set {
        let (k, v) =
            kv.split_once('=').ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        cfg.set(k.trim(), v)?;
    }
    if let Some(s) = cli.seed {
        cfg.set("seed", &s.to_string())?;
    }
    if let Some(p) = &cli.out {
        cfg.set("out", &p.to_string_lossy())?;
    }
    if let Some(p) = &cli.cache {
        cfg.set("cache", &p.to_string_lossy())?;
    }
    if let Some(w) = cli.workers {
        cfg.set("workers", &w.to_string())?;
    }
    if let Some(c) = cli.cap_states {
        cfg.set("cap_states", &c.to_string())?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = resolve_config(&cli).and_then(|cfg| commands::run(cli.command, &cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
