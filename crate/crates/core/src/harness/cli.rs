//! Command-line interface.

use super::config::{Experiment, ExperimentConfig};
use super::experiments::{run, RunSummary};
use crate::error::{Error, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

/// Environment variable read when `--threads` is absent.
pub const THREADS_ENV: &str = "RANAPPROX_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "ranapprox",
    version,
    about = "Randomized versus deterministic uniform approximation in periodic tensor-product Hilbert spaces"
)]
pub struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Master seed for all randomized computations.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for output files.
    #[arg(long = "out-dir", alias = "out_dir", global = true)]
    pub out_dir: Option<PathBuf>,

    /// Worker threads for replications.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the one-dimensional kernel and its canonical metric.
    Kernel(Overrides),
    /// Deterministic lower and projection errors next to the Monte Carlo bound.
    Bounds(Overrides),
    /// Approximate one random input with the Monte Carlo method (d = 1).
    Simulate(Overrides),
    /// Empirical and theoretical information complexity across dimensions.
    Scaling(Overrides),
    /// Sketching in l_2^m -> l_inf^m against the deterministic lower bound.
    Seqspace(Overrides),
}

impl Command {
    pub fn experiment(&self) -> Experiment {
        match self {
            Command::Kernel(_) => Experiment::Kernel,
            Command::Bounds(_) => Experiment::Bounds,
            Command::Simulate(_) => Experiment::Simulate,
            Command::Scaling(_) => Experiment::Scaling,
            Command::Seqspace(_) => Experiment::Seqspace,
        }
    }

    fn overrides(&self) -> &Overrides {
        match self {
            Command::Kernel(o)
            | Command::Bounds(o)
            | Command::Simulate(o)
            | Command::Scaling(o)
            | Command::Seqspace(o) => o,
        }
    }
}

/// Per-experiment overrides of configuration keys, parsed like config values.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Korobov smoothness.
    #[arg(long)]
    pub r: Option<String>,
    /// Weight of the constant function.
    #[arg(long)]
    pub beta0: Option<String>,
    /// Explicit weights lambda_0, lambda_1, ... (comma-separated).
    #[arg(long)]
    pub lambda: Option<String>,
    /// Dimensions (comma-separated).
    #[arg(long)]
    pub dims: Option<String>,
    /// Target errors (comma-separated).
    #[arg(long)]
    pub eps: Option<String>,
    /// Numbers of information functionals (comma-separated).
    #[arg(long)]
    pub n: Option<String>,
    /// Mass of the basis dropped by truncation.
    #[arg(long = "mass-tol", alias = "mass_tol")]
    pub mass_tol: Option<String>,
    /// Grid points per dimension.
    #[arg(long)]
    pub grid: Option<String>,
    /// Monte Carlo replications.
    #[arg(long)]
    pub replications: Option<String>,
    /// Largest n tried by the scaling search.
    #[arg(long = "n-max", alias = "n_max")]
    pub n_max: Option<String>,
    /// Constant in Dudley's inequality.
    #[arg(long = "c-dudley", alias = "c_dudley")]
    pub c_dudley: Option<String>,
    /// Largest number of points in a tensor grid.
    #[arg(long = "grid-budget", alias = "grid_budget")]
    pub grid_budget: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("r", &self.r),
            ("beta0", &self.beta0),
            ("lambda", &self.lambda),
            ("dims", &self.dims),
            ("eps", &self.eps),
            ("n", &self.n),
            ("mass_tol", &self.mass_tol),
            ("grid", &self.grid),
            ("replications", &self.replications),
            ("n_max", &self.n_max),
            ("c_dudley", &self.c_dudley),
            ("grid_budget", &self.grid_budget),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

impl Cli {
    /// The configuration file (if any) with every flag applied on top.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        cfg.experiment = self.command.experiment();
        for (k, v) in self.command.overrides().pairs() {
            cfg.set(k, v)?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = Some(seed);
        }
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = dir.clone();
        }
        Ok(cfg)
    }
}

/// Resolves the configuration, sizes the thread pool and runs.
pub fn execute(cli: &Cli) -> Result<RunSummary> {
    let cfg = cli.resolve()?;
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    run(&cfg)
}
