//! Experiment runner behind the `unclab` binary.
//!
//! A run reads a JSON config, applies command-line overrides, executes every trial
//! with its own derived seed and writes `<experiment>.csv`, `summary.json` and
//! `manifest.json` into the output directory.

mod config;
mod experiments;
mod manifest;
mod plot;

use std::path::PathBuf;

use clap::Parser;

pub use config::{Experiment, ExperimentConfig, StateSpec};
pub use experiments::{run, RunOutcome};
pub use manifest::{sha256_hex, RunManifest};
pub use plot::emit_plot_data;

use crate::fuzz::FuzzVariant;
use crate::{Error, Result};

/// Exit code for a clean run.
pub const EXIT_OK: i32 = 0;
/// Exit code for configuration, regime or I/O errors.
pub const EXIT_CONFIG: i32 = 1;
/// Exit code when some trial violated its bound.
pub const EXIT_VIOLATION: i32 = 2;

/// Thread cap for worker pools.
pub const THREADS_ENV: &str = "UNCLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "unclab", version, about = "Quantum uncomplexity experiments")]
pub struct CliArgs {
    /// fuzz-bound, entropy, extract, expend, accessible-dim, bw-monotone,
    /// negentropy-dim, or `plot` to turn a results CSV into plot series.
    pub experiment: String,
    /// Results CSV to convert (plot only).
    pub results: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub fuzz_variant: Option<FuzzVariant>,
    #[arg(long)]
    pub state: Option<StateSpec>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CliArgs {
    /// Config file (if any) with command-line values on top.
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        cfg.experiment = Some(self.experiment.parse()?);
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() { cfg.$field = v; }
            )*};
        }
        set!(seed, n, r, layers, eta, epsilon, tol, trials, restarts, points, fuzz_variant, state);
        if self.k.is_some() {
            cfg.k = self.k;
        }
        if self.delta.is_some() {
            cfg.delta = self.delta;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        Ok(cfg)
    }
}

/// Parses `args`, runs the requested command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match CliArgs::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("unclab: {e}");
            EXIT_CONFIG
        }
    }
}

fn dispatch(cli: &CliArgs) -> Result<i32> {
    if cli.experiment == "plot" {
        let results = cli.results.as_ref().ok_or_else(|| Error::Config("plot needs a results CSV path".into()))?;
        let out = cli.out.clone().unwrap_or_else(|| results.with_extension("plot.csv"));
        let rows = emit_plot_data(results, &out)?;
        println!("{rows} plot rows -> {}", out.display());
        return Ok(EXIT_OK);
    }
    let cfg = cli.to_config()?;
    let outcome = with_thread_pool(|| run(&cfg))?;
    println!(
        "{}: {} trials, {} violations -> {}",
        outcome.experiment,
        outcome.trials,
        outcome.violations,
        outcome.csv_path.display()
    );
    Ok(outcome.exit_code())
}

/// Runs `f` inside a rayon pool capped by `UNCLAB_THREADS` when it is set.
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
        ),
        Err(_) => None,
    };
    match threads {
        None => f(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(f),
    }
}
