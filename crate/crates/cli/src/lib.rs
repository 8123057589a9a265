//! `decohere`: configuration-driven scenario runner.
//!
//! Every subcommand reads a TOML config (or a previous run manifest), applies
//! `--key value` overrides, writes its data files atomically into the output
//! directory and finishes with `manifest.json`.

pub mod config;
pub mod output;
pub mod scenarios;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::{load_config, Overrides};
use crate::output::{Manifest, Output};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const THREADS_ENV: &str = "DECOHERE_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] decohere_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Core(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "decohere", version, about = "Decoherence scenarios for open quantum systems")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lindblad evolution of a qubit register.
    Evolve(RunArgs),
    /// Diffusive quantum trajectories against the master equation.
    Trajectories(RunArgs),
    /// Collisional decoherence: F(Δx) scan and superposition decay.
    Collisional(RunArgs),
    /// Caldeira–Leggett oscillator with Wigner dumps.
    Qbm(RunArgs),
    /// Spin–boson dephasing: exact bath oracle and Born–Markov.
    Spinboson(RunArgs),
    /// Qubit coupled to a spin environment.
    Spinspin(RunArgs),
    /// Predictability sieve ranking of candidate states.
    Sieve(RunArgs),
    /// Decoherence-free subspaces.
    Dfs(RunArgs),
    /// Three-qubit phase-flip code.
    Qec(RunArgs),
    /// Timescale ratio, reference table and visibility vs pressure.
    Estimate(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// TOML config or a run manifest.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Config overrides: `--key value`, `--key=value`, `--flag` or
    /// `--table.key value`. Dashes map to underscores.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0.., value_name = "--KEY VALUE")]
    pub overrides: Vec<String>,
}

/// A configured scenario.
pub trait Scenario: Serialize + DeserializeOwned {
    const NAME: &'static str;

    fn output(&self) -> Option<PathBuf>;

    fn seed(&self) -> Option<u64> {
        None
    }

    /// Writes data files and returns summary lines for stdout.
    fn run(&self, out: &mut Output) -> CliResult<Vec<String>>;
}

fn execute<S: Scenario>(args: &RunArgs, argv: &[String]) -> CliResult<Vec<String>> {
    let start = Instant::now();
    let mut overrides = Overrides::parse(&args.overrides)?;
    let config_path = overrides.take_config().or_else(|| args.config.clone());
    if let Some(out) = &args.out {
        overrides.set("output", serde_json::Value::String(out.display().to_string()));
    }
    if let Some(seed) = args.seed {
        overrides.set("seed", serde_json::Value::from(seed));
    }
    let cfg: S = load_config(config_path.as_deref(), &overrides)?;
    let dir = cfg.output().unwrap_or_else(|| PathBuf::from("out").join(S::NAME));
    let mut out = Output::create(&dir)?;
    let lines = cfg.run(&mut out)?;
    let manifest = Manifest {
        subcommand: S::NAME.to_string(),
        config: serde_json::to_value(&cfg).map_err(|e| CliError::Config(e.to_string()))?,
        seed: cfg.seed(),
        versions: output::versions(),
        arguments: argv.to_vec(),
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: out.files().to_vec(),
    };
    out.write_manifest(&manifest)?;
    Ok(lines)
}

fn dispatch(cli: &Cli, argv: &[String]) -> CliResult<Vec<String>> {
    use scenarios::*;
    match &cli.command {
        Command::Evolve(a) => execute::<evolve::EvolveConfig>(a, argv),
        Command::Trajectories(a) => execute::<evolve::TrajectoriesConfig>(a, argv),
        Command::Collisional(a) => execute::<collisional::CollisionalConfig>(a, argv),
        Command::Qbm(a) => execute::<qbm::QbmConfig>(a, argv),
        Command::Spinboson(a) => execute::<spin::SpinBosonConfig>(a, argv),
        Command::Spinspin(a) => execute::<spin::SpinSpinConfig>(a, argv),
        Command::Sieve(a) => execute::<sieve::SieveConfig>(a, argv),
        Command::Dfs(a) => execute::<dfs::DfsConfig>(a, argv),
        Command::Qec(a) => execute::<qec::QecConfig>(a, argv),
        Command::Estimate(a) => execute::<estimate::EstimateConfig>(a, argv),
    }
}

/// Parses arguments, runs one scenario and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    }
    let argv: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(&cli, &argv) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
