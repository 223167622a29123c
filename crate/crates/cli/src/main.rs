//! `hscale` command-line runner.
//!
//! Exit codes: 0 success, 1 runtime error, 2 a check failed, 64 usage error,
//! 65 invalid config.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::{BoundsConfig, DecomposeConfig, DistanceConfig, EffdimConfig, FiltersConfig, Outcome};
use crate::config::ConfigError;
use hscale::harness::{sha256_hex, ExperimentConfig};

const EXIT_FAIL: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_CONFIG: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "hscale", version, about = "Spectral regularization in Hilbert scales: experiments and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file; the built-in default is used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for trial-level parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Dotted-path override, e.g. `--set trials_per_m=20`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Monte Carlo convergence-rate experiment.
    Rate,
    /// Effective-dimension curve and exponent fit.
    Effdim,
    /// Coverage of the concentration bounds.
    Bounds,
    /// Distance-function curve.
    Distance,
    /// Filter constants, qualification and saturation.
    FiltersCheck,
    /// Nystrom eigen-decomposition of a kernel.
    Decompose,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Rate => "rate",
            Command::Effdim => "effdim",
            Command::Bounds => "bounds",
            Command::Distance => "distance",
            Command::FiltersCheck => "filters-check",
            Command::Decompose => "decompose",
        }
    }
}

enum Failure {
    Config(ConfigError),
    Runtime(anyhow::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(Failure::Config(e)) => {
            eprintln!("config error {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load<T>(cli: &Cli, default: T) -> Result<T, ConfigError>
where
    T: serde::de::DeserializeOwned + Serialize,
{
    config::load(cli.config.as_deref(), default, &cli.overrides)
}

fn semantic(e: hscale::Error) -> ConfigError {
    ConfigError { pointer: String::new(), message: e.to_string() }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError { pointer: String::new(), message: "--threads must be positive".into() }.into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow::anyhow!("thread pool: {e}"))?;
    }
    let out = cli.out.as_path();
    let (outcome, effective, seed) = match cli.command {
        Command::Rate => {
            let mut cfg = load(cli, ExperimentConfig::default_regular())?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            cfg.validate().map_err(semantic)?;
            prepare(out)?;
            (commands::rate(&cfg, out)?, to_value(&cfg)?, Some(cfg.seed))
        }
        Command::Effdim => {
            let cfg = load(cli, EffdimConfig::default())?;
            prepare(out)?;
            (commands::effdim(&cfg, out)?, to_value(&cfg)?, None)
        }
        Command::Bounds => {
            let mut cfg = load(cli, BoundsConfig::default())?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            prepare(out)?;
            (commands::bounds(&cfg, out)?, to_value(&cfg)?, Some(cfg.seed))
        }
        Command::Distance => {
            let cfg = load(cli, DistanceConfig::default())?;
            prepare(out)?;
            (commands::distance(&cfg, out)?, to_value(&cfg)?, None)
        }
        Command::FiltersCheck => {
            let cfg = load(cli, FiltersConfig::default())?;
            prepare(out)?;
            (commands::filters_check(&cfg, out)?, to_value(&cfg)?, None)
        }
        Command::Decompose => {
            let cfg = load(cli, DecomposeConfig::default())?;
            prepare(out)?;
            (commands::decompose(&cfg, out)?, to_value(&cfg)?, None)
        }
    };
    write_manifest(cli, out, &outcome, effective, seed)?;
    Ok(outcome)
}

fn prepare(out: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(out).map_err(|e| anyhow::anyhow!("creating {}: {e}", out.display()))
}

fn to_value<T: Serialize>(cfg: &T) -> anyhow::Result<Value> {
    Ok(serde_json::to_value(cfg)?)
}

fn write_manifest(cli: &Cli, out: &Path, outcome: &Outcome, config: Value, seed: Option<u64>) -> anyhow::Result<()> {
    let config_hash = sha256_hex(serde_json::to_string(&config)?.as_bytes());
    let mut outputs = serde_json::Map::new();
    for f in &outcome.files {
        let bytes = std::fs::read(f)?;
        let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        outputs.insert(name, Value::String(sha256_hex(&bytes)));
    }
    let manifest = json!({
        "command": cli.command.name(),
        "config": config,
        "config_hash": config_hash,
        "seed": seed,
        "versions": {
            "hscale": env!("CARGO_PKG_VERSION"),
            "arch": std::env::consts::ARCH,
        },
        "threads": rayon::current_num_threads(),
        "outputs": outputs,
        "pass": outcome.pass,
    });
    std::fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}
