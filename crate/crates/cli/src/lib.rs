//! Command-line front end: validation, analysis, simulation and experiment
//! runs, each leaving a replayable manifest next to its outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use prodnet::dynamics::RunOptions;
use prodnet::economy::Tolerances;
use prodnet::experiments::EnsembleConfig;
use prodnet::network::SpectralOptions;
use prodnet::ode::IntegratorOptions;
use serde::Deserialize;

pub mod commands;
pub mod manifest;

pub use commands::{execute, CliError, Execution};
pub use manifest::{RunConfig, RunManifest, SimMode};

pub const OUT_DIR_ENV: &str = "PRODNET_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "prodnet-out";

#[derive(Debug, Parser)]
#[command(name = "prodnet", version, about = "Production-network growth accounting")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out: Option<PathBuf>,
    /// JSON file with default settings; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Tolerance override `key=value` (row_sum, min_labor_share, share_sum, balance_rel, condition_warn).
    #[arg(long = "tolerance", global = true, value_parser = parse_key_value)]
    pub tolerances: Vec<(String, f64)>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an economy file against every invariant.
    Validate {
        #[arg(long)]
        economy: Option<PathBuf>,
    },
    /// Leontief inverse, multipliers, Domar weights and spectral certificates.
    Analyze {
        #[arg(long)]
        economy: Option<PathBuf>,
        #[arg(long)]
        tfp_config: Option<PathBuf>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Integrate the TFP rate or stock dynamics.
    Simulate(SimulateArgs),
    /// Run an experiment suite.
    Experiment(ExperimentArgs),
    /// Re-run the configuration recorded in a manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub economy: Option<PathBuf>,
    #[arg(long)]
    pub tfp_config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<SimMode>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Initial rates for rate mode, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub gamma0: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Figure1,
    Hulten,
    Prop1,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub name: ExperimentName,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Industries per economy (upper bound for hulten).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub lambda_mean: Option<f64>,
    #[arg(long)]
    pub lambda_spread: Option<f64>,
    /// Mean lambda values for the sign sweep, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sweep: Option<Vec<f64>>,
}

fn parse_key_value(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Settings accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub economy: Option<PathBuf>,
    pub tfp_config: Option<PathBuf>,
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
    pub t_end: Option<f64>,
    pub mode: Option<SimMode>,
    pub gamma0: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub convergence_tol: Option<f64>,
    pub integrator: Option<IntegratorOptions>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub n: Option<usize>,
    pub lambda_mean: Option<f64>,
    pub lambda_spread: Option<f64>,
    pub intermediate_share_range: Option<(f64, f64)>,
    pub sweep: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub spectral: Option<SpectralOptions>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_slice(&bytes).with_context(|| format!("invalid config file {}", path.display()))
    }
}

fn absolute(path: PathBuf) -> anyhow::Result<PathBuf> {
    fs::canonicalize(&path).with_context(|| format!("cannot open {}", path.display()))
}

fn required(flag: Option<PathBuf>, file: Option<PathBuf>, what: &str) -> Result<PathBuf, CliError> {
    let p = flag.or(file).ok_or_else(|| commands::missing(what))?;
    Ok(absolute(p)?)
}

fn tolerances(file: &FileConfig, flags: &[(String, f64)]) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    for (k, v) in file.tolerances.iter().map(|(k, v)| (k.as_str(), *v)).chain(flags.iter().map(|(k, v)| (k.as_str(), *v))) {
        tol.set(k, v).map_err(|e| CliError::Usage(e.into()))?;
    }
    Ok(tol)
}

/// Merges flags over the config file into a fully resolved run.
pub fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let tol = tolerances(&file, &cli.tolerances)?;
    Ok(match cli.command {
        Command::Validate { economy } => RunConfig::Validate {
            economy: required(economy, file.economy, "--economy")?,
            tolerances: tol,
        },
        Command::Analyze {
            economy,
            tfp_config,
            beta,
        } => RunConfig::Analyze {
            economy: required(economy, file.economy, "--economy")?,
            tfp_config: tfp_config.or(file.tfp_config).map(absolute).transpose()?,
            beta: beta.or(file.beta).unwrap_or(1.0),
            tolerances: tol,
            spectral: file.spectral.unwrap_or_default(),
        },
        Command::Simulate(a) => {
            let defaults = RunOptions::default();
            RunConfig::Simulate {
                economy: required(a.economy, file.economy, "--economy")?,
                tfp_config: required(a.tfp_config, file.tfp_config, "--tfp-config")?,
                mode: a.mode.or(file.mode).unwrap_or(SimMode::Rates),
                t_end: a.t_end.or(file.t_end).unwrap_or(100.0),
                gamma0: a.gamma0.or(file.gamma0),
                options: RunOptions {
                    integrator: file.integrator.unwrap_or(defaults.integrator),
                    samples: a.samples.or(file.samples).unwrap_or(defaults.samples),
                    convergence_tol: file.convergence_tol.unwrap_or(defaults.convergence_tol),
                },
                tolerances: tol,
            }
        }
        Command::Experiment(a) => match a.name {
            ExperimentName::Figure1 => RunConfig::Figure1,
            ExperimentName::Hulten => RunConfig::Hulten {
                trials: a.trials.or(file.trials).unwrap_or(100),
                max_n: a.n.or(file.n).unwrap_or(20),
                seed: a.seed.or(file.seed).unwrap_or(0),
            },
            ExperimentName::Prop1 => {
                let d = EnsembleConfig::default();
                let ensemble = EnsembleConfig {
                    n_industries: a.n.or(file.n).unwrap_or(d.n_industries),
                    n_trials: a.trials.or(file.trials).unwrap_or(d.n_trials),
                    seed: a.seed.or(file.seed).unwrap_or(d.seed),
                    intermediate_share_range: file.intermediate_share_range.unwrap_or(d.intermediate_share_range),
                    lambda_mean: a.lambda_mean.or(file.lambda_mean).unwrap_or(d.lambda_mean),
                    lambda_spread: a.lambda_spread.or(file.lambda_spread).unwrap_or(d.lambda_spread),
                    alpha: a.alpha.or(file.alpha).unwrap_or(d.alpha),
                    beta: a.beta.or(file.beta).unwrap_or(d.beta),
                };
                ensemble.validate().map_err(|e| CliError::Usage(e.into()))?;
                RunConfig::Prop1 {
                    ensemble,
                    sweep: a.sweep.or(file.sweep).unwrap_or_default(),
                }
            }
        },
        Command::Replay { manifest } => {
            let m = RunManifest::load(&manifest)?;
            m.verify_inputs()?;
            if m.version != env!("CARGO_PKG_VERSION") {
                log::warn!("manifest written by version {}, replaying with {}", m.version, env!("CARGO_PKG_VERSION"));
            }
            m.config
        }
    })
}

/// Executes a resolved run, writes its outputs and manifest into `out`.
pub fn run_config(config: RunConfig, out: &Path) -> Result<Execution, CliError> {
    let execution = execute(&config)?;
    let names = execution.outputs.iter().map(|(n, _)| n.clone()).collect();
    let manifest = RunManifest::new(config, names)?;
    for (name, bytes) in &execution.outputs {
        manifest::write_atomic(out, name, bytes)?;
    }
    manifest::write_atomic(out, manifest::MANIFEST_NAME, &manifest::to_json(&manifest)?)?;
    Ok(execution)
}

pub fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Parses, resolves and runs; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let out = out_dir(&cli);
    let result = resolve(cli).and_then(|config| run_config(config, &out));
    match result {
        Ok(execution) => {
            print!("{}", execution.summary);
            if execution.failed {
                eprintln!("check failed; see {}", out.display());
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Output files of a finished run, keyed by name, manifest included.
pub fn read_outputs(dir: &Path) -> anyhow::Result<BTreeMap<String, Vec<u8>>> {
    let manifest = RunManifest::load(&dir.join(manifest::MANIFEST_NAME))?;
    let mut files = BTreeMap::new();
    for name in manifest.outputs.iter().map(String::as_str).chain([manifest::MANIFEST_NAME]) {
        let bytes = fs::read(dir.join(name)).map_err(|e| anyhow!("cannot read {name}: {e}"))?;
        files.insert(name.to_string(), bytes);
    }
    Ok(files)
}
