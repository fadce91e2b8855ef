use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use prodnet::dynamics::RunOptions;
use prodnet::economy::Tolerances;
use prodnet::experiments::EnsembleConfig;
use prodnet::network::SpectralOptions;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    Rates,
    Stocks,
}

/// Fully resolved configuration of one run. Everything a replay needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunConfig {
    Validate {
        economy: PathBuf,
        tolerances: Tolerances,
    },
    Analyze {
        economy: PathBuf,
        tfp_config: Option<PathBuf>,
        beta: f64,
        tolerances: Tolerances,
        spectral: SpectralOptions,
    },
    Simulate {
        economy: PathBuf,
        tfp_config: PathBuf,
        mode: SimMode,
        t_end: f64,
        gamma0: Option<Vec<f64>>,
        options: RunOptions,
        tolerances: Tolerances,
    },
    Figure1,
    Hulten {
        trials: usize,
        max_n: usize,
        seed: u64,
    },
    Prop1 {
        ensemble: EnsembleConfig,
        sweep: Vec<f64>,
    },
}

impl RunConfig {
    pub fn command(&self) -> &'static str {
        match self {
            Self::Validate { .. } => "validate",
            Self::Analyze { .. } => "analyze",
            Self::Simulate { .. } => "simulate",
            Self::Figure1 => "experiment figure1",
            Self::Hulten { .. } => "experiment hulten",
            Self::Prop1 { .. } => "experiment prop1",
        }
    }

    pub fn input_paths(&self) -> Vec<&Path> {
        match self {
            Self::Validate { economy, .. } => vec![economy],
            Self::Analyze { economy, tfp_config, .. } => {
                let mut v = vec![economy.as_path()];
                v.extend(tfp_config.as_deref());
                v
            }
            Self::Simulate { economy, tfp_config, .. } => vec![economy, tfp_config],
            Self::Figure1 | Self::Hulten { .. } | Self::Prop1 { .. } => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputRef {
    pub path: PathBuf,
    pub sha256: String,
}

impl InputRef {
    pub fn hash(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        Ok(Self {
            path: path.to_path_buf(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        })
    }
}

/// Written next to every run's outputs. Holds no timestamps or output
/// locations, so a replay rewrites it byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub inputs: Vec<InputRef>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(config: RunConfig, outputs: Vec<String>) -> Result<Self> {
        let inputs = config
            .input_paths()
            .into_iter()
            .map(InputRef::hash)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: config.command().to_string(),
            config,
            inputs,
            outputs,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_slice(&bytes).with_context(|| format!("malformed manifest {}", path.display()))
    }

    /// Fails when any input changed since the manifest was written.
    pub fn verify_inputs(&self) -> Result<()> {
        for input in &self.inputs {
            let now = InputRef::hash(&input.path)?;
            if now.sha256 != input.sha256 {
                anyhow::bail!(
                    "input {} changed since the run (sha256 {} != {})",
                    input.path.display(),
                    now.sha256,
                    input.sha256
                );
            }
        }
        Ok(())
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, &target).with_context(|| format!("cannot move output into {}", target.display()))?;
    Ok(())
}
