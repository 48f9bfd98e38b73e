//! Command-line flags, the optional flat config file, and their merge.
//!
//! The config file holds `key = value` lines (`#` starts a comment) with
//! the same keys as the long flags. A flag given on the command line
//! overrides the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::grid::{parse_ints, parse_reals};

#[derive(Debug, Parser)]
#[command(
    name = "edplab",
    version,
    about = "Entanglement distillation protocol simulator and bound checker"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Seeded random-instance sweeps of the fidelity and Pauli lemmas.
    Lemmas,
    /// Optimizer probes of the 0-bit bounds, and the fidelity-model upper
    /// bound on the hash protocol.
    Bounds,
    /// Evaluate a protocol file against an error model.
    Protocol,
    /// Exact protocol values over a parameter grid.
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => bail!("unknown format `{other}` (json or csv)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    MeasureR,
    Depolarization,
    Fidelity,
}

impl FromStr for ModelKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "measure-r" | "measure" => Ok(ModelKind::MeasureR),
            "depolarization" | "depolar" => Ok(ModelKind::Depolarization),
            "fidelity" => Ok(ModelKind::Fidelity),
            other => bail!("unknown model `{other}` (measure-r, depolarization or fidelity)"),
        }
    }
}

/// Raw flags; every field is optional so the config file can fill gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// measure-r, depolarization (depolar) or fidelity.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Number of input pairs: `2`, `1,3` or `1..3`.
    #[arg(long, global = true)]
    pub n: Option<String>,
    /// Measured pairs for measure-r.
    #[arg(long, global = true)]
    pub r: Option<String>,
    /// Depolarization probability: `0.4`, `0.1,0.2` or `0..1:0.1`.
    #[arg(long, global = true)]
    pub p: Option<String>,
    /// Fidelity-model error `ε`.
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    /// Hash rounds (bits of communication).
    #[arg(long, global = true)]
    pub s: Option<String>,
    /// Ancilla qubits per party for optimizer probes.
    #[arg(long, global = true)]
    pub ancillas: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Optimizer restarts.
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Random instances per lemma.
    #[arg(long, global = true)]
    pub instances: Option<usize>,
    /// Override every lemma's tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Protocol JSON file for `protocol`.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Error model JSON file for `protocol`, instead of model flags.
    #[arg(long = "model-file", global = true)]
    pub model_file: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub model: Option<ModelKind>,
    pub n: Option<Vec<usize>>,
    pub r: Option<Vec<usize>>,
    pub p: Option<Vec<f64>>,
    pub epsilon: Option<Vec<f64>>,
    pub s: Option<Vec<usize>>,
    pub ancillas: Vec<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub instances: usize,
    pub tolerance: Option<f64>,
    pub spec: Option<PathBuf>,
    pub model_file: Option<PathBuf>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_INSTANCES: usize = 1000;

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .with_context(|| format!("{}:{}: expected `key = value`", path.display(), i + 1))?;
        let key = k.trim().replace('_', "-");
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            bail!("{}:{}: `{key}` given twice", path.display(), i + 1);
        }
    }
    Ok(map)
}

const KEYS: &[&str] = &[
    "model",
    "n",
    "r",
    "p",
    "epsilon",
    "s",
    "ancillas",
    "seed",
    "restarts",
    "instances",
    "tolerance",
    "spec",
    "model-file",
    "format",
    "out",
];

fn parsed<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| anyhow::anyhow!("config `{key}`: {e}"))
}

impl Flags {
    /// Fills unset flags from the config file, if one was given.
    pub fn merged(mut self) -> Result<Flags> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let map = read_config_file(&path)?;
        if let Some(bad) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            bail!("{}: unknown key `{bad}`", path.display());
        }
        for (key, value) in &map {
            let v = value.as_str();
            match key.as_str() {
                "model" => fill(&mut self.model, || Ok(v.to_string()))?,
                "n" => fill(&mut self.n, || Ok(v.to_string()))?,
                "r" => fill(&mut self.r, || Ok(v.to_string()))?,
                "p" => fill(&mut self.p, || Ok(v.to_string()))?,
                "epsilon" => fill(&mut self.epsilon, || Ok(v.to_string()))?,
                "s" => fill(&mut self.s, || Ok(v.to_string()))?,
                "ancillas" => fill(&mut self.ancillas, || Ok(v.to_string()))?,
                "seed" => fill(&mut self.seed, || parsed(key, v))?,
                "restarts" => fill(&mut self.restarts, || parsed(key, v))?,
                "instances" => fill(&mut self.instances, || parsed(key, v))?,
                "tolerance" => fill(&mut self.tolerance, || parsed(key, v))?,
                "spec" => fill(&mut self.spec, || Ok(relative_to(&path, v)))?,
                "model-file" => fill(&mut self.model_file, || Ok(relative_to(&path, v)))?,
                "format" => fill(&mut self.format, || v.parse())?,
                "out" => fill(&mut self.out, || Ok(PathBuf::from(v)))?,
                _ => unreachable!("keys checked above"),
            }
        }
        Ok(self)
    }

    pub fn resolve(self, command: Command) -> Result<ExperimentConfig> {
        let flags = self.merged()?;
        let ints = |v: &Option<String>, what: &str| -> Result<Option<Vec<usize>>> {
            v.as_deref()
                .map(|t| parse_ints(t).with_context(|| format!("--{what}")))
                .transpose()
        };
        let reals = |v: &Option<String>, what: &str| -> Result<Option<Vec<f64>>> {
            v.as_deref()
                .map(|t| parse_reals(t).with_context(|| format!("--{what}")))
                .transpose()
        };
        Ok(ExperimentConfig {
            command,
            model: flags.model.as_deref().map(str::parse).transpose()?,
            n: ints(&flags.n, "n")?,
            r: ints(&flags.r, "r")?,
            p: reals(&flags.p, "p")?,
            epsilon: reals(&flags.epsilon, "epsilon")?,
            s: ints(&flags.s, "s")?,
            ancillas: ints(&flags.ancillas, "ancillas")?.unwrap_or_else(|| vec![0]),
            seed: flags.seed.unwrap_or(0),
            restarts: flags.restarts.unwrap_or(DEFAULT_RESTARTS),
            instances: flags.instances.unwrap_or(DEFAULT_INSTANCES),
            tolerance: flags.tolerance,
            spec: flags.spec,
            model_file: flags.model_file,
            format: flags.format.unwrap_or(Format::Json),
            out: flags.out,
        })
    }
}

fn fill<T>(slot: &mut Option<T>, value: impl FnOnce() -> Result<T>) -> Result<()> {
    if slot.is_none() {
        *slot = Some(value()?);
    }
    Ok(())
}

/// Paths inside a config file are relative to the file.
fn relative_to(config: &Path, value: &str) -> PathBuf {
    let p = PathBuf::from(value);
    match config.parent() {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p,
    }
}
