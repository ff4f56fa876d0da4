//! JSON configuration files with `key=value` overrides.
//!
//! Precedence, lowest first: the file, the `NLS_SEED` environment
//! variable (for configs with a `seed` key), then `--set` overrides.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::convergence::ExperimentConfig;
use crate::error::{Error, Result};
use crate::integrators::{validate_mu, StepperConfig};
use crate::norms::BourgainParams;
use crate::rough_data::RoughDataSpec;
use crate::spectral::Grid2D;

pub const SEED_ENV: &str = "NLS_SEED";

/// `generate`: parameters of the random initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub s: f64,
    pub seed: u64,
    #[serde(rename = "M")]
    pub m: usize,
}

impl GenerateConfig {
    pub fn spec(&self) -> Result<RoughDataSpec> {
        let grid = Grid2D::new(self.m).map_err(|e| Error::config("M", e.to_string()))?;
        RoughDataSpec::new(self.s, self.seed, grid).map_err(|e| Error::config("s", e.to_string()))
    }
}

fn default_true() -> bool {
    true
}

fn default_mu() -> i32 {
    -1
}

/// `run`: integrate a stored snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Initial field in the binary snapshot format.
    pub input: PathBuf,
    pub tau: f64,
    pub steps: usize,
    #[serde(default = "default_mu")]
    pub mu: i32,
    #[serde(default = "default_true")]
    pub filtered: bool,
    #[serde(default)]
    pub dealias: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn stepper(&self) -> Result<StepperConfig> {
        validate_mu(self.mu).map_err(|e| Error::config("mu", e.to_string()))?;
        Ok(StepperConfig::new(self.tau, self.mu)
            .map_err(|e| Error::config("tau", e.to_string()))?
            .filtered(self.filtered)
            .dealias(self.dealias))
    }

    pub fn validate(&self) -> Result<()> {
        self.stepper()?;
        if self.snapshot_every == Some(0) {
            return Err(Error::config("snapshot_every", "must be positive"));
        }
        Ok(())
    }
}

fn default_b1() -> f64 {
    0.6
}

/// `diagnose`: Bourgain-norm and Strichartz diagnostics of filtered Lie
/// trajectories, one sequence per time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    /// Regularity of the random initial data.
    pub data_s: f64,
    pub seed: u64,
    #[serde(rename = "M")]
    pub m: usize,
    /// Length of every sequence in time.
    #[serde(rename = "T")]
    pub final_time: f64,
    pub taus: Vec<f64>,
    #[serde(default = "default_mu")]
    pub mu: i32,
    /// Bourgain-norm parameters.
    pub s: f64,
    pub b: f64,
    /// Time regularity for the Strichartz and embedding ratios.
    #[serde(default = "default_b1")]
    pub b1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl DiagnoseConfig {
    pub fn data(&self) -> Result<RoughDataSpec> {
        GenerateConfig {
            s: self.data_s,
            seed: self.seed,
            m: self.m,
        }
        .spec()
        .map_err(|e| match e {
            Error::Config { key, reason } if key == "s" => Error::config("data_s", reason),
            other => other,
        })
    }

    /// Sequence length for time step `tau`.
    pub fn steps(&self, tau: f64) -> Result<usize> {
        let n = (self.final_time / tau).round();
        if !(tau > 0.0 && tau <= 1.0)
            || n < 1.0
            || (n * tau - self.final_time).abs() > 1e-9 * self.final_time
        {
            return Err(Error::config(
                "taus",
                format!(
                    "T = {} is not a positive multiple of {tau}",
                    self.final_time
                ),
            ));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.data()?;
        validate_mu(self.mu).map_err(|e| Error::config("mu", e.to_string()))?;
        if !(self.final_time.is_finite() && self.final_time > 0.0) {
            return Err(Error::config("T", "must be a positive time"));
        }
        if self.taus.is_empty() {
            return Err(Error::config("taus", "at least one time step is required"));
        }
        for &tau in &self.taus {
            self.steps(tau)?;
        }
        BourgainParams::new(self.s, self.b).map_err(|e| Error::config("s", e.to_string()))?;
        if !(self.s > 0.0) {
            return Err(Error::config(
                "s",
                "must be positive for the Strichartz ratio",
            ));
        }
        if !(self.b1 > 0.5) {
            return Err(Error::config("b1", "must exceed 1/2"));
        }
        Ok(())
    }
}

/// `resolution`: an experiment plus the grid sizes to compare.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionConfig {
    pub experiment: ExperimentConfig,
    pub grids: Vec<usize>,
}

/// Parses `key=value`. The value is read as JSON when possible (a leading
/// `+` on numbers is accepted), otherwise as a string.
pub fn parse_override(raw: &str) -> Result<(String, Value)> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| Error::config(raw, "override must look like key=value"))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::config(raw, "empty key"));
    }
    let value = value.trim();
    let parsed = serde_json::from_str(value)
        .or_else(|_| serde_json::from_str(value.strip_prefix('+').unwrap_or("\u{0}")))
        .unwrap_or_else(|_| Value::String(value.to_string()));
    Ok((key.to_string(), parsed))
}

fn load_object(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match serde_json::from_str::<Value>(&text)? {
        Value::Object(map) => Ok(map),
        _ => Err(Error::config("<root>", "config must be a JSON object")),
    }
}

fn apply_overrides(
    map: &mut Map<String, Value>,
    overrides: &[String],
    seed_env: Option<&str>,
) -> Result<()> {
    if let Some(raw) = seed_env {
        let seed: u64 = raw.trim().parse().map_err(|_| {
            Error::config(
                "seed",
                format!("{SEED_ENV}={raw} is not an unsigned integer"),
            )
        })?;
        map.insert("seed".into(), Value::from(seed));
    }
    for raw in overrides {
        let (key, value) = parse_override(raw)?;
        map.insert(key, value);
    }
    Ok(())
}

fn deserialize<T: DeserializeOwned>(map: Map<String, Value>) -> Result<T> {
    serde_path_to_error::deserialize(Value::Object(map)).map_err(|e| {
        let key = e.path().to_string();
        let inner = e.into_inner().to_string();
        let key = if key == "." {
            // unknown or missing fields surface at the root; the message names them
            inner
                .split('`')
                .nth(1)
                .map_or_else(|| "<root>".to_string(), str::to_string)
        } else {
            key
        };
        Error::config(key, inner)
    })
}

/// Loads and overrides a config object without validating its schema.
pub fn load(path: &Path, overrides: &[String], with_seed_env: bool) -> Result<Map<String, Value>> {
    let mut map = load_object(path)?;
    let env = if with_seed_env {
        std::env::var(SEED_ENV).ok()
    } else {
        None
    };
    apply_overrides(&mut map, overrides, env.as_deref())?;
    Ok(map)
}

pub fn from_map<T: DeserializeOwned>(map: Map<String, Value>) -> Result<T> {
    deserialize(map)
}

pub fn parse_generate(path: &Path, overrides: &[String]) -> Result<GenerateConfig> {
    let cfg: GenerateConfig = from_map(load(path, overrides, true)?)?;
    cfg.spec()?;
    Ok(cfg)
}

pub fn parse_run(path: &Path, overrides: &[String]) -> Result<RunConfig> {
    let cfg: RunConfig = from_map(load(path, overrides, false)?)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_experiment(path: &Path, overrides: &[String]) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = from_map(load(path, overrides, true)?)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_resolution(path: &Path, overrides: &[String]) -> Result<ResolutionConfig> {
    let mut map = load(path, overrides, true)?;
    let grids = map
        .remove("grids")
        .ok_or_else(|| Error::config("grids", "missing list of grid sizes"))?;
    let grids: Vec<usize> =
        serde_json::from_value(grids).map_err(|e| Error::config("grids", e.to_string()))?;
    if grids.is_empty() {
        return Err(Error::config("grids", "at least one grid size is required"));
    }
    // `M` is optional here; each sweep uses its own grid size
    map.entry("M").or_insert_with(|| Value::from(grids[0]));
    let experiment: ExperimentConfig = from_map(map)?;
    for &m in &grids {
        ExperimentConfig {
            m,
            ..experiment.clone()
        }
        .validate()
        .map_err(|e| Error::config("grids", format!("M = {m}: {e}")))?;
    }
    Ok(ResolutionConfig { experiment, grids })
}

pub fn parse_diagnose(path: &Path, overrides: &[String]) -> Result<DiagnoseConfig> {
    let cfg: DiagnoseConfig = from_map(load(path, overrides, true)?)?;
    cfg.validate()?;
    Ok(cfg)
}
