//! Config files and their merge with command-line flags.
//!
//! A config file holds the model keys (`body`, `fields`, `trap` or
//! `dimensionless`) and an optional `run` block with the subcommand's
//! options under the same names as the flags, in snake_case. The run block
//! may also set `out`, `format` and `workers`. Flags win.

use crate::output::Format;
use crate::Failure;
use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};
use tcrystal_core::config::{FieldsSpec, ModelConfig, ResolvedModel, TrapSpec};
use tcrystal_core::{BodySpec, DimlessParams};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    body: Option<BodySpec>,
    fields: Option<FieldsSpec>,
    trap: Option<TrapSpec>,
    dimensionless: Option<DimlessParams>,
    run: Option<Map<String, Value>>,
}

#[derive(Debug, Default)]
pub struct Loaded {
    pub model: ModelConfig,
    pub run: Map<String, Value>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunGlobals {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
}

pub fn load(path: Option<&Path>) -> Result<Loaded, Failure> {
    let Some(path) = path else { return Ok(Loaded::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let file: ConfigFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("{}: line {} column {}: {e}", path.display(), e.line(), e.column())))?;
    Ok(Loaded {
        model: ModelConfig { body: file.body, fields: file.fields, trap: file.trap, dimensionless: file.dimensionless },
        run: file.run.unwrap_or_default(),
    })
}

/// Splits the global keys off the run block.
pub fn take_globals(run: &mut Map<String, Value>) -> Result<RunGlobals, Failure> {
    let mut g = Map::new();
    for k in ["out", "format", "workers"] {
        if let Some(v) = run.remove(k) {
            g.insert(k.to_string(), v);
        }
    }
    serde_json::from_value(Value::Object(g)).map_err(|e| Failure::Config(format!("run: {e}")))
}

/// Overlays the flags that were given onto the run block and parses the
/// result. Absent flags serialize as null and unset switches as false;
/// neither overrides the file.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, run: &Map<String, Value>) -> Result<T, Failure> {
    let mut merged = run.clone();
    if let Value::Object(given) = serde_json::to_value(flags).expect("flags serialize") {
        for (k, v) in given {
            if !(v.is_null() || v == Value::Bool(false)) {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Failure::Config(format!("run: {e}")))
}

#[derive(Debug, Default, Clone, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    /// m1/m3
    #[arg(long)]
    pub mu: Option<f64>,
    /// e1/e3
    #[arg(long)]
    pub nu: Option<f64>,
    /// torsional stiffness ratio, potential -eta^2 cos(beta) - cos(alpha)
    #[arg(long)]
    pub eta: Option<f64>,
    /// quality factor b/sqrt(m3 u2)
    #[arg(long)]
    pub q: Option<f64>,
    /// B_Z/B_Y
    #[arg(long)]
    pub a: Option<f64>,
}

impl ModelArgs {
    fn any(&self) -> bool {
        [self.mu, self.nu, self.eta, self.q, self.a].iter().any(Option::is_some)
    }
}

pub const DEFAULT_Q: f64 = 10.0;

/// Model from the config file, with any flag overriding the corresponding
/// dimensionless number. Without either, `μ = ν = η = 1`, `q = 10`.
pub fn resolve_model(cfg: &ModelConfig, flags: &ModelArgs) -> Result<ResolvedModel, Failure> {
    let base = if cfg.is_empty() {
        ResolvedModel { physical: None, dimless: DimlessParams::symmetric(DEFAULT_Q).expect("valid") }
    } else {
        cfg.resolve().map_err(|e| Failure::Config(e.to_string()))?
    };
    if !flags.any() {
        return Ok(base);
    }
    let d = base.dimless;
    let dimless = DimlessParams::new(
        flags.mu.unwrap_or(d.mu),
        flags.nu.unwrap_or(d.nu),
        flags.eta.unwrap_or(d.eta),
        flags.q.unwrap_or(d.q),
        flags.a.unwrap_or(d.a),
    )
    .map_err(|e| Failure::Config(e.to_string()))?;
    // a dimensionful block no longer describes the overridden model
    Ok(ResolvedModel { physical: None, dimless })
}

/// `q` for commands that only need the quality factor: flag or run key,
/// else the config's model, else the default.
pub fn quality(explicit: Option<f64>, cfg: &ModelConfig) -> Result<f64, Failure> {
    match explicit {
        Some(q) => Ok(q),
        None if cfg.is_empty() => Ok(DEFAULT_Q),
        None => Ok(cfg.resolve().map_err(|e| Failure::Config(e.to_string()))?.dimless.q),
    }
}
