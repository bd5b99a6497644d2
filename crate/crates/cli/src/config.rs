//! Experiment configuration: a JSON document, optionally layered over a
//! built-in preset, with `--set dotted.path=value` overrides.

use std::path::{Path, PathBuf};

use abc_shadow::mcmc::aux::AuxMhConfig;
use abc_shadow::mcmc::direct::DirectMhConfig;
use abc_shadow::posterior::TABLE_QUANTILES;
use abc_shadow::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::result::Result;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSource {
    pub path: PathBuf,
    #[serde(default)]
    pub window: Option<Window>,
    #[serde(default)]
    pub normalize: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbcSettings {
    pub prior: BoxPrior,
    pub n_draws: usize,
    /// Rejection tolerance. If absent, `quantile` of the simulated distances is used.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub quantile: Option<f64>,
    /// Neighbours kept by `abc-knn`.
    #[serde(default)]
    pub k: Option<usize>,
    /// Prior-predictive draws used to standardize the distance; 0 means plain Euclidean.
    #[serde(default)]
    pub pilot: usize,
    #[serde(default)]
    pub aux: PpSamplerConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRun {
    pub delta: Vec<f64>,
    pub initial: ParameterVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummarySettings {
    pub u: UGrid,
    pub n_sim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorSettings {
    /// One estimate per range in `ranges`, or a single one.
    pub theta_hat: Vec<ParameterVector>,
    pub n_sim: usize,
    #[serde(default)]
    pub aux: PpSamplerConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardSettings {
    pub theta: ParameterVector,
    pub samples: usize,
    pub aux: PpSamplerConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub t_obs: Option<Vec<f64>>,
    #[serde(default)]
    pub pattern: Option<PatternSource>,
    /// Interaction ranges to sweep; each replaces the model's range.
    #[serde(default)]
    pub ranges: Option<Vec<f64>>,
    #[serde(default)]
    pub shadow: Option<ShadowConfig>,
    #[serde(default)]
    pub direct: Option<DirectMhConfig>,
    #[serde(default)]
    pub aux_mh: Option<AuxMhConfig>,
    #[serde(default)]
    pub abc: Option<AbcSettings>,
    #[serde(default)]
    pub sweep: Option<Vec<SweepRun>>,
    #[serde(default)]
    pub forward: Option<ForwardSettings>,
    #[serde(default)]
    pub summaries: Option<SummarySettings>,
    #[serde(default)]
    pub errors: Option<ErrorSettings>,
    #[serde(default = "default_quantiles")]
    pub quantiles: Vec<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_quantiles() -> Vec<f64> {
    TABLE_QUANTILES.to_vec()
}

impl ExperimentConfig {
    pub fn need<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        field.as_ref().ok_or_else(|| CliError::config(format!("config is missing `{name}`")))
    }

    pub fn model(&self) -> Result<&ModelSpec, CliError> {
        Self::need(&self.model, "model")
    }
}

/// Built-in starting documents. Seeds are never part of a preset.
pub fn preset(subcommand: &str) -> Value {
    let gauss_prior = json!({ "lower": [-100.0, 0.0], "upper": [100.0, 200.0] });
    let gauss = json!({ "kind": "gaussian", "m": 1000 });
    let gauss_t = json!([1765.45, 12145.83]);
    match subcommand {
        "gaussian-bench" => json!({
            "model": gauss, "t_obs": gauss_t,
            "shadow": { "delta": [0.005, 0.025], "inner_steps": 500, "outer_iterations": 25000, "burn_in": 1000, "thinning": 25,
                        "initial": [2.0, 9.0], "prior": gauss_prior },
            "direct": { "widths": [0.5, 0.5], "iterations": 12_500_000, "thinning": 12_500,
                        "initial": [2.0, 9.0], "prior": gauss_prior },
        }),
        "delta-sweep" => json!({
            "model": gauss, "t_obs": gauss_t,
            "shadow": { "delta": [0.005, 0.025], "inner_steps": 500, "outer_iterations": 25000, "burn_in": 1000, "thinning": 25,
                        "initial": [2.0, 9.0], "prior": gauss_prior },
            "sweep": [
                { "delta": [0.001, 0.005], "initial": [2.0, 9.0] },
                { "delta": [0.1, 0.1], "initial": [2.0, 9.0] },
                { "delta": [0.01, 0.05], "initial": [2.0, 9.0] },
                { "delta": [0.005, 0.025], "initial": [2.0, 9.0] },
                { "delta": [0.005, 0.025], "initial": [10.0, 20.0] },
                { "delta": [0.005, 0.025], "initial": [-10.0, 1.0] },
            ],
        }),
        "strauss-bench" => json!({
            "model": { "kind": "strauss", "r": 0.1, "window": { "lower": [0.0, 0.0], "upper": [1.0, 1.0] } },
            "t_obs": [34.33, 5.31],
            "shadow": { "delta": [0.01, 0.01], "inner_steps": 200, "outer_iterations": 100_000, "burn_in": 5000, "thinning": 100,
                        "aux": { "sweeps": 100 }, "initial": [4.5, -2.5],
                        "prior": { "lower": [3.5, -5.0], "upper": [5.5, 0.0] } },
            "forward": { "theta": [4.60, -1.60], "samples": 1000, "aux": { "sweeps": 100 } },
        }),
        "candy-bench" => json!({
            "model": { "kind": "candy", "length": 0.12, "connect_range": 0.01, "connect_curvature": 0.5,
                       "reject_curvature": 0.5, "window": { "lower": [0.0, 0.0], "upper": [3.0, 1.0] } },
            "t_obs": [51.10, 101.06, 19.97, 72.89],
            "shadow": { "delta": [0.01, 0.01, 0.01, 0.01], "inner_steps": 500, "outer_iterations": 50_000, "burn_in": 2500, "thinning": 50,
                        "aux": { "sweeps": 500, "attach_fraction": 0.5 }, "initial": [7.0, 7.0, 7.0, -3.5],
                        "prior": { "lower": [2.0, 2.0, 2.0, -7.0], "upper": [12.0, 12.0, 12.0, 0.0] } },
            "forward": { "theta": [10.0, 7.0, 3.0, -1.0], "samples": 1000, "aux": { "sweeps": 2000, "attach_fraction": 0.5 } },
        }),
        "envelope" => json!({
            "summaries": { "u": [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1], "n_sim": 100 },
        }),
        "abc-reject" | "abc-knn" => json!({
            "model": gauss, "t_obs": gauss_t,
            "abc": { "prior": { "lower": [0.5, 6.0], "upper": [3.5, 14.0] }, "n_draws": 10_000,
                     "quantile": 0.05, "k": 500, "pilot": 1000 },
        }),
        "aux-mh" => json!({
            "model": gauss, "t_obs": gauss_t,
            "aux_mh": { "widths": [0.05, 0.25], "iterations": 100_000, "thinning": 100, "initial": [2.0, 9.0],
                        "prior": gauss_prior, "reference": [1.76545, 9.0288] },
        }),
        _ => json!({}),
    }
}

/// Recursively overlays `top` onto `base`; objects merge, everything else replaces.
pub fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, t) => *b = t,
    }
}

/// Applies `a.b.c=value`. The value is parsed as JSON, falling back to a string.
pub fn apply_override(doc: &mut Value, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override {spec:?} is not of the form path=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = doc;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        if key.is_empty() {
            return Err(CliError::config(format!("empty key in override path {path:?}")));
        }
        let last = i + 1 == keys.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), value);
                    return Ok(());
                }
                map.entry(key.to_string()).or_insert_with(|| json!({}))
            }
            Value::Array(items) => {
                let idx: usize = key.parse().map_err(|_| {
                    CliError::config(format!("{key:?} in {path:?} indexes an array and must be a number"))
                })?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| CliError::config(format!("index {idx} out of range ({len}) in {path:?}")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(CliError::config(format!("{path:?} descends into a non-object"))),
        };
    }
    Ok(())
}

/// Preset, then the config file, then overrides, then `--seed`.
pub fn resolve(
    subcommand: &str,
    file: Option<&Path>,
    overrides: &[String],
    seed: Option<u64>,
) -> Result<(ExperimentConfig, Value), CliError> {
    let mut doc = preset(subcommand);
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
        let user: Value =
            serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        merge(&mut doc, user);
    }
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    if let Some(s) = seed {
        doc["seed"] = json!(s);
    }
    if doc.get("seed").is_none() {
        return Err(CliError::config("a seed is required (--seed or \"seed\" in the config)"));
    }
    let cfg: ExperimentConfig = serde_json::from_value(doc.clone()).map_err(|e| CliError::config(e.to_string()))?;
    if let Some(m) = &cfg.model {
        m.validate().map_err(CliError::from)?;
    }
    Ok((cfg, doc))
}
