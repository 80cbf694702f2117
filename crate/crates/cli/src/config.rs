//! Experiment configuration (JSON).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use smallball::{QuasiNormSpec, TheoremId, VectorModel};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreakOpt {
    #[default]
    FirstListed,
    MaxAdjacent,
}

impl From<TieBreakOpt> for smallball::TieBreak {
    fn from(t: TieBreakOpt) -> Self {
        match t {
            TieBreakOpt::FirstListed => smallball::TieBreak::FirstListed,
            TieBreakOpt::MaxAdjacent => smallball::TieBreak::MaxAdjacent,
        }
    }
}

/// Theorem selector plus every scalar any bound may take. Values left out
/// are derived from the model and norm where possible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundParams {
    pub theorem: TheoremId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vol_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1_phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighted_integral: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sobolev_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_integral: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lcd_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lcd_step: Option<f64>,
    #[serde(default)]
    pub tie_break: TieBreakOpt,
    /// Report `min(value, 1)`; the raw value stays in `inputs.raw_value`.
    #[serde(default)]
    pub clamp: bool,
}

impl BoundParams {
    pub fn new(theorem: TheoremId) -> Self {
        Self {
            theorem,
            t: None,
            n: None,
            vol_k: None,
            gamma_k: None,
            c_k: None,
            l1_phi: None,
            weighted_integral: None,
            sobolev_norm: None,
            sup_density: None,
            beta: None,
            p: None,
            b: None,
            gamma: None,
            alpha: None,
            c_abs: None,
            x: None,
            lattice_integral: None,
            z_grid: None,
            lattice_samples: None,
            lcd_radius: None,
            lcd_step: None,
            tie_break: TieBreakOpt::FirstListed,
            clamp: false,
        }
    }

    /// Applies `key=value` overrides; values are parsed as JSON, falling back
    /// to a bare string.
    pub fn with_overrides(self, sets: &[String]) -> Result<Self, CliError> {
        if sets.is_empty() {
            return Ok(self);
        }
        let mut v = serde_json::to_value(&self).map_err(|e| CliError::Usage(e.to_string()))?;
        let obj = v.as_object_mut().expect("struct serializes to an object");
        for s in sets {
            let (k, raw) =
                s.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects key=value, got {s:?}")))?;
            let val = serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
            obj.insert(k.trim().to_string(), val);
        }
        serde_json::from_value(v).map_err(|e| CliError::Usage(format!("bad bound parameter: {e}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<VectorModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<QuasiNormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundParams>,
    #[serde(default)]
    pub t_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    /// Theorems tabulated by `sweep`; all that apply when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep_theorems: Vec<TheoremId>,
}

pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 0;

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn confidence(&self) -> f64 {
        self.confidence.unwrap_or(smallball::geometry::DEFAULT_CONFIDENCE)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.samples == Some(0) {
            return Err(CliError::Usage("samples must be >= 1".into()));
        }
        let c = self.confidence();
        if !(c > 0.0 && c < 1.0) {
            return Err(CliError::Usage(format!("confidence must be in (0,1), got {c}")));
        }
        if let Some(t) = self.t_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(CliError::Usage(format!("t_grid entries must be positive, got {t}")));
        }
        if self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage("t_grid must be strictly increasing".into()));
        }
        if let Some(norm) = &self.norm {
            norm.validate()?;
        }
        if let Some(model) = &self.model {
            model.validate()?;
            if let Some(norm) = &self.norm {
                if norm.n != model.dim() {
                    return Err(CliError::Usage(format!(
                        "norm dimension {} does not match model dimension {}",
                        norm.n,
                        model.dim()
                    )));
                }
            }
        }
        Ok(())
    }
}
