//! Versioned JSON experiment configuration.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::dynamics::SweepConfig;
use crate::error::{Error, Result};
use crate::gates::AnglesJson;
use crate::holonomy::DEFAULT_STEPS;
use crate::models::{PulseEnvelope, Subspace};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: ExperimentRequest,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentRequest {
    Sweep(SweepConfig),
    OneQubitGate { theta: f64, phi: f64 },
    ComposeGate { n: [f64; 3], m: [f64; 3] },
    TwoQubitGate { theta: f64, phi: f64 },
    Synthesize { target: super::format::MatrixJson },
    Holonomy(HolonomyRequest),
}

fn default_pulse() -> PulseEnvelope {
    PulseEnvelope::square_pi(1.0, 0.0).expect("valid default pulse")
}

fn default_grid() -> usize {
    DEFAULT_STEPS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolonomyRequest {
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default = "default_subspace")]
    pub subspace: Subspace,
    #[serde(default = "default_pulse")]
    pub pulse: PulseEnvelope,
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Further loops `(θ, φ)` traversed after the first one.
    #[serde(default)]
    pub compose: Vec<AnglesJson>,
}

fn default_subspace() -> Subspace {
    Subspace::OneQubit
}

impl Default for HolonomyRequest {
    fn default() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
            subspace: default_subspace(),
            pulse: default_pulse(),
            grid: default_grid(),
            compose: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let version: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        match version.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => return Err(Error::Config(format!("`schema_version` {v} is not supported (expected {SCHEMA_VERSION})"))),
            None => return Err(Error::Config("`schema_version` missing or not an integer".into())),
        }
        let cfg: Self = serde_json::from_value(version).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read `{}`: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let angles = |theta: f64, phi: f64| {
            if theta.is_finite() && phi.is_finite() {
                Ok(())
            } else {
                Err(Error::Config("`theta` and `phi` must be finite".into()))
            }
        };
        match &self.experiment {
            ExperimentRequest::Sweep(s) => s.validate(),
            ExperimentRequest::OneQubitGate { theta, phi } | ExperimentRequest::TwoQubitGate { theta, phi } => {
                angles(*theta, *phi)
            }
            ExperimentRequest::ComposeGate { n, m } => {
                for (name, v) in [("n", n), ("m", m)] {
                    if !v.iter().all(|x| x.is_finite()) || v.iter().all(|x| *x == 0.0) {
                        return Err(Error::Config(format!("`{name}` must be a finite non-zero vector")));
                    }
                }
                Ok(())
            }
            ExperimentRequest::Synthesize { target } => {
                let m = target.to_matrix()?;
                if m.shape() != (2, 2) {
                    return Err(Error::Config("`target` must be 2x2".into()));
                }
                Ok(())
            }
            ExperimentRequest::Holonomy(h) => {
                angles(h.theta, h.phi)?;
                if h.compose.iter().any(|a| !(a.theta.is_finite() && a.phi.is_finite())) {
                    return Err(Error::Config("`compose` angles must be finite".into()));
                }
                if h.grid == 0 {
                    return Err(Error::Config("`grid` must be at least 1".into()));
                }
                h.pulse.validate().map_err(|e| Error::Config(format!("`pulse`: {e}")))
            }
        }
    }
}
