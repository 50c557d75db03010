//! Fidelity sweeps over a parameter grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiments::{
    AdiabaticLoopSpec, ExperimentSettings, GateProtocol, NonadiabaticPhaseGate, QubitChannel,
};
use super::sampling::{bloch_sphere_sample, Sampler};
use crate::error::{Error, Result};

/// Trace deviation above which a row is flagged.
pub const TRACE_FLAG: f64 = 1e-8;
/// Eigenvalue below which a row is flagged.
pub const EIGENVALUE_FLAG: f64 = -1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// Grid over `β/γ`.
    NonadiabaticDecay,
    /// Grid over `ΩT`, decay on.
    AdiabaticDecay,
    /// Grid over `ΩT`, decay off.
    AdiabaticNodecay,
}

impl SweepKind {
    pub fn parameter_name(&self) -> &'static str {
        match self {
            SweepKind::NonadiabaticDecay => "beta_over_gamma",
            _ => "omega_t",
        }
    }
}

fn default_n_states() -> usize {
    4000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub grid: Vec<f64>,
    #[serde(default = "default_n_states")]
    pub n_states: usize,
    #[serde(default)]
    pub sampler: Sampler,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub settings: ExperimentSettings,
    /// Repeat every grid point with doubled step counts and report the change.
    #[serde(default)]
    pub verify_step_halving: bool,
}

impl SweepConfig {
    pub fn new(kind: SweepKind, grid: Vec<f64>) -> Self {
        Self {
            kind,
            grid,
            n_states: default_n_states(),
            sampler: Sampler::default(),
            seed: 0,
            settings: ExperimentSettings::default(),
            verify_step_halving: false,
        }
    }

    pub fn with_states(mut self, n: usize) -> Self {
        self.n_states = n;
        self
    }

    pub fn with_settings(mut self, settings: ExperimentSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("`grid` must not be empty".into()));
        }
        if let Some(x) = self.grid.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Config(format!("`grid` values must be positive and finite, got {x}")));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("`grid` must be strictly increasing".into()));
        }
        if self.n_states == 0 {
            return Err(Error::Config("`n_states` must be at least 1".into()));
        }
        self.settings.validate()
    }

    /// The protocol run at grid value `x`.
    pub fn protocol(&self, x: f64) -> Result<Box<dyn GateProtocol>> {
        protocol_for(self.kind, x, &self.settings)
    }
}

fn protocol_for(kind: SweepKind, x: f64, settings: &ExperimentSettings) -> Result<Box<dyn GateProtocol>> {
    Ok(match kind {
        SweepKind::NonadiabaticDecay => Box::new(NonadiabaticPhaseGate::new(x, settings, true)?),
        SweepKind::AdiabaticDecay => Box::new(AdiabaticLoopSpec::new(x, settings, true)?),
        SweepKind::AdiabaticNodecay => Box::new(AdiabaticLoopSpec::new(x, settings, false)?),
    })
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub parameter: f64,
    pub min_fidelity: f64,
    pub avg_fidelity: f64,
    pub max_fidelity: f64,
    pub n_states: usize,
    pub max_trace_dev: f64,
    pub min_eigenvalue: f64,
    /// Largest change of any fidelity when the step counts are doubled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_halving_delta: Option<f64>,
    pub flagged: bool,
    pub warnings: Vec<String>,
}

struct PointResult {
    fidelities: Vec<f64>,
    max_trace_dev: f64,
    min_eigenvalue: f64,
    warnings: Vec<String>,
}

fn evaluate_point(kind: SweepKind, x: f64, settings: &ExperimentSettings, states: &[crate::state::StateVector]) -> Result<PointResult> {
    let channel = QubitChannel::from_protocol(protocol_for(kind, x, settings)?.as_ref(), true)?;
    let mut max_trace_dev = channel.diagnostics.max_trace_deviation;
    let mut min_eigenvalue = channel.diagnostics.min_eigenvalue;
    let mut fidelities = Vec::with_capacity(states.len());
    for psi in states {
        let (f, rho) = channel.fidelity(psi)?;
        max_trace_dev = max_trace_dev.max(rho.trace_deviation());
        min_eigenvalue = min_eigenvalue.min(rho.min_eigenvalue());
        fidelities.push(f);
    }
    Ok(PointResult { fidelities, max_trace_dev, min_eigenvalue, warnings: channel.warnings })
}

fn doubled(settings: &ExperimentSettings) -> ExperimentSettings {
    ExperimentSettings { steps: 2 * settings.steps, gap_steps: 2 * settings.gap_steps, ..*settings }
}

fn point_report(cfg: &SweepConfig, x: f64, states: &[crate::state::StateVector]) -> Result<FidelityReport> {
    let r = evaluate_point(cfg.kind, x, &cfg.settings, states)?;
    let n = r.fidelities.len();
    let min = r.fidelities.iter().copied().fold(f64::INFINITY, f64::min);
    let max = r.fidelities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let avg = (r.fidelities.iter().sum::<f64>() / n as f64).clamp(min, max);
    let step_halving_delta = if cfg.verify_step_halving {
        let fine = evaluate_point(cfg.kind, x, &doubled(&cfg.settings), states)?;
        Some(r.fidelities.iter().zip(&fine.fidelities).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    } else {
        None
    };
    let mut warnings = r.warnings;
    if r.max_trace_dev > TRACE_FLAG {
        warnings.push(format!("trace deviation {:.3e} exceeds {TRACE_FLAG:.0e}", r.max_trace_dev));
    }
    if r.min_eigenvalue < EIGENVALUE_FLAG {
        warnings.push(format!("eigenvalue {:.3e} below {EIGENVALUE_FLAG:.0e}", r.min_eigenvalue));
    }
    Ok(FidelityReport {
        parameter: x,
        min_fidelity: min,
        avg_fidelity: avg,
        max_fidelity: max,
        n_states: n,
        max_trace_dev: r.max_trace_dev,
        min_eigenvalue: r.min_eigenvalue,
        step_halving_delta,
        flagged: !warnings.is_empty(),
        warnings,
    })
}

/// Runs the sweep on the current rayon pool. Rows follow the grid order and do
/// not depend on the number of workers.
pub fn fidelity_sweep(cfg: &SweepConfig) -> Result<Vec<FidelityReport>> {
    cfg.validate()?;
    let states = bloch_sphere_sample(cfg.n_states, cfg.sampler, cfg.seed);
    cfg.grid.par_iter().map(|&x| point_report(cfg, x, &states)).collect()
}

/// Runs the sweep on a dedicated pool of `threads` workers (`0` = one per core).
pub fn fidelity_sweep_with_threads(cfg: &SweepConfig, threads: usize) -> Result<Vec<FidelityReport>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| fidelity_sweep(cfg))
}
