//! Decay experiments on the holonomic phase-shift gate `|k⟩ → e^{ikπ/2}|k⟩`.
//!
//! Non-adiabatic runs use the levels `(0, 1, e, g)` and two sech π pulse
//! pairs; adiabatic runs use `(0, 1, e, g, a)` with a slow loop of the
//! couplings of `|1⟩` and `|a⟩` to `|e⟩`. The excited level decays to `|g⟩`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::evolve::{
    evolve_lindblad_segments, evolve_unitary_segments, parallel_transport_violation, DecayModel,
    LindbladDiagnostics, LindbladOptions, Segment, StepRule,
};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, C64};
use crate::models::lambda::{hamiltonian_unchecked, LambdaParams, LEVEL_0, LEVEL_1, LEVEL_A, LEVEL_E, LEVEL_G};
use crate::models::PulseEnvelope;
use crate::state::{state_fidelity, DensityMatrix, StateVector};

/// Pulse shape used for the non-adiabatic pulse pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseShape {
    /// `β sech(βt)` truncated at `|βt| ≤ 10` (area `π − 1.8e-4`).
    #[default]
    Sech,
    /// Truncated sech rescaled to area exactly π.
    SechRenormalized,
    /// Square pulse of height `β` and area π.
    Square,
}

/// Physical and numerical knobs shared by the decay experiments. Times are
/// measured in units of `1/γ` with `γ = gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSettings {
    pub gamma: f64,
    /// `γΔt`, the separation of the two non-adiabatic pulse pairs.
    pub gamma_dt: f64,
    /// `Ω/γ` of the adiabatic loop.
    pub omega_over_gamma: f64,
    /// Integration steps per pulse window (non-adiabatic) or per run (adiabatic).
    pub steps: usize,
    /// Integration steps for the field-free gap between pulse pairs.
    pub gap_steps: usize,
    pub pulse_shape: PulseShape,
    /// Envelope mass one pulse may deposit in the other's window before the
    /// run is flagged.
    pub overlap_threshold: f64,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            gamma_dt: 8.0,
            omega_over_gamma: 12.5,
            steps: 20_000,
            gap_steps: 2_000,
            pulse_shape: PulseShape::Sech,
            overlap_threshold: 1e-6,
        }
    }
}

impl ExperimentSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64, name: &str| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("`{name}` must be positive and finite, got {x}")))
            }
        };
        positive(self.gamma, "gamma")?;
        positive(self.gamma_dt, "gamma_dt")?;
        positive(self.omega_over_gamma, "omega_over_gamma")?;
        if self.steps == 0 || self.gap_steps == 0 {
            return Err(Error::Config("`steps` and `gap_steps` must be at least 1".into()));
        }
        if !(self.overlap_threshold >= 0.0) {
            return Err(Error::Config("`overlap_threshold` must be non-negative".into()));
        }
        Ok(())
    }
}

/// A gate protocol on a qubit embedded in a larger level scheme.
pub trait GateProtocol: Sync {
    fn dim(&self) -> usize;
    fn hamiltonian(&self, t: f64) -> CMatrix;
    fn segments(&self) -> Vec<Segment>;
    fn decay(&self) -> DecayModel;
    /// Ideal 2×2 gate on `(|0⟩, |1⟩)`.
    fn target(&self) -> CMatrix;
    /// Warnings about the protocol itself (not the integration).
    fn warnings(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Two sech π pulse pairs, `(ω₀, ω₁) = (−1, 1)/√2` at `t = 0` and
/// `(−1, e^{−iπ/4})/√2` at `t = Δt`.
#[derive(Debug, Clone)]
pub struct NonadiabaticPhaseGate {
    pub first: LambdaParams,
    pub second: LambdaParams,
    pub decay: DecayModel,
    settings: ExperimentSettings,
}

impl NonadiabaticPhaseGate {
    pub fn new(beta_over_gamma: f64, settings: &ExperimentSettings, decay_on: bool) -> Result<Self> {
        settings.validate()?;
        if !(beta_over_gamma > 0.0 && beta_over_gamma.is_finite()) {
            return Err(Error::Config(format!("beta/gamma must be positive, got {beta_over_gamma}")));
        }
        let beta = beta_over_gamma * settings.gamma;
        let dt = settings.gamma_dt / settings.gamma;
        let pulse = |center: f64| -> Result<PulseEnvelope> {
            match settings.pulse_shape {
                PulseShape::Sech => PulseEnvelope::sech(beta, center),
                PulseShape::SechRenormalized => PulseEnvelope::sech_renormalized(beta, center),
                PulseShape::Square => PulseEnvelope::square_pi(beta, center - 0.5 * PI / beta),
            }
        };
        let s = c(-FRAC_1_SQRT_2, 0.0);
        let first = LambdaParams::new(s, -s, 0.0, 0.0, pulse(0.0)?)?;
        let second = LambdaParams::new(s, C64::from_polar(FRAC_1_SQRT_2, -PI / 4.0), 0.0, 0.0, pulse(dt)?)?;
        let gamma = if decay_on { settings.gamma } else { 0.0 };
        Ok(Self { first, second, decay: DecayModel::new(gamma, LEVEL_E, LEVEL_G)?, settings: *settings })
    }

    /// Envelope mass each pulse deposits inside the other's window.
    pub fn pulse_overlap(&self) -> f64 {
        let (a1, b1) = self.first.envelope.window();
        let (a2, b2) = self.second.envelope.window();
        self.first.envelope.untruncated_area_between(a2, b2) + self.second.envelope.untruncated_area_between(a1, b1)
    }

    /// Area lost to truncating each pulse at its window.
    pub fn truncation_deficit(&self) -> f64 {
        (PI - self.first.envelope.area()).abs().max((PI - self.second.envelope.area()).abs())
    }
}

impl GateProtocol for NonadiabaticPhaseGate {
    fn dim(&self) -> usize {
        4
    }

    fn hamiltonian(&self, t: f64) -> CMatrix {
        hamiltonian_unchecked(&self.first, t, 4) + hamiltonian_unchecked(&self.second, t, 4)
    }

    fn segments(&self) -> Vec<Segment> {
        let (a1, b1) = self.first.envelope.window();
        let (a2, b2) = self.second.envelope.window();
        let n = self.settings.steps;
        if b1 < a2 {
            vec![Segment::new(a1, b1, n), Segment::new(b1, a2, self.settings.gap_steps), Segment::new(a2, b2, n)]
        } else {
            vec![Segment::new(a1, b2.max(b1), 2 * n)]
        }
    }

    fn decay(&self) -> DecayModel {
        self.decay
    }

    fn target(&self) -> CMatrix {
        let mut u = crate::linalg::identity(2);
        u[(1, 1)] = C64::from_polar(1.0, PI / 2.0);
        u
    }

    fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let (_, b1) = self.first.envelope.window();
        let (a2, _) = self.second.envelope.window();
        if b1 >= a2 {
            w.push("pulse windows overlap; pulses integrated jointly".to_string());
        }
        let overlap = self.pulse_overlap();
        if overlap > self.settings.overlap_threshold {
            w.push(format!("pulse overlap {overlap:.3e} exceeds {:.1e}", self.settings.overlap_threshold));
        }
        w
    }
}

/// Corner points of the adiabatic loop in `(ϑ, φ)`.
pub const ADIABATIC_LOOP: [(f64, f64); 5] = [(0.0, 0.0), (PI / 2.0, 0.0), (PI / 2.0, PI), (0.0, PI), (0.0, 0.0)];

/// Adiabatic loop `H = Ω(ω₁(t/T)|e⟩⟨1| + ω_a(t/T)|e⟩⟨a| + h.c.)` with
/// `ω₁ = sin(ϑ/2)e^{iφ}`, `ω_a = −cos(ϑ/2)`. Each leg takes `T/4` and is
/// traversed at constant parameter speed.
#[derive(Debug, Clone)]
pub struct AdiabaticLoopSpec {
    pub omega: f64,
    pub run_time: f64,
    pub corners: Vec<(f64, f64)>,
    pub decay: DecayModel,
    steps: usize,
}

impl AdiabaticLoopSpec {
    pub fn new(omega_t: f64, settings: &ExperimentSettings, decay_on: bool) -> Result<Self> {
        settings.validate()?;
        if !(omega_t > 0.0 && omega_t.is_finite()) {
            return Err(Error::Config(format!("Omega*T must be positive, got {omega_t}")));
        }
        let omega = settings.omega_over_gamma * settings.gamma;
        let gamma = if decay_on { settings.gamma } else { 0.0 };
        Ok(Self {
            omega,
            run_time: omega_t / omega,
            corners: ADIABATIC_LOOP.to_vec(),
            decay: DecayModel::new(gamma, LEVEL_E, LEVEL_G)?,
            steps: settings.steps,
        })
    }

    /// `(ϑ, φ)` at fractional time `s = t/T ∈ [0, 1]`.
    pub fn angles_at(&self, s: f64) -> (f64, f64) {
        let legs = self.corners.len() - 1;
        let x = (s.clamp(0.0, 1.0) * legs as f64).min(legs as f64);
        let k = (x.floor() as usize).min(legs - 1);
        let u = x - k as f64;
        let (a, b) = (self.corners[k], self.corners[k + 1]);
        (a.0 + u * (b.0 - a.0), a.1 + u * (b.1 - a.1))
    }

    /// `(ω₁, ω_a)` at fractional time `s`.
    pub fn couplings(&self, s: f64) -> (C64, C64) {
        let (theta, phi) = self.angles_at(s);
        (C64::from_polar((0.5 * theta).sin(), phi), c(-(0.5 * theta).cos(), 0.0))
    }

    /// Geometric phase `−∮ sin²(ϑ/2) dφ` picked up by the dark state
    /// `cos(ϑ/2)|1⟩ + sin(ϑ/2)e^{iφ}|a⟩`, by Simpson quadrature per leg.
    pub fn geometric_phase(&self) -> f64 {
        let n = 512;
        self.corners
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let dphi = b.1 - a.1;
                let f = |u: f64| (0.5 * (a.0 + u * (b.0 - a.0))).sin().powi(2);
                let h = 1.0 / n as f64;
                let mut s = f(0.0) + f(1.0);
                for k in 1..n {
                    s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
                }
                -dphi * s * h / 3.0
            })
            .sum()
    }
}

impl GateProtocol for AdiabaticLoopSpec {
    fn dim(&self) -> usize {
        5
    }

    fn hamiltonian(&self, t: f64) -> CMatrix {
        let mut h = CMatrix::zeros(5, 5);
        if !(0.0..=self.run_time).contains(&t) {
            return h;
        }
        let (w1, wa) = self.couplings(t / self.run_time);
        let (w1, wa) = (w1 * self.omega, wa * self.omega);
        h[(LEVEL_E, LEVEL_1)] = w1;
        h[(LEVEL_1, LEVEL_E)] = w1.conj();
        h[(LEVEL_E, LEVEL_A)] = wa;
        h[(LEVEL_A, LEVEL_E)] = wa.conj();
        h
    }

    fn segments(&self) -> Vec<Segment> {
        let legs = self.corners.len() - 1;
        let per_leg = self.steps.div_ceil(legs);
        let leg_time = self.run_time / legs as f64;
        (0..legs)
            .map(|k| Segment::new(k as f64 * leg_time, (k + 1) as f64 * leg_time, per_leg))
            .collect()
    }

    fn decay(&self) -> DecayModel {
        self.decay
    }

    /// `diag(1, e^{iγ_g})` with `γ_g` the loop's geometric phase.
    fn target(&self) -> CMatrix {
        let mut u = crate::linalg::identity(2);
        u[(1, 1)] = C64::from_polar(1.0, self.geometric_phase());
        u
    }
}

/// Embeds a 2×2 qubit operator on `(|0⟩, |1⟩)` into `dim` levels.
fn embed_target(target: &CMatrix, dim: usize) -> CMatrix {
    let mut u = CMatrix::zeros(dim, dim);
    u.view_mut((0, 0), (2, 2)).copy_from(target);
    u
}

/// Outcome of one input state.
#[derive(Debug, Clone)]
pub struct GateRun {
    pub fidelity: f64,
    pub output: DensityMatrix,
    pub diagnostics: LindbladDiagnostics,
    pub warnings: Vec<String>,
}

fn check_qubit_input(input: &StateVector) -> Result<()> {
    if input.dim() != 2 {
        return Err(Error::Dimension(format!("input must be a qubit state, got dimension {}", input.dim())));
    }
    if !input.is_normalized(1e-10) {
        return Err(Error::Precondition("input state is not normalized".into()));
    }
    Ok(())
}

/// Evolves `|ξ⟩⟨ξ|` through the protocol and returns `⟨ξ|U†ϱ_out U|ξ⟩`.
pub fn run_protocol(protocol: &dyn GateProtocol, input: &StateVector) -> Result<GateRun> {
    check_qubit_input(input)?;
    let dim = protocol.dim();
    let rho0 = input.embed(dim)?.to_density();
    let h = |t: f64| protocol.hamiltonian(t);
    let (output, diagnostics) =
        evolve_lindblad_segments(&h, &protocol.decay(), &rho0, &protocol.segments(), &LindbladOptions::default())?;
    let ideal = input.embed(dim)?.apply(&embed_target(&protocol.target(), dim))?;
    let fidelity = state_fidelity(&ideal, &output)?;
    Ok(GateRun { fidelity, output, diagnostics, warnings: protocol.warnings() })
}

/// Non-adiabatic phase-shift gate with decay for one input state.
pub fn nonadiabatic_phase_gate_run(
    beta_over_gamma: f64,
    settings: &ExperimentSettings,
    decay_on: bool,
    input: &StateVector,
) -> Result<GateRun> {
    run_protocol(&NonadiabaticPhaseGate::new(beta_over_gamma, settings, decay_on)?, input)
}

/// Adiabatic phase-shift gate for one input state.
pub fn adiabatic_phase_gate_run(
    omega_t: f64,
    settings: &ExperimentSettings,
    decay_on: bool,
    input: &StateVector,
) -> Result<GateRun> {
    run_protocol(&AdiabaticLoopSpec::new(omega_t, settings, decay_on)?, input)
}

/// Closed-system propagator of a protocol, projected onto `(|0⟩, |1⟩)`.
pub fn projected_unitary(protocol: &dyn GateProtocol, rule: StepRule) -> Result<CMatrix> {
    let h = |t: f64| protocol.hamiltonian(t);
    let u = evolve_unitary_segments(&h, &protocol.segments(), rule)?;
    Ok(u.view((0, 0), (2, 2)).clone_owned())
}

/// Largest `|⟨ψ_k|H|ψ_l⟩|`, `k, l ∈ {0, 1}`, along the closed-system run.
pub fn protocol_transport_violation(protocol: &dyn GateProtocol) -> Result<f64> {
    let h = |t: f64| protocol.hamiltonian(t);
    parallel_transport_violation(&h, &protocol.segments(), &[LEVEL_0, LEVEL_1], StepRule::Midpoint)
}

/// The protocol as a linear map on qubit inputs, stored through its action
/// on `|0⟩, |1⟩, |+⟩, |+i⟩`. Any input is reconstructed exactly by linearity.
#[derive(Debug, Clone)]
pub struct QubitChannel {
    outputs: [CMatrix; 4],
    pub diagnostics: LindbladDiagnostics,
    pub target: CMatrix,
    pub dim: usize,
    pub warnings: Vec<String>,
}

fn probe_states() -> [StateVector; 4] {
    let s = FRAC_1_SQRT_2;
    [
        StateVector::basis(2, 0),
        StateVector::basis(2, 1),
        StateVector::from_slice(&[c(s, 0.0), c(s, 0.0)]),
        StateVector::from_slice(&[c(s, 0.0), c(0.0, s)]),
    ]
}

impl QubitChannel {
    /// Runs the four probe evolutions. `parallel` spreads them over the
    /// current rayon pool; results do not depend on scheduling.
    pub fn from_protocol(protocol: &dyn GateProtocol, parallel: bool) -> Result<Self> {
        use rayon::prelude::*;
        let dim = protocol.dim();
        let probes = probe_states();
        let segments = protocol.segments();
        let decay = protocol.decay();
        let h = |t: f64| protocol.hamiltonian(t);
        let run = |p: &StateVector| -> Result<(DensityMatrix, LindbladDiagnostics)> {
            evolve_lindblad_segments(&h, &decay, &p.embed(dim)?.to_density(), &segments, &LindbladOptions::default())
        };
        let results: Vec<Result<_>> = if parallel {
            probes.par_iter().map(run).collect()
        } else {
            probes.iter().map(run).collect()
        };
        let mut outputs = Vec::with_capacity(4);
        let mut diagnostics: Option<LindbladDiagnostics> = None;
        for r in results {
            let (rho, d) = r?;
            outputs.push(rho.into_inner());
            match diagnostics.as_mut() {
                Some(acc) => acc.merge(&d),
                None => diagnostics = Some(d),
            }
        }
        let outputs: [CMatrix; 4] = outputs.try_into().expect("four probes");
        Ok(Self {
            outputs,
            diagnostics: diagnostics.expect("four probes"),
            target: protocol.target(),
            dim,
            warnings: protocol.warnings(),
        })
    }

    /// Output density matrix for input `α|0⟩ + β|1⟩`.
    pub fn apply(&self, input: &StateVector) -> Result<DensityMatrix> {
        check_qubit_input(input)?;
        let (a, b) = (input.amplitudes()[0], input.amplitudes()[1]);
        let off = a * b.conj();
        let (x, y) = (off.re, -off.im);
        let [p0, p1, pp, pi] = &self.outputs;
        let rho = p0 * c(a.norm_sqr() - x - y, 0.0)
            + p1 * c(b.norm_sqr() - x - y, 0.0)
            + pp * c(2.0 * x, 0.0)
            + pi * c(2.0 * y, 0.0);
        Ok(DensityMatrix::from_raw(rho))
    }

    pub fn fidelity(&self, input: &StateVector) -> Result<(f64, DensityMatrix)> {
        let out = self.apply(input)?;
        let ideal = input.embed(self.dim)?.apply(&embed_target(&self.target, self.dim))?;
        Ok((state_fidelity(&ideal, &out)?, out))
    }
}
