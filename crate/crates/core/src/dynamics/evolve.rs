//! Time-ordered Schrödinger propagators and a fixed-step Lindblad integrator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, commutator, hermiticity_error, hermitize, identity, unitary_propagator, CMatrix, I};
use crate::state::DensityMatrix;

/// A stretch of time integrated with a uniform step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Segment {
    pub fn new(start: f64, end: f64, steps: usize) -> Self {
        Self { start, end, steps }
    }

    pub fn step(&self) -> f64 {
        (self.end - self.start) / self.steps as f64
    }

    fn check(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Resolution("segment needs at least one step".into()));
        }
        if !(self.end >= self.start) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::Precondition(format!("bad segment [{}, {}]", self.start, self.end)));
        }
        Ok(())
    }
}

/// Per-step propagator rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepRule {
    /// `exp(−i H(t + h/2) h)`.
    #[default]
    Midpoint,
    /// Fourth-order Magnus step over two Gauss–Legendre nodes.
    Magnus4,
}

const HERMITIAN_SAMPLE_TOL: f64 = 1e-12;

fn sample<F: Fn(f64) -> CMatrix>(h: &F, t: f64) -> Result<CMatrix> {
    let m = h(t);
    let err = hermiticity_error(&m);
    if err > HERMITIAN_SAMPLE_TOL * m.norm().max(1.0) {
        return Err(Error::Model(format!("Hamiltonian at t = {t} is not Hermitian (error {err:.3e})")));
    }
    Ok(m)
}

fn step_propagator<F: Fn(f64) -> CMatrix>(h: &F, t: f64, dt: f64, rule: StepRule) -> Result<CMatrix> {
    match rule {
        StepRule::Midpoint => Ok(unitary_propagator(&sample(h, t + 0.5 * dt)?, dt)),
        StepRule::Magnus4 => {
            let off = 3f64.sqrt() / 6.0;
            let h1 = sample(h, t + (0.5 - off) * dt)?;
            let h2 = sample(h, t + (0.5 + off) * dt)?;
            // Ω = −i h/2 (H1 + H2) − (√3/12) h² [H2, H1]; exponent = −i·G·h, G Hermitian
            let g = (&h1 + &h2) * c(0.5, 0.0) + commutator(&h2, &h1) * (-I * (3f64.sqrt() / 12.0 * dt));
            Ok(unitary_propagator(&hermitize(&g), dt))
        }
    }
}

/// Time-ordered propagator `U(end, start)` of `H(t)` over one window.
pub fn evolve_unitary<F: Fn(f64) -> CMatrix>(h: F, window: (f64, f64), steps: usize) -> Result<CMatrix> {
    evolve_unitary_segments(&h, &[Segment::new(window.0, window.1, steps)], StepRule::Midpoint)
}

/// Time-ordered propagator over consecutive segments (later steps to the left).
pub fn evolve_unitary_segments<F: Fn(f64) -> CMatrix>(h: &F, segments: &[Segment], rule: StepRule) -> Result<CMatrix> {
    let mut u: Option<CMatrix> = None;
    visit_unitary(h, segments, rule, |_, step_u| {
        u = Some(match u.take() {
            Some(prev) => step_u * prev,
            None => step_u.clone(),
        });
    })?;
    let dim = h(segments.first().map_or(0.0, |s| s.start)).nrows();
    Ok(u.unwrap_or_else(|| identity(dim)))
}

fn visit_unitary<F: Fn(f64) -> CMatrix>(
    h: &F,
    segments: &[Segment],
    rule: StepRule,
    mut f: impl FnMut(f64, &CMatrix),
) -> Result<()> {
    for seg in segments {
        seg.check()?;
        let dt = seg.step();
        for j in 0..seg.steps {
            let t = seg.start + j as f64 * dt;
            let step_u = step_propagator(h, t, dt, rule)?;
            f(t + dt, &step_u);
        }
    }
    Ok(())
}

/// Largest `|⟨ψ_k(t)|H(t)|ψ_l(t)⟩|` for `ψ_k(t) = U(t, t₀)|k⟩`, `k, l` in
/// `subspace`, over every grid time of the segments.
pub fn parallel_transport_violation<F: Fn(f64) -> CMatrix>(
    h: &F,
    segments: &[Segment],
    subspace: &[usize],
    rule: StepRule,
) -> Result<f64> {
    let t0 = segments.first().map_or(0.0, |s| s.start);
    let h0 = sample(h, t0)?;
    let dim = h0.nrows();
    let cols = |u: &CMatrix| CMatrix::from_fn(dim, subspace.len(), |r, k| u[(r, subspace[k])]);
    let worst_at = |psi: &CMatrix, hm: &CMatrix| {
        (psi.adjoint() * hm * psi).iter().map(|z| z.norm()).fold(0.0, f64::max)
    };
    let mut psi = cols(&identity(dim));
    let mut worst = worst_at(&psi, &h0);
    let mut err = None;
    visit_unitary(h, segments, rule, |t, step_u| {
        psi = step_u * &psi;
        match sample(h, t) {
            Ok(hm) => worst = worst.max(worst_at(&psi, &hm)),
            Err(e) => err = Some(e),
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(worst),
    }
}

/// Spontaneous decay `source → sink` with jump operator `L = √γ|sink⟩⟨source|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayModel {
    pub gamma: f64,
    pub source: usize,
    pub sink: usize,
}

impl DecayModel {
    pub fn new(gamma: f64, source: usize, sink: usize) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::Model(format!("decay rate must be finite and non-negative, got {gamma}")));
        }
        if source == sink {
            return Err(Error::Model("decay source and sink must differ".into()));
        }
        Ok(Self { gamma, source, sink })
    }

    pub fn none() -> Self {
        Self { gamma: 0.0, source: 0, sink: 1 }
    }

    /// `L = √γ|sink⟩⟨source|` in dimension `dim`.
    pub fn jump_operator(&self, dim: usize) -> CMatrix {
        let mut l = CMatrix::zeros(dim, dim);
        l[(self.sink, self.source)] = c(self.gamma.sqrt(), 0.0);
        l
    }
}

/// Settings of the Lindblad integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladOptions {
    /// Eigenvalue check cadence in steps (the final state is always checked).
    pub check_every: usize,
    /// Trace drift at which integration aborts with a resolution error.
    pub max_trace_drift: f64,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        Self { check_every: 250, max_trace_drift: 1e-6 }
    }
}

/// Integrity figures collected along a Lindblad run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindbladDiagnostics {
    pub max_trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub steps: usize,
}

impl LindbladDiagnostics {
    fn new() -> Self {
        Self { max_trace_deviation: 0.0, min_eigenvalue: f64::INFINITY, steps: 0 }
    }

    pub fn merge(&mut self, other: &Self) {
        self.max_trace_deviation = self.max_trace_deviation.max(other.max_trace_deviation);
        self.min_eigenvalue = self.min_eigenvalue.min(other.min_eigenvalue);
        self.steps += other.steps;
    }
}

/// `ρ̇ = −i[H, ρ] + 2LρL† − L†Lρ − ρL†L`.
pub fn lindblad_rhs(h: &CMatrix, decay: &DecayModel, rho: &CMatrix) -> CMatrix {
    let mut d = (h * rho - rho * h) * (-I);
    if decay.gamma > 0.0 {
        let (e, g, gamma) = (decay.source, decay.sink, decay.gamma);
        let n = rho.nrows();
        d[(g, g)] += rho[(e, e)] * (2.0 * gamma);
        for j in 0..n {
            d[(e, j)] -= rho[(e, j)] * gamma;
            d[(j, e)] -= rho[(j, e)] * gamma;
        }
    }
    d
}

/// Four-stage Runge–Kutta integration of the master equation over one window.
pub fn evolve_lindblad<F: Fn(f64) -> CMatrix>(
    h: F,
    decay: &DecayModel,
    rho0: &DensityMatrix,
    window: (f64, f64),
    steps: usize,
) -> Result<DensityMatrix> {
    let segs = [Segment::new(window.0, window.1, steps)];
    Ok(evolve_lindblad_segments(&h, decay, rho0, &segs, &LindbladOptions::default())?.0)
}

/// Runge–Kutta integration over consecutive segments. The state is
/// re-Hermitized after every step.
pub fn evolve_lindblad_segments<F: Fn(f64) -> CMatrix>(
    h: &F,
    decay: &DecayModel,
    rho0: &DensityMatrix,
    segments: &[Segment],
    opts: &LindbladOptions,
) -> Result<(DensityMatrix, LindbladDiagnostics)> {
    let dim = rho0.dim();
    if decay.gamma > 0.0 && (decay.source >= dim || decay.sink >= dim) {
        return Err(Error::Dimension(format!("decay levels outside a {dim}-level space")));
    }
    let mut rho = rho0.entries().clone();
    let mut diag = LindbladDiagnostics::new();
    let track = |rho: &CMatrix, diag: &mut LindbladDiagnostics, eig: bool| -> Result<()> {
        let dev = (rho.trace() - c(1.0, 0.0)).norm();
        diag.max_trace_deviation = diag.max_trace_deviation.max(dev);
        if dev > opts.max_trace_drift {
            return Err(Error::Resolution(format!(
                "trace drifted by {dev:.3e}; increase the number of steps"
            )));
        }
        if eig {
            let m = DensityMatrix::from_raw(rho.clone()).min_eigenvalue();
            diag.min_eigenvalue = diag.min_eigenvalue.min(m);
        }
        Ok(())
    };
    track(&rho, &mut diag, true)?;
    for seg in segments {
        seg.check()?;
        let dt = seg.step();
        let half = c(0.5 * dt, 0.0);
        let full = c(dt, 0.0);
        for j in 0..seg.steps {
            let t = seg.start + j as f64 * dt;
            // segment ends are sampled from inside, so a Hamiltonian that
            // jumps at a boundary is seen with its one-sided limit
            let inset = 1e-9 * dt;
            let h_start = sample(h, if j == 0 { t + inset } else { t })?;
            let h_mid = sample(h, t + 0.5 * dt)?;
            let h_end = sample(h, if j + 1 == seg.steps { t + dt - inset } else { t + dt })?;
            let k1 = lindblad_rhs(&h_start, decay, &rho);
            let k2 = lindblad_rhs(&h_mid, decay, &(&rho + &k1 * half));
            let k3 = lindblad_rhs(&h_mid, decay, &(&rho + &k2 * half));
            let k4 = lindblad_rhs(&h_end, decay, &(&rho + &k3 * full));
            rho += (k1 + (k2 + k3) * c(2.0, 0.0) + k4) * c(dt / 6.0, 0.0);
            rho = hermitize(&rho);
            diag.steps += 1;
            let eig = opts.check_every > 0 && diag.steps % opts.check_every == 0;
            track(&rho, &mut diag, eig)?;
        }
    }
    track(&rho, &mut diag, true)?;
    Ok((DensityMatrix::from_raw(rho), diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unit_matrix, unitarity_error};
    use crate::state::StateVector;

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let u = evolve_unitary(|_| CMatrix::zeros(3, 3), (0.0, 1.0), 10).unwrap();
        assert!(max_abs_diff(&u, &identity(3)) < 1e-15);
    }

    #[test]
    fn non_hermitian_sample_is_rejected() {
        let r = evolve_unitary(|_| unit_matrix(2, 0, 1), (0.0, 1.0), 4);
        assert!(matches!(r, Err(Error::Model(_))));
    }

    #[test]
    fn time_ordering_puts_later_steps_left() {
        // H = X on [0, 1), Z on [1, 2]
        let x = unit_matrix(2, 0, 1) + unit_matrix(2, 1, 0);
        let z = unit_matrix(2, 0, 0) - unit_matrix(2, 1, 1);
        let h = |t: f64| if t < 1.0 { x.clone() } else { z.clone() };
        let u = evolve_unitary(h, (0.0, 2.0), 2).unwrap();
        let expected = unitary_propagator(&z, 1.0) * unitary_propagator(&x, 1.0);
        assert!(max_abs_diff(&u, &expected) < 1e-14);
        assert!(unitarity_error(&u) < 1e-14);
    }

    #[test]
    fn magnus4_beats_midpoint_on_rotating_field() {
        let x = unit_matrix(2, 0, 1) + unit_matrix(2, 1, 0);
        let z = unit_matrix(2, 0, 0) - unit_matrix(2, 1, 1);
        let h = |t: f64| &x * c(t.cos(), 0.0) + &z * c(0.3 * t, 0.0);
        let seg = |n| [Segment::new(0.0, 2.0, n)];
        let reference = evolve_unitary_segments(&h, &seg(4000), StepRule::Magnus4).unwrap();
        let mid = evolve_unitary_segments(&h, &seg(100), StepRule::Midpoint).unwrap();
        let m4 = evolve_unitary_segments(&h, &seg(100), StepRule::Magnus4).unwrap();
        assert!(max_abs_diff(&m4, &reference) < 1e-2 * max_abs_diff(&mid, &reference));
    }

    // Oracle: with H = 0 the excited population decays as e^{−2γt}.
    #[test]
    fn pure_decay_matches_closed_form() {
        let gamma = 0.7;
        let decay = DecayModel::new(gamma, 2, 3).unwrap();
        let rho0 = StateVector::basis(4, 2).to_density();
        let t = 1.3;
        let rho = evolve_lindblad(|_| CMatrix::zeros(4, 4), &decay, &rho0, (0.0, t), 2000).unwrap();
        let expected = (-2.0 * gamma * t).exp();
        assert!((rho.population(2) - expected).abs() < 1e-12);
        assert!((rho.population(3) - (1.0 - expected)).abs() < 1e-12);
    }

    #[test]
    fn coherence_decays_at_half_rate() {
        let gamma = 0.5;
        let decay = DecayModel::new(gamma, 1, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::from_slice(&[c(s, 0.0), c(s, 0.0), c(0.0, 0.0)]);
        let rho = evolve_lindblad(|_| CMatrix::zeros(3, 3), &decay, &psi.to_density(), (0.0, 1.0), 1000).unwrap();
        assert!((rho.entries()[(0, 1)].re - 0.5 * (-gamma).exp()).abs() < 1e-12);
    }

    #[test]
    fn rhs_is_traceless() {
        let h = CMatrix::from_fn(4, 4, |i, j| c((i + j) as f64, i as f64 - j as f64));
        let rho = DensityMatrix::maximally_mixed(4);
        let d = lindblad_rhs(&h, &DecayModel::new(1.3, 2, 3).unwrap(), rho.entries());
        assert!(d.trace().norm() < 1e-14);
    }

    #[test]
    fn decay_model_validation() {
        assert!(DecayModel::new(-1.0, 2, 3).is_err());
        assert!(DecayModel::new(1.0, 2, 2).is_err());
    }

    #[test]
    fn zero_steps_is_a_resolution_error() {
        let r = evolve_unitary(|_| CMatrix::zeros(2, 2), (0.0, 1.0), 0);
        assert!(matches!(r, Err(Error::Resolution(_))));
    }
}
