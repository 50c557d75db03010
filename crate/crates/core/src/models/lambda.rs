//! One-qubit Λ system: Hamiltonian, dark and bright states.
//!
//! Level ordering is fixed: `|0⟩, |1⟩, |e⟩` followed by the optional sink
//! `|g⟩` and ancilla `|a⟩`.

use serde::{Deserialize, Serialize};

use super::pulse::PulseEnvelope;
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, C64};
use crate::state::StateVector;

pub const LEVEL_0: usize = 0;
pub const LEVEL_1: usize = 1;
pub const LEVEL_E: usize = 2;
pub const LEVEL_G: usize = 3;
pub const LEVEL_A: usize = 4;

/// Laser parameters of a single pulse pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaParams {
    pub omega0: C64,
    pub omega1: C64,
    #[serde(default)]
    pub delta0: f64,
    #[serde(default)]
    pub delta1: f64,
    pub envelope: PulseEnvelope,
}

impl LambdaParams {
    pub fn new(omega0: C64, omega1: C64, delta0: f64, delta1: f64, envelope: PulseEnvelope) -> Result<Self> {
        let p = Self { omega0, omega1, delta0, delta1, envelope };
        p.validate()?;
        Ok(p)
    }

    /// Resonant pulse pair with `ω₀ = sin(θ/2)e^{iφ}`, `ω₁ = −cos(θ/2)`,
    /// which realizes the gate `n·σ` with `n = (sinθcosφ, sinθsinφ, cosθ)`.
    pub fn from_angles(theta: f64, phi: f64, envelope: PulseEnvelope) -> Result<Self> {
        let omega0 = C64::from_polar((0.5 * theta).sin(), phi);
        let omega1 = c(-(0.5 * theta).cos(), 0.0);
        Self::new(omega0, omega1, 0.0, 0.0, envelope)
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.omega0.norm_sqr() + self.omega1.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Model(format!("|omega0|^2 + |omega1|^2 = {norm}, expected 1")));
        }
        if !(self.delta0.is_finite() && self.delta1.is_finite()) {
            return Err(Error::Model("detunings must be finite".into()));
        }
        self.envelope.validate()
    }

    pub fn with_detunings(mut self, delta0: f64, delta1: f64) -> Self {
        self.delta0 = delta0;
        self.delta1 = delta1;
        self
    }

    /// Zero-detuning coupling direction `K = ω₀|e⟩⟨0| + ω₁|e⟩⟨1| + h.c.`
    /// embedded in dimension `dim ≥ 3`.
    pub fn coupling_operator(&self, dim: usize) -> CMatrix {
        let mut k = CMatrix::zeros(dim, dim);
        k[(LEVEL_E, LEVEL_0)] = self.omega0;
        k[(LEVEL_E, LEVEL_1)] = self.omega1;
        k[(LEVEL_0, LEVEL_E)] = self.omega0.conj();
        k[(LEVEL_1, LEVEL_E)] = self.omega1.conj();
        k
    }

    /// Detuning part `Δ₀|0⟩⟨0| + Δ₁|1⟩⟨1|`.
    pub fn detuning_operator(&self, dim: usize) -> CMatrix {
        let mut d = CMatrix::zeros(dim, dim);
        d[(LEVEL_0, LEVEL_0)] = c(self.delta0, 0.0);
        d[(LEVEL_1, LEVEL_1)] = c(self.delta1, 0.0);
        d
    }

    pub fn is_resonant(&self) -> bool {
        self.delta0 == 0.0 && self.delta1 == 0.0
    }
}

/// Rotating-frame Hamiltonian
/// `H(t) = Δ₀|0⟩⟨0| + Δ₁|1⟩⟨1| + Ω(t)(ω₀|e⟩⟨0| + ω₁|e⟩⟨1| + h.c.)` on `(0, 1, e)`.
pub fn full_hamiltonian(p: &LambdaParams, t: f64) -> Result<CMatrix> {
    full_hamiltonian_in(p, t, 3)
}

/// Same Hamiltonian embedded into a `dim`-level space (extra levels uncoupled).
pub fn full_hamiltonian_in(p: &LambdaParams, t: f64, dim: usize) -> Result<CMatrix> {
    p.validate()?;
    if dim < 3 {
        return Err(Error::Dimension(format!("Lambda system needs at least 3 levels, got {dim}")));
    }
    Ok(hamiltonian_unchecked(p, t, dim))
}

pub(crate) fn hamiltonian_unchecked(p: &LambdaParams, t: f64, dim: usize) -> CMatrix {
    let amp = p.envelope.value(t);
    let mut h = p.coupling_operator(dim) * c(amp, 0.0);
    if !p.is_resonant() {
        h += p.detuning_operator(dim);
    }
    h
}

/// `|d⟩ = −ω₁|0⟩ + ω₀|1⟩` and `|b⟩ = ω₀*|0⟩ + ω₁*|1⟩`, in dimension 3.
pub fn dark_bright_states(p: &LambdaParams) -> (StateVector, StateVector) {
    let z = c(0.0, 0.0);
    let dark = StateVector::from_slice(&[-p.omega1, p.omega0, z]);
    let bright = StateVector::from_slice(&[p.omega0.conj(), p.omega1.conj(), z]);
    (dark, bright)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_error, max_abs, max_abs_diff};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn square() -> PulseEnvelope {
        PulseEnvelope::square(1.0, 0.0, PI).unwrap()
    }

    #[test]
    fn zero_detuning_reduces_to_coupling_only() {
        let p = LambdaParams::from_angles(0.7, 1.1, square()).unwrap();
        let h = full_hamiltonian(&p, 1.0).unwrap();
        assert!(max_abs_diff(&h, &p.coupling_operator(3)) == 0.0);
        assert!(hermiticity_error(&h) == 0.0);
    }

    #[test]
    fn outside_window_is_zero() {
        let p = LambdaParams::from_angles(0.7, 1.1, square()).unwrap();
        assert_eq!(max_abs(&full_hamiltonian(&p, -1.0).unwrap()), 0.0);
        assert_eq!(max_abs(&full_hamiltonian(&p, 4.0).unwrap()), 0.0);
    }

    #[test]
    fn single_transition_coupling() {
        let p = LambdaParams::new(c(1.0, 0.0), c(0.0, 0.0), 0.0, 0.0, square()).unwrap();
        let h = full_hamiltonian(&p, 0.5).unwrap();
        let mut expected = CMatrix::zeros(3, 3);
        expected[(2, 0)] = c(1.0, 0.0);
        expected[(0, 2)] = c(1.0, 0.0);
        assert_eq!(h, expected);
    }

    #[test]
    fn normalization_is_enforced() {
        let err = LambdaParams::new(c(1.0, 0.0), c(0.1, 0.0), 0.0, 0.0, square());
        assert!(matches!(err, Err(Error::Model(_))));
    }

    #[test]
    fn detuned_hamiltonian_is_hermitian() {
        let p = LambdaParams::from_angles(1.3, 0.2, square()).unwrap().with_detunings(0.4, -0.9);
        let h = full_hamiltonian_in(&p, 0.5, 4).unwrap();
        assert_eq!(h.nrows(), 4);
        assert_eq!(hermiticity_error(&h), 0.0);
        assert_eq!(h[(0, 0)], c(0.4, 0.0));
    }

    #[test]
    fn dark_bright_at_theta_zero() {
        let p = LambdaParams::new(c(0.0, 0.0), c(-1.0, 0.0), 0.0, 0.0, square()).unwrap();
        let (d, b) = dark_bright_states(&p);
        assert_eq!(d, StateVector::basis(3, 0));
        assert_eq!(b.amplitudes()[1], c(-1.0, 0.0));
    }

    #[test]
    fn dark_bright_at_equator() {
        // θ = π/2, φ = 0: ω₀ = 1/√2, ω₁ = −1/√2
        let p = LambdaParams::from_angles(PI / 2.0, 0.0, square()).unwrap();
        let (d, b) = dark_bright_states(&p);
        let s = FRAC_1_SQRT_2;
        assert!((d.amplitudes()[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((d.amplitudes()[1] - c(s, 0.0)).norm() < 1e-15);
        assert!((b.amplitudes()[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((b.amplitudes()[1] - c(-s, 0.0)).norm() < 1e-15);
        assert!(d.inner(&b).norm() < 1e-15);
    }

    #[test]
    fn dark_state_is_annihilated() {
        for (theta, phi) in [(0.3, 0.0), (1.7, 2.2), (2.9, 5.0)] {
            let p = LambdaParams::from_angles(theta, phi, square()).unwrap();
            let (d, b) = dark_bright_states(&p);
            let h = full_hamiltonian(&p, 1.0).unwrap();
            let hd = d.apply(&h).unwrap();
            assert!(hd.amplitudes().norm() < 1e-15);
            let hb = b.apply(&h).unwrap();
            assert!(d.inner(&hb).norm() < 1e-16);
            // bright couples to |e⟩ with unit strength
            assert!((hb.amplitudes()[2] - c(1.0, 0.0)).norm() < 1e-15);
        }
    }
}
