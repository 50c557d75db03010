//! Effective two-ion Hamiltonian in the Lamb–Dicke regime.
//!
//! Each ion carries levels `(0, 1, e)`; the nine product states are ordered
//! lexicographically, `|ij⟩ ↦ 3i + j`.

use serde::{Deserialize, Serialize};

use super::pulse::PulseEnvelope;
use crate::error::{Error, Result};
use crate::linalg::{c, tensor_product, CMatrix, C64};
use crate::state::StateVector;

pub const TWO_ION_DIM: usize = 9;

/// Index of `|ij⟩` in the product basis (`i, j ∈ {0, 1, 2 = e}`).
pub const fn product_index(i: usize, j: usize) -> usize {
    3 * i + j
}

pub const IDX_00: usize = product_index(0, 0);
pub const IDX_01: usize = product_index(0, 1);
pub const IDX_10: usize = product_index(1, 0);
pub const IDX_11: usize = product_index(1, 1);
pub const IDX_EE: usize = product_index(2, 2);

/// Computational subspace indices `|00⟩, |01⟩, |10⟩, |11⟩`.
pub const COMPUTATIONAL: [usize; 4] = [IDX_00, IDX_01, IDX_10, IDX_11];

/// Two-ion gate parameters. `coupling` is the folded envelope
/// `g(t) = (η²/δ)·sqrt(|Ω₀(t)|⁴ + |Ω₁(t)|⁴)`, and
/// `tan(θ/2) = |Ω₀|²/|Ω₁|²` is held constant over the pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitParams {
    pub theta: f64,
    pub phi: f64,
    pub coupling: PulseEnvelope,
}

impl TwoQubitParams {
    pub fn new(theta: f64, phi: f64, coupling: PulseEnvelope) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::Model("two-qubit angles must be finite".into()));
        }
        coupling.validate()?;
        Ok(Self { theta, phi, coupling })
    }

    /// Folds the physical parameters of constant-amplitude sideband lasers
    /// acting on `[start, end]` into `(θ, g)`.
    pub fn from_physical(
        eta: f64,
        detuning: f64,
        rabi0: f64,
        rabi1: f64,
        phi: f64,
        start: f64,
        end: f64,
    ) -> Result<Self> {
        if !(eta > 0.0 && detuning != 0.0) {
            return Err(Error::Model("need eta > 0 and a non-zero detuning".into()));
        }
        let (p0, p1) = (rabi0 * rabi0, rabi1 * rabi1);
        if p0 + p1 == 0.0 {
            return Err(Error::Model("at least one Rabi frequency must be non-zero".into()));
        }
        let g = (eta * eta / detuning) * (p0 * p0 + p1 * p1).sqrt();
        if g < 0.0 {
            return Err(Error::Model("folded coupling must be non-negative; flip the detuning sign".into()));
        }
        let theta = 2.0 * p0.atan2(p1);
        Self::new(theta, phi, PulseEnvelope::square(g, start, end)?)
    }

    /// Dark vector `cos(θ/2)|00⟩ + sin(θ/2)e^{iφ}|11⟩` and bright vector
    /// `sin(θ/2)e^{−iφ}|00⟩ − cos(θ/2)|11⟩`.
    pub fn dark_bright(&self) -> (StateVector, StateVector) {
        let (s, co) = ((0.5 * self.theta).sin(), (0.5 * self.theta).cos());
        let mut d = vec![c(0.0, 0.0); TWO_ION_DIM];
        let mut b = d.clone();
        d[IDX_00] = c(co, 0.0);
        d[IDX_11] = C64::from_polar(s, self.phi);
        b[IDX_00] = C64::from_polar(s, -self.phi);
        b[IDX_11] = c(-co, 0.0);
        (StateVector::from_slice(&d), StateVector::from_slice(&b))
    }
}

/// `H₀ = sin(θ/2)e^{iφ/2}|ee⟩⟨00| − cos(θ/2)e^{−iφ/2}|ee⟩⟨11| + h.c.`
pub fn h0(theta: f64, phi: f64) -> CMatrix {
    let mut h = CMatrix::zeros(TWO_ION_DIM, TWO_ION_DIM);
    let a = C64::from_polar((0.5 * theta).sin(), 0.5 * phi);
    let b = C64::from_polar(-(0.5 * theta).cos(), -0.5 * phi);
    h[(IDX_EE, IDX_00)] = a;
    h[(IDX_00, IDX_EE)] = a.conj();
    h[(IDX_EE, IDX_11)] = b;
    h[(IDX_11, IDX_EE)] = b.conj();
    h
}

/// `H₁ = sin(θ/2)|e0⟩⟨0e| − cos(θ/2)|e1⟩⟨1e| + h.c.`
pub fn h1(theta: f64) -> CMatrix {
    let mut h = CMatrix::zeros(TWO_ION_DIM, TWO_ION_DIM);
    let s = c((0.5 * theta).sin(), 0.0);
    let co = c(-(0.5 * theta).cos(), 0.0);
    let (e0, oe) = (product_index(2, 0), product_index(0, 2));
    let (e1, ie) = (product_index(2, 1), product_index(1, 2));
    h[(e0, oe)] = s;
    h[(oe, e0)] = s;
    h[(e1, ie)] = co;
    h[(ie, e1)] = co;
    h
}

/// `H^(2)(t) = g(t)(H₀ + H₁)`.
pub fn two_qubit_hamiltonian(p: &TwoQubitParams, t: f64) -> CMatrix {
    (h0(p.theta, p.phi) + h1(p.theta)) * c(p.coupling.value(t), 0.0)
}

/// Single-ion `σ₀(φ) = e^{iφ/4}|e⟩⟨0| + h.c.`.
pub fn sigma0(phi: f64) -> CMatrix {
    let mut m = CMatrix::zeros(3, 3);
    let z = C64::from_polar(1.0, 0.25 * phi);
    m[(2, 0)] = z;
    m[(0, 2)] = z.conj();
    m
}

/// Single-ion `σ₁(φ) = e^{iφ/4}|e⟩⟨1| + h.c.` (the Hamiltonian uses `σ₁(−φ)`).
pub fn sigma1(phi: f64) -> CMatrix {
    let mut m = CMatrix::zeros(3, 3);
    let z = C64::from_polar(1.0, 0.25 * phi);
    m[(2, 1)] = z;
    m[(1, 2)] = z.conj();
    m
}

/// Unfolded form `(η²/δ)(|Ω₀|² σ₀(φ)⊗σ₀(φ) − |Ω₁|² σ₁(−φ)⊗σ₁(−φ))` at fixed
/// intensities `|Ω₀|²`, `|Ω₁|²`.
pub fn sideband_hamiltonian(eta: f64, detuning: f64, intensity0: f64, intensity1: f64, phi: f64) -> CMatrix {
    let pre = eta * eta / detuning;
    let s0 = sigma0(phi);
    let s1 = sigma1(-phi);
    (tensor_product(&s0, &s0) * c(intensity0, 0.0) - tensor_product(&s1, &s1) * c(intensity1, 0.0)) * c(pre, 0.0)
}
