//! Holonomic loop descriptions.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::lambda::{dark_bright_states, LambdaParams, LEVEL_E};
use super::pulse::PulseEnvelope;
use super::two_qubit::{h0, TwoQubitParams, TWO_ION_DIM};
use crate::error::{Error, Result};
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subspace {
    OneQubit,
    TwoQubit,
}

/// A loop of qubit subspaces generated by one resonant π pulse pair with
/// coupling direction fixed by the unit vector `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    pub n: [f64; 3],
    pub pulse: PulseEnvelope,
    pub subspace: Subspace,
}

/// Unit vector `(sinθcosφ, sinθsinφ, cosθ)`.
pub fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// `(θ, φ)` of a unit vector with `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
pub fn polar_angles(n: [f64; 3]) -> (f64, f64) {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let mut phi = n[1].atan2(n[0]);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    if theta.sin().abs() < 1e-15 {
        phi = 0.0;
    }
    (theta, phi)
}

pub fn vector_norm(n: [f64; 3]) -> f64 {
    (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
}

impl LoopSpec {
    pub fn new(n: [f64; 3], pulse: PulseEnvelope, subspace: Subspace) -> Result<Self> {
        let s = Self { n, pulse, subspace };
        s.validate()?;
        Ok(s)
    }

    pub fn from_angles(theta: f64, phi: f64, pulse: PulseEnvelope, subspace: Subspace) -> Result<Self> {
        Self::new(unit_vector(theta, phi), pulse, subspace)
    }

    pub fn validate(&self) -> Result<()> {
        let norm = vector_norm(self.n);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Model(format!("loop vector n has norm {norm}, expected 1")));
        }
        self.pulse.validate()
    }

    pub fn angles(&self) -> (f64, f64) {
        polar_angles(self.n)
    }

    pub fn area_deviation(&self) -> f64 {
        (self.pulse.area() - PI).abs()
    }

    pub fn is_cyclic(&self, tol: f64) -> bool {
        self.area_deviation() <= tol
    }

    pub fn dim(&self) -> usize {
        match self.subspace {
            Subspace::OneQubit => 3,
            Subspace::TwoQubit => TWO_ION_DIM,
        }
    }

    pub fn lambda_params(&self) -> Result<LambdaParams> {
        let (theta, phi) = self.angles();
        LambdaParams::from_angles(theta, phi, self.pulse.clone())
    }

    pub fn two_qubit_params(&self) -> Result<TwoQubitParams> {
        let (theta, phi) = self.angles();
        TwoQubitParams::new(theta, phi, self.pulse.clone())
    }

    /// `(|d⟩, |b⟩, |ẽ⟩)`: dark, bright, and the excited vector the bright
    /// state couples to, `|ẽ⟩ = K|b⟩` for the unit-envelope coupling `K`.
    pub fn dark_bright_excited(&self) -> Result<(StateVector, StateVector, StateVector)> {
        match self.subspace {
            Subspace::OneQubit => {
                let p = self.lambda_params()?;
                let (d, b) = dark_bright_states(&p);
                Ok((d, b, StateVector::basis(3, LEVEL_E)))
            }
            Subspace::TwoQubit => {
                let p = self.two_qubit_params()?;
                let (d, b) = p.dark_bright();
                let e = b.apply(&h0(p.theta, p.phi))?;
                Ok((d, b, e))
            }
        }
    }

    /// Qubit subspace basis in the loop's Hilbert space.
    pub fn computational_basis(&self) -> Vec<StateVector> {
        match self.subspace {
            Subspace::OneQubit => vec![StateVector::basis(3, 0), StateVector::basis(3, 1)],
            Subspace::TwoQubit => super::two_qubit::COMPUTATIONAL
                .iter()
                .map(|&i| StateVector::basis(TWO_ION_DIM, i))
                .collect(),
        }
    }
}
