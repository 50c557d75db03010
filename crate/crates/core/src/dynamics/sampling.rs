//! Input states on the Bloch sphere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::linalg::{c, C64};
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    /// Deterministic Fibonacci lattice; includes both poles for `n ≥ 2`.
    #[default]
    Fibonacci,
    /// Uniform sampling from a seeded ChaCha8 stream.
    SeededUniform,
}

/// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`
pub fn bloch_state(theta: f64, phi: f64) -> StateVector {
    StateVector::from_slice(&[c((0.5 * theta).cos(), 0.0), C64::from_polar((0.5 * theta).sin(), phi)])
}

/// Bloch vector `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` of a qubit state.
pub fn bloch_vector(psi: &StateVector) -> [f64; 3] {
    let a = psi.amplitudes()[0];
    let b = psi.amplitudes()[1];
    let off = a.conj() * b;
    [2.0 * off.re, 2.0 * off.im, a.norm_sqr() - b.norm_sqr()]
}

/// `n` qubit states; `seed` is used only by the uniform sampler.
pub fn bloch_sphere_sample(n: usize, sampler: Sampler, seed: u64) -> Vec<StateVector> {
    match sampler {
        Sampler::Fibonacci => {
            if n == 1 {
                return vec![bloch_state(0.0, 0.0)];
            }
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let z = 1.0 - 2.0 * i as f64 / (n - 1) as f64;
                    bloch_state(z.clamp(-1.0, 1.0).acos(), (i as f64 * golden).rem_euclid(2.0 * PI))
                })
                .collect()
        }
        Sampler::SeededUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| {
                    let z: f64 = rng.random_range(-1.0..=1.0);
                    let phi: f64 = rng.random_range(0.0..2.0 * PI);
                    bloch_state(z.acos(), phi)
                })
                .collect()
        }
    }
}
