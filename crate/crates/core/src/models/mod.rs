//! Λ-system and two-ion models: pulse envelopes, Hamiltonians, loops.

pub mod lambda;
pub mod loops;
pub mod pulse;
pub mod two_qubit;

pub use lambda::{dark_bright_states, full_hamiltonian, full_hamiltonian_in, LambdaParams};
pub use loops::{polar_angles, unit_vector, LoopSpec, Subspace};
pub use pulse::{gudermannian, pulse_area, EnvelopeSpec, PulseEnvelope, SECH_HALF_WIDTH};
pub use two_qubit::{h0, h1, two_qubit_hamiltonian, TwoQubitParams};
