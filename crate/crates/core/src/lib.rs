//! Holonomic quantum gates in Λ-type level schemes.
//!
//! The crate builds one- and two-qubit gates from resonant π pulse pairs,
//! computes non-Abelian holonomies of discretized loops, and simulates the
//! gates under spontaneous decay with a Lindblad master equation.
//!
//! ```
//! use holonomy_lab::gates::{one_qubit_gate, OneQubitGateSpec};
//! use holonomy_lab::linalg::{max_abs_diff, pauli_x};
//!
//! let spec = OneQubitGateSpec::from_angles(std::f64::consts::FRAC_PI_2, 0.0).unwrap();
//! assert!(max_abs_diff(&one_qubit_gate(&spec), &pauli_x()) < 1e-15);
//! ```

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod gates;
pub mod holonomy;
pub mod linalg;
pub mod models;
pub mod state;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
