//! Numerical tolerances used throughout the crate.
//!
//! Every check in the library reads its threshold from a [`Tolerances`]
//! value. [`Tolerances::default`] returns the table below; tests that need
//! tighter or looser thresholds construct their own.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `‖M − M†‖_max` for Hermitian matrices.
    pub hermitian: f64,
    /// `‖M†M − I‖_max` for unitary matrices.
    pub unitary: f64,
    /// `|‖ψ‖² − 1|` for normalized state vectors.
    pub normalization: f64,
    /// `|Tr ρ − 1|` for density matrices.
    pub trace: f64,
    /// Lowest eigenvalue accepted for a density matrix (negative slack).
    pub positivity: f64,
    /// Orthonormality of frames and projection bases.
    pub orthonormal: f64,
    /// Entrywise closure `frame(τ) = frame(0)` of a cyclic lift.
    pub cyclic: f64,
    /// Principal-angle sine below which two subspaces are considered equal.
    pub subspace: f64,
    /// Largest imaginary part tolerated in an expectation value.
    pub imaginary: f64,
    /// Pulse-area deviation from π accepted for a holonomic loop.
    pub pulse_area: f64,
    /// Lowest adjacent-frame overlap accepted by the connection estimator.
    pub frame_overlap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            unitary: 1e-10,
            normalization: 1e-12,
            trace: 1e-10,
            positivity: -1e-9,
            orthonormal: 1e-10,
            cyclic: 1e-8,
            subspace: 1e-8,
            imaginary: 1e-10,
            pulse_area: 1e-9,
            frame_overlap: 0.99,
        }
    }
}
