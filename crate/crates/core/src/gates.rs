//! Analytic holonomic gates, their composition, and pulse-parameter synthesis.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{
    c, identity, pauli_dot, phase_aligned_distance, phase_aligned_frobenius, unitarity_error, unitary_distance,
    CMatrix, C64,
};
use crate::models::loops::{polar_angles, unit_vector, vector_norm};
use crate::tolerances::Tolerances;

/// Default pass threshold for [`verify_gate_against_dynamics`].
pub const VERIFY_THRESHOLD: f64 = 1e-6;

/// Direction `n` of a one-loop gate `n·σ`. Serialized as `{"theta", "phi"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AnglesJson", into = "AnglesJson")]
pub struct OneQubitGateSpec {
    n: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnglesJson {
    pub theta: f64,
    pub phi: f64,
}

impl TryFrom<AnglesJson> for OneQubitGateSpec {
    type Error = Error;
    fn try_from(a: AnglesJson) -> Result<Self> {
        Self::from_angles(a.theta, a.phi)
    }
}

impl From<OneQubitGateSpec> for AnglesJson {
    fn from(s: OneQubitGateSpec) -> Self {
        let (theta, phi) = s.angles();
        Self { theta, phi }
    }
}

impl OneQubitGateSpec {
    pub fn new(n: [f64; 3]) -> Result<Self> {
        if n.iter().any(|x| !x.is_finite()) {
            return Err(Error::Model("gate vector must be finite".into()));
        }
        let norm = vector_norm(n);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Model(format!("gate vector has norm {norm}, expected 1")));
        }
        Ok(Self { n })
    }

    /// Normalizes `n` first; fails only for the zero vector.
    pub fn from_direction(n: [f64; 3]) -> Result<Self> {
        let norm = vector_norm(n);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Model("gate direction must be a finite non-zero vector".into()));
        }
        Self::new([n[0] / norm, n[1] / norm, n[2] / norm])
    }

    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::Model("gate angles must be finite".into()));
        }
        Self::new(unit_vector(theta, phi))
    }

    pub fn n(&self) -> [f64; 3] {
        self.n
    }

    /// `(θ, φ)` with `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn angles(&self) -> (f64, f64) {
        polar_angles(self.n)
    }
}

/// Angles of the two-qubit holonomic gate. Serialized as `{"theta", "phi"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitGateSpec {
    pub theta: f64,
    pub phi: f64,
}

impl TwoQubitGateSpec {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::Model("gate angles must be finite".into()));
        }
        Ok(Self { theta, phi: phi.rem_euclid(2.0 * PI) })
    }
}

/// `U(C_n) = n·σ`.
pub fn one_qubit_gate(s: &OneQubitGateSpec) -> CMatrix {
    pauli_dot(s.n)
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Loop `n` followed by loop `m`: `(m·σ)(n·σ) = n·m − iσ·(n×m)`.
pub fn compose_two(n: &OneQubitGateSpec, m: &OneQubitGateSpec) -> CMatrix {
    let (a, b) = (n.n, m.n);
    identity(2) * c(dot(a, b), 0.0) - pauli_dot(cross(a, b)) * c(0.0, 1.0)
}

/// Rotation angle and axis of the composite gate, `2·arccos(n·m)` about
/// `(n×m)/‖n×m‖`. The axis is `None` for parallel or antiparallel vectors.
pub fn composite_rotation(n: &OneQubitGateSpec, m: &OneQubitGateSpec) -> (f64, Option<[f64; 3]>) {
    let angle = 2.0 * dot(n.n, m.n).clamp(-1.0, 1.0).acos();
    let x = cross(n.n, m.n);
    let norm = vector_norm(x);
    let axis = (norm > 1e-15).then(|| [x[0] / norm, x[1] / norm, x[2] / norm]);
    (angle, axis)
}

/// Pair `(n, m)` whose composition equals `target` up to a global phase.
///
/// The target is reduced to `SU(2)` as `cos(α/2) − i sin(α/2) u·σ`; `n` is
/// any unit vector perpendicular to `u` and `m` is `n` rotated about `u` by
/// `α/2`. For `target ∝ I` the pair is `n = m = (0, 0, 1)`.
pub fn synthesize_one_qubit(target: &CMatrix) -> Result<(OneQubitGateSpec, OneQubitGateSpec)> {
    if target.shape() != (2, 2) {
        return Err(Error::Dimension("synthesis target must be 2x2".into()));
    }
    let err = unitarity_error(target);
    if err > Tolerances::default().unitary {
        return Err(Error::Precondition(format!("target is not unitary (error {err:.3e})")));
    }
    let det = target[(0, 0)] * target[(1, 1)] - target[(0, 1)] * target[(1, 0)];
    let v = target / det.sqrt();
    let cos_half = 0.5 * (v[(0, 0)] + v[(1, 1)]).re;
    let su = [
        -0.5 * (v[(0, 1)] + v[(1, 0)]).im,
        0.5 * (v[(1, 0)] - v[(0, 1)]).re,
        0.5 * (v[(1, 1)] - v[(0, 0)]).im,
    ];
    let sin_half = vector_norm(su);
    if sin_half < 1e-14 {
        let z = OneQubitGateSpec::new([0.0, 0.0, 1.0])?;
        return Ok((z, z));
    }
    let u = [su[0] / sin_half, su[1] / sin_half, su[2] / sin_half];
    let half = sin_half.atan2(cos_half);
    // a unit vector perpendicular to u, built from the least aligned axis
    let pick = if u[0].abs() <= u[1].abs() && u[0].abs() <= u[2].abs() {
        [1.0, 0.0, 0.0]
    } else if u[1].abs() <= u[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let n = OneQubitGateSpec::from_direction(cross(u, pick))?;
    let ucn = cross(u, n.n);
    let (s, co) = half.sin_cos();
    let m = OneQubitGateSpec::from_direction([
        n.n[0] * co + ucn[0] * s,
        n.n[1] * co + ucn[1] * s,
        n.n[2] * co + ucn[2] * s,
    ])?;
    Ok((n, m))
}

/// Two-qubit gate on `(|00⟩, |01⟩, |10⟩, |11⟩)`: the `{00, 11}` block is
/// `[[cosθ, sinθ e^{−iφ}], [sinθ e^{iφ}, −cosθ]]`, identity on `01`, `10`.
pub fn two_qubit_gate(s: &TwoQubitGateSpec) -> CMatrix {
    let mut u = CMatrix::zeros(4, 4);
    let (sn, cs) = s.theta.sin_cos();
    u[(0, 0)] = c(cs, 0.0);
    u[(0, 3)] = C64::from_polar(sn, -s.phi);
    u[(3, 0)] = C64::from_polar(sn, s.phi);
    u[(3, 3)] = c(-cs, 0.0);
    u[(1, 1)] = c(1.0, 0.0);
    u[(2, 2)] = c(1.0, 0.0);
    u
}

/// Phase shift `|k⟩ → e^{ikα}|k⟩`.
pub fn phase_shift(alpha: f64) -> CMatrix {
    let mut u = identity(2);
    u[(1, 1)] = C64::from_polar(1.0, alpha);
    u
}

/// Hadamard `|k⟩ → ((−1)^k|k⟩ + |k⊕1⟩)/√2`, realized by the single loop
/// `n = (1, 0, 1)/√2`.
pub fn hadamard() -> CMatrix {
    one_qubit_gate(&OneQubitGateSpec::from_direction([1.0, 0.0, 1.0]).expect("non-zero"))
}

/// Comparison of an analytic gate with a simulated one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateVerification {
    pub max_distance: f64,
    pub frobenius_distance: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Anything that names an analytic holonomic gate.
pub trait GateSpec {
    fn matrix(&self) -> CMatrix;
}

impl GateSpec for OneQubitGateSpec {
    fn matrix(&self) -> CMatrix {
        one_qubit_gate(self)
    }
}

impl GateSpec for TwoQubitGateSpec {
    fn matrix(&self) -> CMatrix {
        two_qubit_gate(self)
    }
}

impl GateSpec for (OneQubitGateSpec, OneQubitGateSpec) {
    fn matrix(&self) -> CMatrix {
        compose_two(&self.0, &self.1)
    }
}

/// Global-phase-aligned distance between the analytic gate and a projected
/// evolution; passes below [`VERIFY_THRESHOLD`].
pub fn verify_gate_against_dynamics(spec: &dyn GateSpec, dynamics_result: &CMatrix) -> GateVerification {
    verify_matrix(&spec.matrix(), dynamics_result, VERIFY_THRESHOLD)
}

pub fn verify_matrix(expected: &CMatrix, actual: &CMatrix, threshold: f64) -> GateVerification {
    if expected.shape() != actual.shape() {
        return GateVerification {
            max_distance: f64::INFINITY,
            frobenius_distance: f64::INFINITY,
            threshold,
            passed: false,
        };
    }
    let max_distance = phase_aligned_distance(expected, actual);
    GateVerification {
        max_distance,
        frobenius_distance: phase_aligned_frobenius(expected, actual),
        threshold,
        passed: max_distance < threshold,
    }
}

/// Result of [`greedy_approximate`].
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyApproximation {
    /// Generator indices in application order (first applied first).
    pub sequence: Vec<usize>,
    pub distance: f64,
}

/// Greedily appends short words over `generators` to approach `target`,
/// choosing at each round the word up to `block` letters that minimizes the
/// phase-invariant distance `sqrt(1 − |Tr(A†B)|/2)`. Stops at `tolerance` or
/// once `max_gates` letters are used.
pub fn greedy_approximate(
    target: &CMatrix,
    generators: &[CMatrix],
    max_gates: usize,
    block: usize,
    tolerance: f64,
) -> GreedyApproximation {
    let mut words: Vec<(Vec<usize>, CMatrix)> = vec![(Vec::new(), identity(2))];
    let mut all = Vec::new();
    for _ in 0..block {
        let mut next = Vec::new();
        for (w, m) in &words {
            for (g, gm) in generators.iter().enumerate() {
                let mut w2 = w.clone();
                w2.push(g);
                next.push((w2, gm * m));
            }
        }
        all.extend(next.iter().cloned());
        words = next;
    }
    let mut current = identity(2);
    let mut sequence = Vec::new();
    let mut distance = unitary_distance(target, &current);
    while distance >= tolerance && sequence.len() < max_gates {
        let budget = max_gates - sequence.len();
        let best = all
            .iter()
            .filter(|(w, _)| w.len() <= budget)
            .map(|(w, m)| (w, m * &current))
            .map(|(w, m)| (unitary_distance(target, &m), w, m))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match best {
            Some((d, w, m)) if d < distance => {
                distance = d;
                sequence.extend_from_slice(w);
                current = m;
            }
            _ => break,
        }
    }
    GreedyApproximation { sequence, distance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, pauli_x, pauli_y, pauli_z};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn pole_gives_sigma_z() {
        let g = one_qubit_gate(&OneQubitGateSpec::from_angles(0.0, 0.0).unwrap());
        assert!(max_abs_diff(&g, &pauli_z()) < 1e-16);
    }

    #[test]
    fn hadamard_from_single_loop() {
        let s = FRAC_1_SQRT_2;
        let h = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
        assert!(max_abs_diff(&hadamard(), &h) < 1e-15);
    }

    #[test]
    fn equatorial_gate() {
        let phi = 0.77;
        let g = one_qubit_gate(&OneQubitGateSpec::from_angles(PI / 2.0, phi).unwrap());
        let expected = pauli_x() * c(phi.cos(), 0.0) + pauli_y() * c(phi.sin(), 0.0);
        assert!(max_abs_diff(&g, &expected) < 1e-15);
    }

    #[test]
    fn gate_is_involutory_and_traceless() {
        let g = one_qubit_gate(&OneQubitGateSpec::from_angles(1.1, 2.3).unwrap());
        assert!(max_abs_diff(&(&g * &g), &identity(2)) < 1e-15);
        assert!(g.trace().norm() < 1e-16);
    }

    #[test]
    fn compose_equal_vectors_is_identity() {
        let n = OneQubitGateSpec::from_angles(0.4, 1.0).unwrap();
        assert!(max_abs_diff(&compose_two(&n, &n), &identity(2)) < 1e-15);
    }

    #[test]
    fn equatorial_pair_gives_phase_shift() {
        let (phi, phi2) = (0.3, 0.3 + PI / 8.0);
        let n = OneQubitGateSpec::from_angles(PI / 2.0, phi).unwrap();
        let m = OneQubitGateSpec::from_angles(PI / 2.0, phi2).unwrap();
        let u = compose_two(&n, &m);
        assert!(phase_aligned_distance(&phase_shift(2.0 * (phi2 - phi)), &u) < 1e-15);
        // T gate
        assert!(phase_aligned_distance(&phase_shift(PI / 4.0), &u) < 1e-15);
        let (angle, axis) = composite_rotation(&n, &m);
        assert!((angle - PI / 4.0).abs() < 1e-14);
        let axis = axis.unwrap();
        assert!((axis[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn synthesis_of_identity_is_deterministic() {
        let (n, m) = synthesize_one_qubit(&identity(2)).unwrap();
        assert_eq!(n.n(), [0.0, 0.0, 1.0]);
        assert_eq!(m.n(), [0.0, 0.0, 1.0]);
        let (n, _) = synthesize_one_qubit(&(identity(2) * c(-1.0, 0.0))).unwrap();
        assert_eq!(n.n(), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn synthesis_of_hadamard() {
        let (n, m) = synthesize_one_qubit(&hadamard()).unwrap();
        assert!(phase_aligned_distance(&hadamard(), &compose_two(&n, &m)) < 1e-12);
    }

    #[test]
    fn synthesis_rejects_non_unitary() {
        let m = identity(2) * c(1.1, 0.0);
        assert!(matches!(synthesize_one_qubit(&m), Err(Error::Precondition(_))));
    }

    #[test]
    fn conditional_phase_and_swap_block() {
        let cz = two_qubit_gate(&TwoQubitGateSpec::new(0.0, 0.0).unwrap());
        let mut expected = identity(4);
        expected[(3, 3)] = c(-1.0, 0.0);
        assert!(max_abs_diff(&cz, &expected) < 1e-16);
        let sw = two_qubit_gate(&TwoQubitGateSpec::new(PI / 2.0, 0.0).unwrap());
        assert!((sw[(0, 3)] - c(1.0, 0.0)).norm() < 1e-15 && (sw[(3, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(sw[(0, 0)].norm() < 1e-15 && sw[(3, 3)].norm() < 1e-15);
    }

    #[test]
    fn two_qubit_gate_is_reflection() {
        let u = two_qubit_gate(&TwoQubitGateSpec::new(0.9, 4.4).unwrap());
        assert!(max_abs_diff(&(&u * &u), &identity(4)) < 1e-15);
        assert!(max_abs_diff(&u, &u.adjoint()) < 1e-16);
    }

    #[test]
    fn verification_of_gate_against_itself() {
        let spec = OneQubitGateSpec::from_angles(1.0, 1.0).unwrap();
        let r = verify_gate_against_dynamics(&spec, &one_qubit_gate(&spec));
        assert!(r.passed && r.max_distance == 0.0);
        let off = verify_gate_against_dynamics(&spec, &pauli_z());
        assert!(!off.passed);
    }

    #[test]
    fn spec_json_uses_angles() {
        let s = OneQubitGateSpec::from_angles(0.5, 1.5).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"theta\"") && text.contains("\"phi\""));
        let back: OneQubitGateSpec = serde_json::from_str(&text).unwrap();
        assert!(vector_norm([s.n[0] - back.n[0], s.n[1] - back.n[1], s.n[2] - back.n[2]]) < 1e-15);
    }
}
