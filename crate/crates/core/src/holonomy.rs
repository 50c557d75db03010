//! Non-Abelian holonomies of loops of K-dimensional subspaces.
//!
//! A loop is represented by a [`FrameTrajectory`]: a time grid and, at each
//! time, an orthonormal `N×K` frame whose columns are `|ζ_k(t)⟩`. The
//! connection is `𝓐_kl = i⟨ζ_k|dζ_l⟩` and the holonomy is the path-ordered
//! exponential `P exp(i∮𝓐)`, later times to the left. Holonomy indices follow
//! the column order of the frames.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, hermitize, identity, max_abs_diff, polar_unitary, singular_values, CMatrix, C64, I};
use crate::models::LoopSpec;
use crate::state::{frame_matrix, StateVector};
use crate::tolerances::Tolerances;

/// Default number of time steps per loop.
pub const DEFAULT_STEPS: usize = 2000;

/// Time-indexed orthonormal K-frames in `ℂ^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTrajectory {
    times: Vec<f64>,
    frames: Vec<CMatrix>,
    cyclic: bool,
}

/// Connection matrix sampled at one grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionSample {
    pub time: f64,
    pub a_matrix: CMatrix,
}

/// Modified Gram–Schmidt on the columns of `m`, preserving column order.
pub fn orthonormalize(m: &CMatrix) -> CMatrix {
    let mut q = m.clone();
    for k in 0..q.ncols() {
        for j in 0..k {
            let proj = q.column(j).dotc(&q.column(k));
            let qj = q.column(j).clone_owned();
            let mut col = q.column_mut(k);
            col -= qj * proj;
        }
        let norm = q.column(k).norm();
        if norm > 0.0 {
            let mut col = q.column_mut(k);
            col /= c(norm, 0.0);
        }
    }
    q
}

impl FrameTrajectory {
    /// Builds a trajectory from per-time frames (columns are frame vectors).
    /// Frames are re-orthonormalized and the orthonormality and closure
    /// invariants are checked.
    pub fn new(times: Vec<f64>, frames: Vec<CMatrix>, cyclic: bool) -> Result<Self> {
        Self::new_with(times, frames, cyclic, &Tolerances::default())
    }

    pub fn new_with(times: Vec<f64>, frames: Vec<CMatrix>, cyclic: bool, tol: &Tolerances) -> Result<Self> {
        if times.len() != frames.len() {
            return Err(Error::Dimension(format!("{} times but {} frames", times.len(), frames.len())));
        }
        if times.len() < 2 {
            return Err(Error::Resolution("a trajectory needs at least two grid points".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("trajectory times must be strictly increasing".into()));
        }
        let shape = frames[0].shape();
        if frames.iter().any(|f| f.shape() != shape) || shape.1 == 0 || shape.1 > shape.0 {
            return Err(Error::Dimension("frames must share one N×K shape with 0 < K ≤ N".into()));
        }
        for (t, f) in times.iter().zip(&frames) {
            let err = max_abs_diff(&(f.adjoint() * f), &identity(shape.1));
            if err > tol.orthonormal {
                return Err(Error::Precondition(format!("frame at t = {t} is not orthonormal (error {err:.3e})")));
            }
        }
        let frames: Vec<CMatrix> = frames.iter().map(orthonormalize).collect();
        if cyclic {
            let gap = max_abs_diff(&frames[0], frames.last().expect("non-empty"));
            if gap > tol.cyclic {
                return Err(Error::Precondition(format!("cyclic trajectory does not close (gap {gap:.3e})")));
            }
        }
        Ok(Self { times, frames, cyclic })
    }

    pub fn from_vectors(times: Vec<f64>, frames: Vec<Vec<StateVector>>, cyclic: bool) -> Result<Self> {
        let mats = frames.iter().map(|f| frame_matrix(f)).collect::<Result<Vec<_>>>()?;
        Self::new(times, mats, cyclic)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frames(&self) -> &[CMatrix] {
        &self.frames
    }

    pub fn frame(&self, index: usize) -> &CMatrix {
        &self.frames[index]
    }

    pub fn frame_vectors(&self, index: usize) -> Vec<StateVector> {
        let f = &self.frames[index];
        (0..f.ncols()).map(|k| StateVector::new(f.column(k).clone_owned())).collect()
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.frames[0].nrows()
    }

    pub fn rank(&self) -> usize {
        self.frames[0].ncols()
    }

    /// The same loop traversed backwards, on the mirrored time grid.
    pub fn reversed(&self) -> Self {
        let (t0, t1) = (self.times[0], *self.times.last().expect("non-empty"));
        let times = self.times.iter().rev().map(|t| t0 + t1 - t).collect();
        let frames = self.frames.iter().rev().cloned().collect();
        Self { times, frames, cyclic: self.cyclic }
    }

    /// Smallest singular value over all adjacent-frame overlaps `F_{j+1}†F_j`.
    pub fn min_adjacent_overlap(&self) -> f64 {
        self.frames
            .windows(2)
            .map(|w| singular_values(&(w[1].adjoint() * &w[0])).last().copied().unwrap_or(0.0))
            .fold(1.0, f64::min)
    }

    pub fn to_json(&self) -> FrameTrajectoryJson {
        FrameTrajectoryJson {
            dim: self.dim(),
            rank: self.rank(),
            cyclic: self.cyclic,
            times: self.times.clone(),
            frames: self
                .frames
                .iter()
                .map(|f| {
                    let mut flat = Vec::with_capacity(2 * f.len());
                    for k in 0..f.ncols() {
                        for i in 0..f.nrows() {
                            flat.push(f[(i, k)].re);
                            flat.push(f[(i, k)].im);
                        }
                    }
                    flat
                })
                .collect(),
        }
    }

    pub fn from_json(json: &FrameTrajectoryJson) -> Result<Self> {
        let (n, k) = (json.dim, json.rank);
        let frames = json
            .frames
            .iter()
            .map(|flat| {
                if flat.len() != 2 * n * k {
                    return Err(Error::Dimension(format!("frame has {} numbers, expected {}", flat.len(), 2 * n * k)));
                }
                Ok(CMatrix::from_fn(n, k, |i, col| {
                    let at = 2 * (col * n + i);
                    c(flat[at], flat[at + 1])
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.times.clone(), frames, json.cyclic)
    }
}

/// JSON export of a trajectory. Each frame is flattened vector by vector,
/// amplitudes interleaved as `re, im`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameTrajectoryJson {
    pub dim: usize,
    pub rank: usize,
    pub cyclic: bool,
    pub times: Vec<f64>,
    pub frames: Vec<Vec<f64>>,
}

/// Lift of a one-pulse loop to single-valued frames
/// `ζ₁ = |d⟩`, `ζ₂ = e^{iδ}(cos δ |b⟩ − i sin δ |ẽ⟩)` with `δ(t) = ∫Ω`.
pub fn lift_loop(spec: &LoopSpec) -> Result<FrameTrajectory> {
    lift_loop_with(spec, DEFAULT_STEPS, &Tolerances::default())
}

pub fn lift_loop_with(spec: &LoopSpec, steps: usize, tol: &Tolerances) -> Result<FrameTrajectory> {
    spec.validate()?;
    if steps < 1 {
        return Err(Error::Resolution("lift needs at least one step".into()));
    }
    let area = spec.pulse.area();
    let deviation = (area - std::f64::consts::PI).abs();
    if deviation > tol.pulse_area {
        return Err(Error::NotCyclic { area, deviation });
    }
    let (dark, bright, excited) = spec.dark_bright_excited()?;
    let (t0, t1) = spec.pulse.window();
    let h = (t1 - t0) / steps as f64;
    let n = spec.dim();
    let mut times = Vec::with_capacity(steps + 1);
    let mut frames = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let t = if j == steps { t1 } else { t0 + j as f64 * h };
        let delta = spec.pulse.cumulative_area(t);
        let phase = C64::from_polar(1.0, delta);
        let zeta2 = (bright.amplitudes() * c(delta.cos(), 0.0) - excited.amplitudes() * (I * delta.sin())) * phase;
        let mut f = CMatrix::zeros(n, 2);
        f.set_column(0, dark.amplitudes());
        f.set_column(1, &zeta2);
        times.push(t);
        frames.push(f);
    }
    // the closing frame equals the initial one up to the tolerated area error
    if deviation > 0.0 {
        frames[steps] = frames[0].clone();
    }
    FrameTrajectory::new_with(times, frames, true, tol)
}

/// Weights of the first derivative at `at` of the polynomial interpolating
/// `nodes` (Fornberg's recursion).
fn derivative_weights(nodes: &[f64], at: f64) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![[0.0f64; 2]; n];
    w[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - at;
    for i in 1..n {
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - at;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                w[i][1] = c1 * (w[i - 1][0] - c5 * w[i - 1][1]) / c2;
                w[i][0] = -c1 * c5 * w[i - 1][0] / c2;
            }
            w[j][1] = (c4 * w[j][1] - w[j][0]) / c3;
            w[j][0] = c4 * w[j][0] / c3;
        }
        c1 = c2;
    }
    w.into_iter().map(|x| x[1]).collect()
}

/// Nodes per derivative stencil; fourth-order accurate.
const STENCIL: usize = 5;

/// Finite-difference estimate of `𝓐(t) = i F(t)† Ḟ(t)` at every grid point,
/// from five-point stencils (centred where possible, shifted at the ends).
/// Samples are Hermitized.
pub fn connection_one_form(f: &FrameTrajectory) -> Result<Vec<ConnectionSample>> {
    connection_one_form_with(f, &Tolerances::default())
}

pub fn connection_one_form_with(f: &FrameTrajectory, tol: &Tolerances) -> Result<Vec<ConnectionSample>> {
    if f.len() < 3 {
        return Err(Error::Resolution("connection estimate needs at least three grid points".into()));
    }
    let overlap = f.min_adjacent_overlap();
    if overlap < tol.frame_overlap {
        return Err(Error::Resolution(format!(
            "adjacent frames overlap only {overlap:.4} (< {}); refine the grid",
            tol.frame_overlap
        )));
    }
    let (t, fr) = (f.times(), f.frames());
    let width = STENCIL.min(t.len());
    let samples = (0..t.len())
        .map(|j| {
            let lo = j.saturating_sub(width / 2).min(t.len() - width);
            let weights = derivative_weights(&t[lo..lo + width], t[j]);
            let deriv = weights
                .iter()
                .enumerate()
                .fold(CMatrix::zeros(f.dim(), f.rank()), |acc, (k, w)| acc + &fr[lo + k] * c(*w, 0.0));
            let a_matrix = hermitize(&(fr[j].adjoint() * deriv * I));
            ConnectionSample { time: t[j], a_matrix }
        })
        .collect();
    Ok(samples)
}

/// Holonomy `P exp(i∮𝓐)` of a cyclic trajectory.
///
/// Each step contributes `exp(i Ā_j Δt_j)`, where `Ā_j` is the connection
/// averaged over the step. That factor is evaluated as the unitary polar part
/// of the adjacent-frame overlap `F_{j+1}† F_j`, which makes the discrete
/// product covariant under gauge transformations at every resolution.
pub fn holonomy(f: &FrameTrajectory) -> Result<CMatrix> {
    if !f.is_cyclic() {
        return Err(Error::Precondition("holonomy requires a cyclic trajectory".into()));
    }
    let fr = f.frames();
    let mut u = identity(f.rank());
    for w in fr.windows(2) {
        u = polar_unitary(&(w[1].adjoint() * &w[0])) * u;
    }
    let first = &fr[0];
    let last = fr.last().expect("non-empty");
    u = polar_unitary(&(first.adjoint() * last)) * u;
    Ok(u)
}

/// Holonomy from sampled connection matrices: midpoint exponentials
/// `exp(i ½(𝓐_j + 𝓐_{j+1}) Δt_j)` multiplied in path order.
pub fn holonomy_from_connection(samples: &[ConnectionSample]) -> Result<CMatrix> {
    let k = samples.first().ok_or_else(|| Error::Resolution("no connection samples".into()))?.a_matrix.nrows();
    let mut u = identity(k);
    for w in samples.windows(2) {
        let dt = w[1].time - w[0].time;
        let mid = (&w[0].a_matrix + &w[1].a_matrix) * c(0.5, 0.0);
        u = linalg::unitary_propagator(&mid, -dt) * u;
    }
    Ok(u)
}

/// Holonomy along a cyclic trajectory computed through its connection samples.
pub fn holonomy_via_connection(f: &FrameTrajectory) -> Result<CMatrix> {
    if !f.is_cyclic() {
        return Err(Error::Precondition("holonomy requires a cyclic trajectory".into()));
    }
    holonomy_from_connection(&connection_one_form(f)?)
}

/// Applies `ζ′_k = Σ_l ζ_l V_lk` at every grid time.
pub fn gauge_transform(f: &FrameTrajectory, v: &[CMatrix]) -> Result<FrameTrajectory> {
    let tol = Tolerances::default();
    if v.len() != f.len() {
        return Err(Error::Dimension(format!("{} gauge matrices for {} grid points", v.len(), f.len())));
    }
    let k = f.rank();
    for (j, m) in v.iter().enumerate() {
        if m.shape() != (k, k) {
            return Err(Error::Dimension(format!("gauge matrix {j} is not {k}x{k}")));
        }
        let err = linalg::unitarity_error(m);
        if err > tol.unitary {
            return Err(Error::Precondition(format!("gauge matrix {j} is not unitary (error {err:.3e})")));
        }
    }
    if f.is_cyclic() {
        let gap = max_abs_diff(&v[0], v.last().expect("non-empty"));
        if gap > tol.cyclic {
            return Err(Error::GaugeViolation(gap));
        }
    }
    let frames = f.frames().iter().zip(v).map(|(fr, m)| fr * m).collect();
    FrameTrajectory::new(f.times().to_vec(), frames, f.is_cyclic())
}

/// Sine of the largest principal angle between the spans of two frames.
pub fn principal_angle_sine(a: &CMatrix, b: &CMatrix) -> f64 {
    let residual = b - a * (a.adjoint() * b);
    singular_values(&residual).first().copied().unwrap_or(0.0)
}

/// `W_kl = ⟨ζ′_k|ζ_l⟩` between the frame `primed` (columns `ζ′_k`) and the
/// frame `unprimed` (columns `ζ_l`) of the same subspace.
pub fn overlap_matrix(primed: &[StateVector], unprimed: &[StateVector]) -> Result<CMatrix> {
    overlap_matrix_frames(&frame_matrix(primed)?, &frame_matrix(unprimed)?)
}

pub fn overlap_matrix_frames(primed: &CMatrix, unprimed: &CMatrix) -> Result<CMatrix> {
    let tol = Tolerances::default();
    if primed.shape() != unprimed.shape() {
        return Err(Error::Dimension("frames have different shapes".into()));
    }
    for f in [primed, unprimed] {
        let err = max_abs_diff(&(f.adjoint() * f), &identity(f.ncols()));
        if err > tol.orthonormal {
            return Err(Error::Precondition(format!("frame not orthonormal (error {err:.3e})")));
        }
    }
    let sine = principal_angle_sine(primed, unprimed).max(principal_angle_sine(unprimed, primed));
    if sine > tol.subspace {
        return Err(Error::SpanMismatch(sine));
    }
    Ok(primed.adjoint() * unprimed)
}

/// Composite holonomy of loops traversed in list order, all expressed in the
/// frame of the first loop. `w_list[i]` is the overlap matrix
/// `⟨ζ^{(i)}_k(0)|ζ^{(0)}_l(0)⟩`; `w_list[0]` is normally the identity. The
/// result is `Π_{i=L-1..0} W_i† Z_i W_i`, which for two loops is `W†Z_mWZ_n`.
pub fn compose_loops(z_list: &[CMatrix], w_list: &[CMatrix]) -> Result<CMatrix> {
    if z_list.is_empty() || z_list.len() != w_list.len() {
        return Err(Error::Dimension(format!(
            "{} holonomies and {} overlap matrices",
            z_list.len(),
            w_list.len()
        )));
    }
    let k = z_list[0].nrows();
    if z_list.iter().chain(w_list).any(|m| m.shape() != (k, k)) {
        return Err(Error::Dimension(format!("all matrices must be {k}x{k}")));
    }
    let mut u = identity(k);
    for (z, w) in z_list.iter().zip(w_list) {
        u = w.adjoint() * z * w * u;
    }
    Ok(u)
}

/// `Σ_kl U_kl |ζ_k⟩⟨ζ_l|` for the frame `F` (columns `ζ_k`).
pub fn push_forward(u: &CMatrix, frame: &CMatrix) -> CMatrix {
    frame * u * frame.adjoint()
}

/// Holonomy of one loop together with the gate it induces on the loop's
/// computational register.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopGate {
    /// `Z` in the frame `(|d⟩, |b⟩)` of the loop's starting point.
    pub holonomy: CMatrix,
    /// Starting frame, `N×2`.
    pub frame: CMatrix,
    /// `U` on the computational basis, identity outside the loop subspace.
    pub gate: CMatrix,
}

/// `B†(F Z F† + 1 − F F†)B` with `B` the computational basis of `spec`.
pub fn register_gate(spec: &LoopSpec, z: &CMatrix, frame: &CMatrix) -> Result<CMatrix> {
    let b = frame_matrix(&spec.computational_basis())?;
    let n = frame.nrows();
    let full = push_forward(z, frame) + identity(n) - frame * frame.adjoint();
    Ok(b.adjoint() * full * b)
}

pub fn loop_gate(spec: &LoopSpec, steps: usize) -> Result<LoopGate> {
    let f = lift_loop_with(spec, steps, &Tolerances::default())?;
    let z = holonomy(&f)?;
    let frame = f.frame(0).clone();
    let gate = register_gate(spec, &z, &frame)?;
    Ok(LoopGate { holonomy: z, frame, gate })
}

/// Loops traversed in order, combined through [`compose_loops`] in the frame
/// of the first loop. All loops must share the same subspace at `t = 0`.
pub fn compose_loop_gates(specs: &[LoopSpec], steps: usize) -> Result<LoopGate> {
    let first = specs.first().ok_or_else(|| Error::Precondition("no loops to compose".into()))?;
    let parts = specs.iter().map(|s| loop_gate(s, steps)).collect::<Result<Vec<_>>>()?;
    if specs.iter().any(|s| s.subspace != first.subspace) {
        return Err(Error::Precondition("loops act on different registers".into()));
    }
    let f1 = &parts[0].frame;
    let w = parts.iter().map(|p| overlap_matrix_frames(&p.frame, f1)).collect::<Result<Vec<_>>>()?;
    let z: Vec<CMatrix> = parts.iter().map(|p| p.holonomy.clone()).collect();
    let u = compose_loops(&z, &w)?;
    let gate = register_gate(first, &u, f1)?;
    Ok(LoopGate { holonomy: u, frame: f1.clone(), gate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, pauli_z};
    use crate::models::{PulseEnvelope, Subspace};

    fn square_loop(theta: f64, phi: f64) -> LoopSpec {
        LoopSpec::from_angles(theta, phi, PulseEnvelope::square_pi(1.0, 0.0).unwrap(), Subspace::OneQubit).unwrap()
    }

    #[test]
    fn lift_starts_at_dark_bright() {
        let l = square_loop(0.8, 0.3);
        let f = lift_loop(&l).unwrap();
        let (d, b, _) = l.dark_bright_excited().unwrap();
        let v = f.frame_vectors(0);
        assert!((v[0].amplitudes() - d.amplitudes()).norm() < 1e-15);
        assert!((v[1].amplitudes() - b.amplitudes()).norm() < 1e-15);
        assert!(max_abs_diff(f.frame(0), f.frame(f.len() - 1)) < 1e-8);
    }

    #[test]
    fn lift_at_quarter_turn_is_excited() {
        // δ = π/2 at the window midpoint: e^{iπ/2}(−i)|e⟩ = |e⟩
        let l = square_loop(1.2, 0.5);
        let f = lift_loop_with(&l, 2, &Tolerances::default()).unwrap();
        let zeta2 = f.frame_vectors(1)[1].clone();
        assert!((zeta2.amplitudes()[2] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(zeta2.amplitudes().rows(0, 2).norm() < 1e-15);
    }

    #[test]
    fn lift_rejects_non_pi_area() {
        let pulse = PulseEnvelope::square(1.0, 0.0, 3.0).unwrap();
        let l = LoopSpec::from_angles(0.3, 0.0, pulse, Subspace::OneQubit).unwrap();
        assert!(matches!(lift_loop(&l), Err(Error::NotCyclic { .. })));
    }

    #[test]
    fn connection_of_lift_is_diagonal_rabi_frequency() {
        let l = square_loop(0.9, 2.0);
        let f = lift_loop(&l).unwrap();
        let samples = connection_one_form(&f).unwrap();
        for s in samples.iter().step_by(97) {
            assert!(s.a_matrix[(0, 0)].norm() < 1e-12);
            assert!(s.a_matrix[(0, 1)].norm() < 1e-12);
            assert!((s.a_matrix[(1, 1)] - c(-l.pulse.value(s.time), 0.0)).norm() < 1e-5);
        }
    }

    #[test]
    fn constant_frame_has_zero_connection_and_trivial_holonomy() {
        let frame = orthonormalize(&CMatrix::from_fn(3, 2, |i, j| c((i + 2 * j) as f64, (i * j) as f64 + 0.5)));
        let times: Vec<f64> = (0..50).map(|j| j as f64 * 0.1).collect();
        let f = FrameTrajectory::new(times, vec![frame; 50], true).unwrap();
        for s in connection_one_form(&f).unwrap() {
            assert!(max_abs(&s.a_matrix) < 1e-13);
        }
        assert!(max_abs_diff(&holonomy(&f).unwrap(), &identity(2)) < 1e-13);
    }

    #[test]
    fn holonomy_rejects_open_trajectory() {
        let frame = identity(3).columns(0, 2).clone_owned();
        let f = FrameTrajectory::new(vec![0.0, 1.0], vec![frame.clone(), frame], false).unwrap();
        assert!(matches!(holonomy(&f), Err(Error::Precondition(_))));
    }

    #[test]
    fn single_rabi_oscillation_gives_z() {
        let f = lift_loop(&square_loop(0.4, 1.0)).unwrap();
        assert!(max_abs_diff(&holonomy(&f).unwrap(), &pauli_z()) < 1e-12);
        assert!(max_abs_diff(&holonomy_via_connection(&f).unwrap(), &pauli_z()) < 1e-5);
    }

    #[test]
    fn coarse_grid_is_a_resolution_error() {
        let f = lift_loop_with(&square_loop(0.4, 1.0), 10, &Tolerances::default()).unwrap();
        assert!(matches!(connection_one_form(&f), Err(Error::Resolution(_))));
        // the overlap-based holonomy still runs
        assert!(max_abs_diff(&holonomy(&f).unwrap(), &pauli_z()) < 1e-12);
    }

    #[test]
    fn constant_gauge_conjugates_connection() {
        let f = lift_loop_with(&square_loop(1.0, 0.2), 400, &Tolerances::default()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0)]);
        let g = gauge_transform(&f, &vec![v.clone(); f.len()]).unwrap();
        let a = connection_one_form(&f).unwrap();
        let ag = connection_one_form(&g).unwrap();
        for (x, y) in a.iter().zip(&ag).step_by(37) {
            let expected = v.adjoint() * &x.a_matrix * &v;
            assert!(max_abs_diff(&expected, &y.a_matrix) < 1e-12);
        }
        let expected = v.adjoint() * pauli_z() * &v;
        assert!(max_abs_diff(&holonomy(&g).unwrap(), &expected) < 1e-12);
    }

    #[test]
    fn gauge_must_be_single_valued() {
        let f = lift_loop_with(&square_loop(1.0, 0.2), 100, &Tolerances::default()).unwrap();
        let v: Vec<CMatrix> = f
            .times()
            .iter()
            .map(|t| {
                let mut m = identity(2);
                m[(1, 1)] = C64::from_polar(1.0, 0.5 * t);
                m
            })
            .collect();
        assert!(matches!(gauge_transform(&f, &v), Err(Error::GaugeViolation(_))));
    }

    #[test]
    fn overlap_of_identical_and_permuted_frames() {
        let l = square_loop(0.7, 0.1);
        let f = lift_loop_with(&l, 10, &Tolerances::default()).unwrap();
        let v = f.frame_vectors(0);
        let w = overlap_matrix(&v, &v).unwrap();
        assert!(max_abs_diff(&w, &identity(2)) < 1e-15);
        let swapped = vec![v[1].clone(), v[0].clone()];
        let p = overlap_matrix(&swapped, &v).unwrap();
        let perm = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(max_abs_diff(&p, &perm) < 1e-15);
    }

    #[test]
    fn overlap_rejects_different_subspaces() {
        let a = vec![StateVector::basis(3, 0), StateVector::basis(3, 1)];
        let b = vec![StateVector::basis(3, 0), StateVector::basis(3, 2)];
        assert!(matches!(overlap_matrix(&a, &b), Err(Error::SpanMismatch(_))));
    }

    #[test]
    fn compose_validates_and_reduces() {
        let z = pauli_z();
        assert!(max_abs_diff(&compose_loops(&[z.clone()], &[identity(2)]).unwrap(), &z) == 0.0);
        assert!(compose_loops(&[z.clone()], &[]).is_err());
        assert!(compose_loops(&[z], &[identity(3)]).is_err());
    }

    #[test]
    fn loop_and_reverse_cancel() {
        let f = lift_loop(&square_loop(2.0, 4.0)).unwrap();
        let u = holonomy(&f).unwrap();
        let r = holonomy(&f.reversed()).unwrap();
        let total = compose_loops(&[u, r], &[identity(2), identity(2)]).unwrap();
        assert!(max_abs_diff(&total, &identity(2)) < 1e-7);
    }

    #[test]
    fn loop_gate_is_n_dot_sigma() {
        let (theta, phi) = (1.1, 0.7);
        let g = loop_gate(&square_loop(theta, phi), 400).unwrap();
        let expected = linalg::pauli_dot(crate::models::unit_vector(theta, phi));
        assert!(max_abs_diff(&g.gate, &expected) < 1e-12);
        let two = compose_loop_gates(&[square_loop(theta, phi), square_loop(theta, phi)], 400).unwrap();
        assert!(max_abs_diff(&two.gate, &identity(2)) < 1e-12);
    }

    #[test]
    fn stencil_weights_match_central_differences() {
        let w = derivative_weights(&[-2.0, -1.0, 0.0, 1.0, 2.0], 0.0);
        let expected = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        // exact for quartics at a shifted point on an uneven grid
        let nodes = [0.0, 0.3, 0.5, 1.1, 1.4];
        let w = derivative_weights(&nodes, 0.0);
        let d: f64 = w.iter().zip(nodes).map(|(w, x)| w * (x * x * x * x - 2.0 * x * x + 3.0 * x)).sum();
        assert!((d - 3.0).abs() < 1e-12);
    }

    #[test]
    fn json_export_roundtrip() {
        let f = lift_loop_with(&square_loop(0.5, 0.5), 8, &Tolerances::default()).unwrap();
        let json = f.to_json();
        assert_eq!(json.frames[0].len(), 12);
        let back = FrameTrajectory::from_json(&json).unwrap();
        for (a, b) in f.frames().iter().zip(back.frames()) {
            assert!(max_abs_diff(a, b) < 1e-15);
        }
    }
}
