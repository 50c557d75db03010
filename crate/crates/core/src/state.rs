//! Pure and mixed quantum states, fidelity, and subspace projection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, hermitian_eigenvalues, hermiticity_error, hermitize, outer, CMatrix, CVector, C64,
};
use crate::tolerances::Tolerances;

/// State vector of an N-level system.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: CVector) -> Self {
        Self { amplitudes }
    }

    pub fn from_slice(amplitudes: &[C64]) -> Self {
        Self { amplitudes: CVector::from_column_slice(amplitudes) }
    }

    /// Basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        Self { amplitudes: linalg::basis_vector(dim, index) }
    }

    /// Normalized copy; fails for the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::Precondition("cannot normalize the zero vector".into()));
        }
        Ok(Self { amplitudes: &self.amplitudes / c(norm, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_inner(self) -> CVector {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Embeds the amplitudes into a larger space, padding with zeros.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::Dimension(format!("cannot embed dimension {} into {dim}", self.dim())));
        }
        let mut v = CVector::zeros(dim);
        v.rows_mut(0, self.dim()).copy_from(&self.amplitudes);
        Ok(Self { amplitudes: v })
    }

    pub fn apply(&self, op: &CMatrix) -> Result<Self> {
        if op.ncols() != self.dim() {
            return Err(Error::Dimension(format!(
                "operator with {} columns applied to a {}-dimensional state",
                op.ncols(),
                self.dim()
            )));
        }
        Ok(Self { amplitudes: op * &self.amplitudes })
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> CMatrix {
        outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { entries: self.projector() }
    }
}

/// Density operator. Construction through [`DensityMatrix::new`] validates
/// Hermiticity, unit trace and positivity against a tolerance table.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix, tol: &Tolerances) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        let herm = hermiticity_error(&entries);
        if herm > tol.hermitian.max(1e-10) {
            return Err(Error::Numerical(format!("density matrix not Hermitian (error {herm:.3e})")));
        }
        let rho = Self { entries: hermitize(&entries) };
        let dev = rho.trace_deviation();
        if dev > tol.trace {
            return Err(Error::Numerical(format!("density matrix trace deviates from 1 by {dev:.3e}")));
        }
        let min_eig = rho.min_eigenvalue();
        if min_eig < tol.positivity {
            return Err(Error::Numerical(format!("density matrix has eigenvalue {min_eig:.3e}")));
        }
        Ok(rho)
    }

    /// Wraps a matrix with no validation. Used by integrators that track the
    /// invariants themselves.
    pub fn from_raw(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { entries: linalg::identity(dim) * c(1.0 / dim as f64, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_inner(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn trace_deviation(&self) -> f64 {
        (self.trace() - c(1.0, 0.0)).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&hermitize(&self.entries))
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    pub fn population(&self, level: usize) -> f64 {
        self.entries[(level, level)].re
    }

    /// Trace distance `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = hermitize(&(&self.entries - &other.entries));
        0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>()
    }

    /// `U ρ U†`
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self { entries: u * &self.entries * u.adjoint() }
    }
}

/// `⟨target|ρ|target⟩`.
pub fn state_fidelity(target: &StateVector, actual: &DensityMatrix) -> Result<f64> {
    state_fidelity_with(target, actual, &Tolerances::default())
}

pub fn state_fidelity_with(target: &StateVector, actual: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    if target.dim() != actual.dim() {
        return Err(Error::Dimension(format!(
            "target dimension {} vs density matrix dimension {}",
            target.dim(),
            actual.dim()
        )));
    }
    if !target.is_normalized(tol.normalization.max(1e-10)) {
        return Err(Error::Precondition(format!("target state has norm² {}", target.norm_sqr())));
    }
    let herm = hermiticity_error(actual.entries());
    if herm > tol.imaginary {
        return Err(Error::Numerical(format!("density matrix not Hermitian (error {herm:.3e})")));
    }
    let psi = target.amplitudes();
    let value = psi.dotc(&(actual.entries() * psi));
    if value.im.abs() > tol.imaginary {
        return Err(Error::Numerical(format!("fidelity has imaginary part {:.3e}", value.im)));
    }
    Ok(value.re.clamp(0.0, 1.0))
}

/// Checks the columns of `basis` form an orthonormal set.
pub fn orthonormality_error(basis: &[StateVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b) - c(expected, 0.0)).norm());
        }
    }
    worst
}

/// Stacks a list of vectors as columns of an `N×K` matrix.
pub fn frame_matrix(basis: &[StateVector]) -> Result<CMatrix> {
    let n = basis.first().map(StateVector::dim).unwrap_or(0);
    if basis.iter().any(|v| v.dim() != n) {
        return Err(Error::Dimension("frame vectors have different dimensions".into()));
    }
    Ok(CMatrix::from_fn(n, basis.len(), |r, col| basis[col].amplitudes()[r]))
}

/// `K×K` matrix `⟨basis_k|U|basis_l⟩`.
pub fn project_onto_subspace(u: &CMatrix, basis: &[StateVector]) -> Result<CMatrix> {
    let tol = Tolerances::default();
    let err = orthonormality_error(basis);
    if err > tol.orthonormal {
        return Err(Error::Precondition(format!("projection basis not orthonormal (error {err:.3e})")));
    }
    let frame = frame_matrix(basis)?;
    if u.nrows() != frame.nrows() || u.ncols() != frame.nrows() {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, basis vectors have dimension {}",
            u.nrows(),
            u.ncols(),
            frame.nrows()
        )));
    }
    Ok(frame.adjoint() * u * frame)
}

/// Serializable state amplitudes as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AmplitudesJson(pub Vec<[f64; 2]>);

impl From<&StateVector> for AmplitudesJson {
    fn from(v: &StateVector) -> Self {
        Self(v.amplitudes().iter().map(|z| [z.re, z.im]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn pure_state_fidelity_is_one() {
        let xi = StateVector::from_slice(&[c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]);
        let f = state_fidelity(&xi, &xi.to_density()).unwrap();
        assert!((f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_fidelity_is_half() {
        let rho = DensityMatrix::maximally_mixed(2);
        for theta in [0.0, 0.4, 2.0] {
            let xi = StateVector::from_slice(&[c(f64::cos(theta), 0.0), c(0.0, f64::sin(theta))]);
            assert!((state_fidelity(&xi, &rho).unwrap() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn fidelity_rejects_non_hermitian() {
        let mut m = identity(2) * c(0.5, 0.0);
        m[(0, 1)] = c(0.1, 0.0);
        let rho = DensityMatrix::from_raw(m);
        let xi = StateVector::basis(2, 0);
        assert!(matches!(state_fidelity(&xi, &rho), Err(Error::Numerical(_))));
    }

    #[test]
    fn fidelity_rejects_dimension_mismatch() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(state_fidelity(&StateVector::basis(2, 0), &rho), Err(Error::Dimension(_))));
    }

    #[test]
    fn density_validation() {
        let tol = Tolerances::default();
        assert!(DensityMatrix::new(identity(2), &tol).is_err());
        let mut m = identity(2) * c(0.5, 0.0);
        m[(0, 0)] = c(1.2, 0.0);
        m[(1, 1)] = c(-0.2, 0.0);
        assert!(DensityMatrix::new(m, &tol).is_err());
        assert!(DensityMatrix::new(identity(3) * c(1.0 / 3.0, 0.0), &tol).is_ok());
    }

    #[test]
    fn projecting_identity_gives_identity() {
        let s = FRAC_1_SQRT_2;
        let basis = vec![
            StateVector::from_slice(&[c(s, 0.0), c(0.0, s), c(0.0, 0.0)]),
            StateVector::from_slice(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]),
        ];
        let p = project_onto_subspace(&identity(3), &basis).unwrap();
        assert!(max_abs_diff(&p, &identity(2)) < 1e-15);
    }

    #[test]
    fn projection_rejects_non_orthonormal_basis() {
        let basis = vec![StateVector::basis(3, 0), StateVector::from_slice(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])];
        assert!(matches!(project_onto_subspace(&identity(3), &basis), Err(Error::Precondition(_))));
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states() {
        let a = StateVector::basis(2, 0).to_density();
        let b = StateVector::basis(2, 1).to_density();
        assert!((a.trace_distance(&b) - 1.0).abs() < 1e-14);
    }
}
