//! Dense complex linear algebra for the small systems simulated here.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. The Kronecker product uses
//! the row-major convention: index `(i, j)` of `A ⊗ B` is `i * dim_B + j`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest dimension supported by the dense routines.
pub const MAX_DIM: usize = 16;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// `n·σ` for a real three-vector.
pub fn pauli_dot(n: [f64; 3]) -> CMatrix {
    pauli_x() * c(n[0], 0.0) + pauli_y() * c(n[1], 0.0) + pauli_z() * c(n[2], 0.0)
}

/// Basis vector `|index⟩` of a `dim`-dimensional space.
pub fn basis_vector(dim: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[index] = ONE;
    v
}

/// `|a⟩⟨b|`
pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

/// `|i⟩⟨j|` in dimension `dim`.
pub fn unit_matrix(dim: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = ONE;
    m
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖a − b‖_max`; panics on shape mismatch.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_error(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    hermiticity_error(m) <= tol
}

pub fn unitarity_error(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(m.adjoint() * m), &identity(m.nrows()))
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    unitarity_error(m) <= tol
}

/// `(M + M†) / 2`
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Eigen-decomposition of a Hermitian matrix: real eigenvalues in ascending
/// order and the unitary whose columns are the matching eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.nrows(), |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Returns `exp(H)` with `H` given through its spectral data `H = V diag(λ) V†`
/// and `f(λ)` applied to each eigenvalue.
fn spectral_apply(vectors: &CMatrix, values: &[f64], f: impl Fn(f64) -> C64) -> CMatrix {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (col, &lambda) in values.iter().enumerate() {
        let factor = f(lambda);
        for row in 0..n {
            scaled[(row, col)] *= factor;
        }
    }
    scaled * vectors.adjoint()
}

/// `exp(scale · M)`.
///
/// Hermitian and anti-Hermitian `M` go through an eigendecomposition, which
/// keeps unitary results unitary to rounding. Any other square matrix falls
/// back to scaling-and-squaring Padé.
pub fn matrix_exponential(m: &CMatrix, scale: C64) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n > MAX_DIM {
        return Err(Error::Dimension(format!("dimension {n} exceeds {MAX_DIM}")));
    }
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let scale_tol = 1e-14 * max_abs(m).max(1.0);
    if hermiticity_error(m) <= scale_tol {
        let (values, vectors) = hermitian_eigen(&hermitize(m));
        return Ok(spectral_apply(&vectors, &values, |l| (scale * l).exp()));
    }
    let anti = m * (-I);
    if hermiticity_error(&anti) <= scale_tol {
        let (values, vectors) = hermitian_eigen(&hermitize(&anti));
        return Ok(spectral_apply(&vectors, &values, |l| (scale * I * l).exp()));
    }
    Ok((m * scale).exp())
}

/// `exp(−i · t · H)` for Hermitian `H`. Skips the Hermiticity probe.
pub fn unitary_propagator(h: &CMatrix, t: f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(&hermitize(h));
    spectral_apply(&vectors, &values, |l| c(0.0, -t * l).exp())
}

/// Kronecker product `A ⊗ B`, row-major (`i * dim_B + j`).
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of two vectors, same index convention.
pub fn tensor_vector(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// Unitary polar factor of a square matrix via its SVD.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u requested");
    let v_t = svd.v_t.expect("svd v_t requested");
    u * v_t
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Brings `b` to the global phase of `a` and returns it. The reference entry
/// is the largest-magnitude entry of `a`; both matrices are rotated so that
/// entry is real and positive.
pub fn align_global_phase(a: &CMatrix, b: &CMatrix) -> (CMatrix, CMatrix) {
    let (mut best, mut idx) = (-1.0, (0, 0));
    for r in 0..a.nrows() {
        for col in 0..a.ncols() {
            let mag = a[(r, col)].norm();
            if mag > best {
                best = mag;
                idx = (r, col);
            }
        }
    }
    let rotate = |m: &CMatrix| {
        let z = m[idx];
        if z.norm() == 0.0 {
            m.clone()
        } else {
            m * (z.conj() / z.norm())
        }
    };
    (rotate(a), rotate(b))
}

/// Max-norm distance between two matrices after global-phase alignment.
pub fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let (a, b) = align_global_phase(a, b);
    max_abs_diff(&a, &b)
}

/// Frobenius distance between two matrices after global-phase alignment.
pub fn phase_aligned_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    let (a, b) = align_global_phase(a, b);
    (a - b).norm()
}

/// Phase-invariant distance between two unitaries of equal dimension `d`:
/// `sqrt(1 − |Tr(A†B)| / d)`.
pub fn unitary_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a.nrows() as f64;
    let overlap = (a.adjoint() * b).trace().norm() / d;
    (1.0 - overlap).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exp_of_zero_is_identity() {
        let z = CMatrix::zeros(4, 4);
        let e = matrix_exponential(&z, c(3.0, -2.0)).unwrap();
        assert!(max_abs_diff(&e, &identity(4)) < 1e-15);
    }

    #[test]
    fn exp_pauli_x_half_pi() {
        let e = matrix_exponential(&pauli_x(), c(0.0, -PI / 2.0)).unwrap();
        let expected = pauli_x() * (-I);
        assert!(max_abs_diff(&e, &expected) < 1e-14);
    }

    #[test]
    fn exp_rejects_non_square() {
        let m = CMatrix::zeros(2, 3);
        assert!(matches!(matrix_exponential(&m, ONE), Err(Error::Dimension(_))));
    }

    #[test]
    fn exp_rejects_oversized() {
        let m = CMatrix::zeros(17, 17);
        assert!(matches!(matrix_exponential(&m, ONE), Err(Error::Dimension(_))));
    }

    // Oracle: the real 2x2 rotation generated by K restricted to span{b, e}
    // is computed by hand; the dark direction lies in the kernel of K.
    #[test]
    fn exp_bright_excited_pi_rotation() {
        // basis (d, b, e) taken as the standard basis of C^3
        let k = unit_matrix(3, 2, 1) + unit_matrix(3, 1, 2);
        let u = matrix_exponential(&k, c(0.0, -PI)).unwrap();
        let mut expected = CMatrix::zeros(3, 3);
        expected[(0, 0)] = ONE;
        expected[(1, 1)] = -ONE;
        expected[(2, 2)] = -ONE;
        assert!(max_abs_diff(&u, &expected) < 1e-14);
    }

    #[test]
    fn exp_general_matrix_uses_pade() {
        // nilpotent: exp(N) = I + N
        let n = unit_matrix(2, 0, 1) * c(2.0, 1.0);
        let e = matrix_exponential(&n, ONE).unwrap();
        let expected = identity(2) + &n;
        assert!(max_abs_diff(&e, &expected) < 1e-13);
    }

    #[test]
    fn anti_hermitian_generator_gives_unitary() {
        let h = CMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, 0.7), c(0.1, -0.7), c(-1.2, 0.0)]);
        let a = &h * I;
        let u = matrix_exponential(&a, c(2.5, 0.0)).unwrap();
        assert!(unitarity_error(&u) < 1e-13);
        let direct = unitary_propagator(&h, -2.5);
        assert!(max_abs_diff(&u, &direct) < 1e-13);
    }

    #[test]
    fn kron_identity_and_zz() {
        let i4 = tensor_product(&identity(2), &identity(2));
        assert!(max_abs_diff(&i4, &identity(4)) == 0.0);
        let zz = tensor_product(&pauli_z(), &pauli_z());
        let v = zz * basis_vector(4, 0);
        assert_eq!(v, basis_vector(4, 0));
    }

    #[test]
    fn kron_index_convention() {
        let a = unit_matrix(2, 1, 0);
        let b = unit_matrix(3, 2, 1);
        let k = tensor_product(&a, &b);
        assert_eq!(k[(3 + 2, 1)], ONE);
        assert_eq!(k.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn phase_alignment_ignores_global_phase() {
        let u = pauli_dot([0.6, 0.0, 0.8]);
        let v = &u * c(0.3, 0.4) * c(2.0, 0.0);
        assert!(phase_aligned_distance(&u, &v) < 1e-15);
        assert!(unitary_distance(&u, &v) < 1e-7);
    }
}
