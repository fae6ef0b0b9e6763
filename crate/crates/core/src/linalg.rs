//! Dense complex linear algebra shared by the quantum and witness modules.
//!
//! Operators are vectorized by row-major stacking, `vec(A)[i*d + j] = A[i, j]`,
//! so that `vec(U A U†) = (U ⊗ Ū) vec(A)` and `⟨⟨A|B⟩⟩ = vec(A)† vec(B) = Tr(A† B)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `max |A - A†|` entrywise.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `max |U U† - I|` entrywise.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u * u.adjoint()), &identity(u.nrows()))
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mapped = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&x| C64::new(f(x), 0.0)),
    );
    let q = &eig.eigenvectors;
    q * CMatrix::from_diagonal(&mapped) * q.adjoint()
}

pub fn vectorize(m: &CMatrix) -> CVector {
    let (rows, cols) = m.shape();
    CVector::from_iterator(
        rows * cols,
        (0..rows).flat_map(|i| (0..cols).map(move |j| m[(i, j)])),
    )
}

pub fn devectorize(v: &CVector, dim: usize) -> CMatrix {
    debug_assert_eq!(v.len(), dim * dim);
    CMatrix::from_fn(dim, dim, |i, j| v[i * dim + j])
}

/// Hilbert–Schmidt inner product `Tr(A† B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues of a general complex square matrix (diagonal of its Schur form).
pub fn eigenvalues(m: &CMatrix) -> Vec<C64> {
    let (_, t) = m.clone().schur().unpack();
    t.diagonal().iter().copied().collect()
}

/// Right eigendecomposition `A = R diag(λ) R⁻¹` of a general complex matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    /// Unit-norm right eigenvectors as columns.
    pub vectors: CMatrix,
    /// 2-norm condition number of `vectors`.
    pub condition: f64,
}

impl Eigen {
    /// Rows are the left eigenvectors, normalized so that `L R = I`.
    pub fn left_vectors(&self) -> Option<CMatrix> {
        self.vectors.clone().try_inverse()
    }
}

/// Eigendecomposition via complex Schur form and triangular back-substitution.
///
/// Exactly (or numerically) repeated eigenvalues whose coupling in the Schur
/// form is at rounding level are treated as semisimple. A genuine Jordan
/// coupling shows up as a large `condition`.
pub fn eigen_decompose(m: &CMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::ContractViolation(format!(
            "eigendecomposition of a non-square {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let (q, t) = m.clone().schur().unpack();
    let scale = max_abs(&t).max(f64::MIN_POSITIVE);
    let tiny = 64.0 * f64::EPSILON * scale * n as f64;
    let coincident = 1e-12 * scale;

    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = ONE;
        for i in (0..k).rev() {
            let mut acc = ZERO;
            for j in (i + 1)..=k {
                acc += t[(i, j)] * y[(j, k)];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < coincident {
                if acc.norm() <= tiny {
                    continue;
                }
                denom = C64::new(coincident, 0.0);
            }
            y[(i, k)] = -acc / denom;
        }
    }

    let mut vectors = q * y;
    for mut col in vectors.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= C64::new(norm, 0.0);
        }
    }
    let sv = vectors.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };

    Ok(Eigen {
        values: t.diagonal().iter().copied().collect(),
        vectors,
        condition,
    })
}

/// Principal argument in `(-π, π]`.
pub fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a <= -std::f64::consts::PI {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

/// Real symmetric eigenvalues, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn row_major_vectorization_matches_conjugation_superoperator() {
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0)],
        );
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, -1.0), c(0.5, 3.0), c(-1.0, 0.0)]);
        let lhs = kron(&u, &u.map(|z| z.conj())) * vectorize(&a);
        let rhs = vectorize(&(&u * &a * u.adjoint()));
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn vectorized_inner_product_is_hilbert_schmidt() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.5), c(-2.0, 0.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(1.0, 1.0), c(0.0, -2.0), c(4.0, 0.0)]);
        let via_vec = vectorize(&a).dotc(&vectorize(&b));
        let via_trace = trace(&(a.adjoint() * &b));
        assert!((via_vec - via_trace).norm() < 1e-14);
        assert!((hs_inner(&a, &b) - via_trace).norm() < 1e-14);
    }

    #[test]
    fn devectorize_inverts_vectorize() {
        let a = CMatrix::from_fn(3, 3, |i, j| c(i as f64, j as f64 - 1.0));
        assert_eq!(devectorize(&vectorize(&a), 3), a);
    }

    #[test]
    fn eigen_decompose_non_normal_matrix() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0), c(2.0, 1.0), c(0.0, 3.0),
                c(0.0, 0.0), c(0.5, 0.5), c(1.0, 0.0),
                c(0.2, 0.0), c(0.0, 0.0), c(-0.3, 0.1),
            ],
        );
        let eig = eigen_decompose(&m).unwrap();
        let r = &eig.vectors;
        let l = eig.left_vectors().unwrap();
        let d = CMatrix::from_diagonal(&CVector::from_vec(eig.values.clone()));
        assert!(max_abs_diff(&(r * d * l), &m) < 1e-12);
    }

    #[test]
    fn degenerate_normal_matrix_is_well_conditioned() {
        let m = identity(4);
        let eig = eigen_decompose(&m).unwrap();
        assert!(eig.condition < 1.0 + 1e-12);
        assert!(eig.values.iter().all(|z| (z - ONE).norm() < 1e-14));
    }

    #[test]
    fn jordan_block_is_flagged_by_condition_number() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        let eig = eigen_decompose(&m).unwrap();
        assert!(eig.condition > 1e8, "condition {}", eig.condition);
    }

    #[test]
    fn hermitian_function_square_root() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let s = hermitian_function(&m, f64::sqrt);
        assert!(max_abs_diff(&(&s * &s), &m) < 1e-13);
    }

    #[test]
    fn principal_arg_maps_negative_pi_to_pi() {
        assert_eq!(principal_arg(c(-1.0, -0.0)), std::f64::consts::PI);
    }
}
