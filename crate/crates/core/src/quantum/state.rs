use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

/// Density matrix of a `d`-level system.
///
/// Traces below one are permitted so that outputs of trace-decreasing maps
/// remain representable.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    dim: usize,
    matrix: CMatrix,
}

impl QuantumState {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidDimension(matrix.nrows()));
        }
        let herm = linalg::hermiticity_defect(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::NumericalDrift {
                what: "state is not Hermitian",
                magnitude: herm,
                tolerance: HERMITIAN_TOL,
            });
        }
        let min_eig = linalg::hermitian_eigenvalues(&matrix)[0];
        if min_eig < -PSD_TOL {
            return Err(Error::ContractViolation(format!(
                "state is not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )));
        }
        let tr = linalg::trace(&matrix).re;
        if tr <= 0.0 || tr > 1.0 + TRACE_TOL {
            return Err(Error::ContractViolation(format!(
                "state trace {tr} outside (0, 1]"
            )));
        }
        Ok(Self {
            dim: matrix.nrows(),
            matrix,
        })
    }

    /// `|ψ⟩⟨ψ|` for the normalized `amplitudes`.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let d = amplitudes.len();
        let psi: Vec<C64> = amplitudes.iter().map(|a| a / norm).collect();
        let matrix = CMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj());
        Ok(Self { dim: d, matrix })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self::pure(&amplitudes)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            dim,
            matrix: linalg::identity(dim).scale(1.0 / dim as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// `U ρ U†`.
    pub fn conjugated(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim || unitary.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: unitary.nrows(),
            });
        }
        let m = unitary * &self.matrix * unitary.adjoint();
        Ok(Self {
            dim: self.dim,
            matrix: linalg::hermitian_part(&m),
        })
    }

    pub fn tensor(&self, other: &QuantumState) -> QuantumState {
        QuantumState {
            dim: self.dim * other.dim,
            matrix: linalg::kron(&self.matrix, &other.matrix),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ZERO]);
        assert!(matches!(
            QuantumState::new(m),
            Err(Error::NumericalDrift { .. })
        ));
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(1.2, 0.0), ZERO, ZERO, C64::new(-0.2, 0.0)]);
        assert!(matches!(
            QuantumState::new(m),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn allows_subnormalized_trace() {
        let m = linalg::identity(2).scale(0.3);
        let s = QuantumState::new(m).unwrap();
        assert!((s.trace() - 0.6).abs() < 1e-15);
        assert!(QuantumState::new(linalg::identity(2)).is_err());
    }

    #[test]
    fn pure_state_normalizes() {
        let s = QuantumState::pure(&[ONE, ONE]).unwrap();
        assert!((s.trace() - 1.0).abs() < 1e-15);
        assert!((s.matrix()[(0, 1)] - C64::new(0.5, 0.0)).norm() < 1e-15);
    }
}
