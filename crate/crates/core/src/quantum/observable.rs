use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};

use super::state::{QuantumState, HERMITIAN_TOL};

const EXPECTATION_IMAG_TOL: f64 = 1e-9;

/// A two-outcome observable with eigenvalues ±1, `M = 2P₊ − I`.
///
/// The `+1` projector is carried explicitly so that finite-shot sampling can
/// draw the binomial count of `+1` outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    dim: usize,
    matrix: CMatrix,
    plus_projector: CMatrix,
}

impl Observable {
    pub fn new(matrix: CMatrix, plus_projector: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || !matrix.is_square() {
            return Err(Error::InvalidDimension(dim));
        }
        if plus_projector.shape() != matrix.shape() {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: plus_projector.nrows(),
            });
        }
        let herm = linalg::hermiticity_defect(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::NumericalDrift {
                what: "observable is not Hermitian",
                magnitude: herm,
                tolerance: HERMITIAN_TOL,
            });
        }
        let proj_herm = linalg::hermiticity_defect(&plus_projector);
        let idempotent = linalg::max_abs_diff(&(&plus_projector * &plus_projector), &plus_projector);
        if proj_herm > HERMITIAN_TOL || idempotent > HERMITIAN_TOL {
            return Err(Error::ContractViolation(format!(
                "plus_projector is not an orthogonal projector (defect {:.3e})",
                proj_herm.max(idempotent)
            )));
        }
        let model = plus_projector.scale(2.0) - linalg::identity(dim);
        let mismatch = linalg::max_abs_diff(&model, &matrix);
        if mismatch > HERMITIAN_TOL {
            return Err(Error::ContractViolation(format!(
                "observable differs from 2P₊ − I by {mismatch:.3e}"
            )));
        }
        Ok(Self {
            dim,
            matrix,
            plus_projector,
        })
    }

    pub fn from_plus_projector(plus_projector: CMatrix) -> Result<Self> {
        let dim = plus_projector.nrows();
        let matrix = plus_projector.scale(2.0) - linalg::identity(dim);
        Self::new(matrix, plus_projector)
    }

    fn diagonal(signs: impl Iterator<Item = bool>) -> Self {
        let signs: Vec<bool> = signs.collect();
        let dim = signs.len();
        let plus = CMatrix::from_fn(dim, dim, |i, j| {
            if i == j && signs[i] {
                C64::new(1.0, 0.0)
            } else {
                ZERO
            }
        });
        let matrix = plus.scale(2.0) - linalg::identity(dim);
        Self {
            dim,
            matrix,
            plus_projector: plus,
        }
    }

    /// Pauli `Z = diag(1, −1)`.
    pub fn pauli_z() -> Self {
        Self::diagonal([true, false].into_iter())
    }

    /// `2|0⟩⟨0| − I`: `+1` for the ground level, `−1` for every other level.
    ///
    /// For `dim = 2` this is Pauli `Z`; for larger `dim` it models a
    /// ground-state readout that cannot tell excited levels apart.
    pub fn ground_vs_rest(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self::diagonal((0..dim).map(|k| k == 0)))
    }

    /// `Z ⊗ … ⊗ Z` on `qubits` qubits: `+1` on even-weight basis states.
    pub fn parity(qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > 16 {
            return Err(Error::InvalidArgument(format!("parity over {qubits} qubits")));
        }
        Ok(Self::diagonal(
            (0..1usize << qubits).map(|k| k.count_ones() % 2 == 0),
        ))
    }

    /// The observable effectively measured when `unitary` is applied before
    /// reading out `self`: `U† M U`.
    pub fn measured_after(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim || unitary.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: unitary.nrows(),
            });
        }
        let p = unitary.adjoint() * &self.plus_projector * unitary;
        let p = linalg::hermitian_part(&p);
        let matrix = p.scale(2.0) - linalg::identity(self.dim);
        Ok(Self {
            dim: self.dim,
            matrix,
            plus_projector: p,
        })
    }

    /// Product observable `M₁ ⊗ M₂`, itself ±1-valued.
    pub fn tensor(&self, other: &Observable) -> Observable {
        let dim = self.dim * other.dim;
        let matrix = linalg::kron(&self.matrix, &other.matrix);
        let plus_projector = (&matrix + linalg::identity(dim)).scale(0.5);
        Observable {
            dim,
            matrix,
            plus_projector,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn plus_projector(&self) -> &CMatrix {
        &self.plus_projector
    }

    /// `Tr(P₊ ρ)`, the probability of the `+1` outcome for a normalized state.
    pub fn plus_probability(&self, rho: &QuantumState) -> Result<f64> {
        real_trace_product(&self.plus_projector, rho)
    }
}

/// `⟨M⟩ = Re Tr(M ρ)`; an imaginary residue above `1e-9` is reported as drift.
pub fn expectation(observable: &Observable, rho: &QuantumState) -> Result<f64> {
    real_trace_product(&observable.matrix, rho)
}

fn real_trace_product(op: &CMatrix, rho: &QuantumState) -> Result<f64> {
    if op.nrows() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.nrows(),
            found: rho.dim(),
        });
    }
    // Tr(A ρ) = Σ_ij A_ij ρ_ji
    let m = rho.matrix();
    let n = op.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += op[(i, j)] * m[(j, i)];
        }
    }
    if acc.im.abs() >= EXPECTATION_IMAG_TOL {
        return Err(Error::NumericalDrift {
            what: "imaginary residue in expectation value",
            magnitude: acc.im.abs(),
            tolerance: EXPECTATION_IMAG_TOL,
        });
    }
    Ok(acc.re)
}
