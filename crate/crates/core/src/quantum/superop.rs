use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, ZERO};

use super::state::QuantumState;

pub const UNITARY_TOL: f64 = 1e-10;
const WEIGHT_SUM_TOL: f64 = 1e-12;
const REHERMITIZE_SILENT: f64 = 1e-12;
const REHERMITIZE_LIMIT: f64 = 1e-9;

/// Linear map on row-major vectorized `d × d` operators, stored as a
/// `d² × d²` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        let n = dim * dim;
        if matrix.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(dim, linalg::identity(dim * dim))
    }

    /// `Σ_i K_i ⊗ K̄_i` for the Kraus operators `K_i`.
    pub fn from_kraus(kraus: &[CMatrix]) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let dim = first.nrows();
        let mut matrix = CMatrix::zeros(dim * dim, dim * dim);
        for k in kraus {
            if k.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.nrows(),
                });
            }
            matrix += linalg::kron(k, &k.map(|z| z.conj()));
        }
        Self::new(dim, matrix)
    }

    /// Rebuilds the map from its Choi matrix `J[(i,k),(j,l)] = E(|k⟩⟨l|)[i,j]`
    /// (output factor first).
    pub fn from_choi(dim: usize, choi: &CMatrix) -> Result<Self> {
        let n = dim * dim;
        if choi.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: choi.nrows(),
            });
        }
        let matrix = CMatrix::from_fn(n, n, |row, col| {
            let (i, j) = (row / dim, row % dim);
            let (k, l) = (col / dim, col % dim);
            choi[(i * dim + k, j * dim + l)]
        });
        Self::new(dim, matrix)
    }

    pub fn choi(&self) -> CMatrix {
        let d = self.dim;
        let n = d * d;
        CMatrix::from_fn(n, n, |row, col| {
            let (i, k) = (row / d, row % d);
            let (j, l) = (col / d, col % d);
            self.matrix[(i * d + j, k * d + l)]
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `max |⟨⟨I|T − ⟨⟨I||`, zero for an exactly trace-preserving map.
    pub fn trace_preservation_defect(&self) -> f64 {
        let d = self.dim;
        let n = d * d;
        let mut worst: f64 = 0.0;
        for col in 0..n {
            let mut acc = ZERO;
            for i in 0..d {
                acc += self.matrix[(i * d + i, col)];
            }
            let (k, l) = (col / d, col % d);
            let target = if k == l { 1.0 } else { 0.0 };
            worst = worst.max((acc - C64::new(target, 0.0)).norm());
        }
        worst
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_preservation_defect() <= tol
    }

    /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.choi())[0]
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        linalg::eigenvalues(&self.matrix)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Superoperator) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Self::new(self.dim, &self.matrix * &other.matrix)
    }

    pub fn power(&self, exponent: u32) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: self.matrix.pow(exponent),
        }
    }

    /// Devectorized `T|A⟩⟩` for an arbitrary operator `A`.
    pub fn apply_operator(&self, op: &CMatrix) -> Result<CMatrix> {
        if op.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: op.nrows(),
            });
        }
        let v: CVector = &self.matrix * linalg::vectorize(op);
        Ok(linalg::devectorize(&v, self.dim))
    }
}

/// `U ⊗ Ū`, the superoperator of `ρ ↦ U ρ U†`.
pub fn unitary_superop(unitary: &CMatrix) -> Result<Superoperator> {
    let defect = linalg::unitarity_defect(unitary);
    if defect > UNITARY_TOL {
        return Err(Error::ContractViolation(format!(
            "matrix is not unitary (max |UU† − I| = {defect:.3e})"
        )));
    }
    Superoperator::new(
        unitary.nrows(),
        linalg::kron(unitary, &unitary.map(|z| z.conj())),
    )
}

/// Convex combination `Σ w_i T_i`.
pub fn mix_superops(weights: &[f64], ops: &[Superoperator]) -> Result<Superoperator> {
    if weights.len() != ops.len() || ops.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {} superoperators",
            weights.len(),
            ops.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::InvalidArgument(format!("negative weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidArgument(format!(
            "weights sum to {total}, not 1"
        )));
    }
    let dim = ops[0].dim;
    let mut matrix = CMatrix::zeros(dim * dim, dim * dim);
    for (w, op) in weights.iter().zip(ops) {
        if op.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.dim,
            });
        }
        matrix += op.matrix.scale(*w);
    }
    Superoperator::new(dim, matrix)
}

/// `T₁ ⊗ T₂` acting on the composite system with subsystem 1 as the leading
/// tensor factor.
pub fn tensor_superop(first: &Superoperator, second: &Superoperator) -> Superoperator {
    let (d1, d2) = (first.dim, second.dim);
    let d = d1 * d2;
    let n = d * d;
    let mut matrix = CMatrix::zeros(n, n);
    // composite vec index of (row (a,b), col (a',b')) is (a*d2+b)*d + a'*d2+b'
    let index = |a: usize, b: usize, ap: usize, bp: usize| (a * d2 + b) * d + ap * d2 + bp;
    for a in 0..d1 {
        for ap in 0..d1 {
            for c in 0..d1 {
                for cp in 0..d1 {
                    let t1 = first.matrix[(a * d1 + ap, c * d1 + cp)];
                    if t1 == ZERO {
                        continue;
                    }
                    for b in 0..d2 {
                        for bp in 0..d2 {
                            for e in 0..d2 {
                                for ep in 0..d2 {
                                    let t2 = second.matrix[(b * d2 + bp, e * d2 + ep)];
                                    matrix[(index(a, b, ap, bp), index(c, e, cp, ep))] = t1 * t2;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Superoperator { dim: d, matrix }
}

/// Devectorized `T|ρ⟩⟩`, re-Hermitized when the drift stays below `1e-9`.
pub fn apply(op: &Superoperator, rho: &QuantumState) -> Result<QuantumState> {
    if op.dim != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim,
            found: rho.dim(),
        });
    }
    let out = op.apply_operator(rho.matrix())?;
    let drift = linalg::hermiticity_defect(&out);
    let out = if drift > REHERMITIZE_LIMIT {
        return Err(Error::NumericalDrift {
            what: "superoperator output is not Hermitian",
            magnitude: drift,
            tolerance: REHERMITIZE_LIMIT,
        });
    } else if drift > REHERMITIZE_SILENT {
        linalg::hermitian_part(&out)
    } else {
        out
    };
    QuantumState::new(out)
}

/// Principal `k`-th root of a unitary: every eigenphase in `(−π, π]` divided by `k`.
pub fn root_unitary(unitary: &CMatrix, k: u32) -> Result<CMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("root order must be positive".into()));
    }
    let defect = linalg::unitarity_defect(unitary);
    if defect > UNITARY_TOL {
        return Err(Error::ContractViolation(format!(
            "matrix is not unitary (max |UU† − I| = {defect:.3e})"
        )));
    }
    // Unitaries are normal, so the Schur factor is diagonal and Q holds the eigenvectors.
    let (q, t) = unitary.clone().schur().unpack();
    let phases = CVector::from_iterator(
        t.nrows(),
        t.diagonal()
            .iter()
            .map(|&z| C64::from_polar(1.0, linalg::principal_arg(z) / k as f64)),
    );
    Ok(&q * CMatrix::from_diagonal(&phases) * q.adjoint())
}
