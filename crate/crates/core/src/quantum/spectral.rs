use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};

use super::observable::Observable;
use super::state::QuantumState;
use super::superop::{unitary_superop, Superoperator};

/// Largest eigenvector condition number accepted before a superoperator is
/// treated as defective.
pub const MAX_CONDITION: f64 = 1e8;

/// Spectral data of `T` together with the overlaps that weight each mode in
/// `⟨M(t)⟩ = Σ_j λ_j^t ⟨⟨M|λ_j⟩⟩⟨⟨λ_j|ρ⟩⟩`.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: Vec<C64>,
    /// `⟨⟨M|λ_j⟩⟩` with `|λ_j⟩⟩` the right eigenvectors.
    pub left_overlaps: Vec<C64>,
    /// `⟨⟨λ_j|ρ⟩⟩` with `⟨⟨λ_j|` the dual (left) eigenvectors.
    pub right_overlaps: Vec<C64>,
    /// Eigenphases `ω_l` of `U` when the map is `U ⊗ Ū`.
    pub unitary_phases: Option<Vec<f64>>,
    pub condition: f64,
}

impl SpectralData {
    /// `Σ_j λ_j^t ⟨⟨M|λ_j⟩⟩⟨⟨λ_j|ρ⟩⟩`, real part.
    pub fn reconstruct(&self, t: u32) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.left_overlaps)
            .zip(&self.right_overlaps)
            .map(|((l, a), b)| l.powu(t) * a * b)
            .sum::<C64>()
            .re
    }

    /// Mode weights `⟨⟨M|λ_j⟩⟩⟨⟨λ_j|ρ⟩⟩`.
    pub fn weights(&self) -> Vec<C64> {
        self.left_overlaps
            .iter()
            .zip(&self.right_overlaps)
            .map(|(a, b)| a * b)
            .collect()
    }
}

/// Diagonalizes `T` and computes the overlap coefficients for `M` and `ρ`.
///
/// Refuses numerically defective maps (eigenvector condition number above
/// [`MAX_CONDITION`]).
pub fn spectral_decompose(
    op: &Superoperator,
    observable: &Observable,
    rho: &QuantumState,
) -> Result<SpectralData> {
    let d = op.dim();
    for found in [observable.dim(), rho.dim()] {
        if found != d {
            return Err(Error::DimensionMismatch { expected: d, found });
        }
    }
    let eig = linalg::eigen_decompose(op.matrix())?;
    if !(eig.condition <= MAX_CONDITION) {
        return Err(Error::NearDefective {
            condition: eig.condition,
            limit: MAX_CONDITION,
        });
    }
    let left = eig.left_vectors().ok_or(Error::NearDefective {
        condition: f64::INFINITY,
        limit: MAX_CONDITION,
    })?;
    let m_vec = linalg::vectorize(observable.matrix());
    let rho_vec = linalg::vectorize(rho.matrix());
    let n = d * d;
    let left_overlaps = (0..n).map(|j| m_vec.dotc(&eig.vectors.column(j))).collect();
    let right_overlaps = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| left[(j, k)] * rho_vec[k])
                .fold(ZERO, |acc, z| acc + z)
        })
        .collect();
    Ok(SpectralData {
        eigenvalues: eig.values,
        left_overlaps,
        right_overlaps,
        unitary_phases: None,
        condition: eig.condition,
    })
}

/// As [`spectral_decompose`] for `U ⊗ Ū`, additionally recording the
/// eigenphases of `U`.
pub fn spectral_decompose_unitary(
    unitary: &CMatrix,
    observable: &Observable,
    rho: &QuantumState,
) -> Result<SpectralData> {
    let op = unitary_superop(unitary)?;
    let mut data = spectral_decompose(&op, observable, rho)?;
    data.unitary_phases = Some(
        linalg::eigenvalues(unitary)
            .into_iter()
            .map(linalg::principal_arg)
            .collect(),
    );
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    #[test]
    fn identity_has_unit_spectrum() {
        let rho = QuantumState::basis(2, 0).unwrap();
        let data = spectral_decompose(
            &Superoperator::identity(2).unwrap(),
            &Observable::pauli_z(),
            &rho,
        )
        .unwrap();
        assert_eq!(data.eigenvalues.len(), 4);
        assert!(data.eigenvalues.iter().all(|l| (l - ONE).norm() < 1e-14));
        assert!((data.reconstruct(5) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn defective_map_is_refused() {
        // Jordan coupling between two unit eigenvalues.
        let mut m = linalg::identity(4);
        m[(1, 2)] = ONE;
        let op = Superoperator::new(2, m).unwrap();
        let err = spectral_decompose(&op, &Observable::pauli_z(), &QuantumState::basis(2, 0).unwrap());
        assert!(matches!(err, Err(Error::NearDefective { .. })), "{err:?}");
    }
}
