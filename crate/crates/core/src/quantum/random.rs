//! Random ensembles: Haar unitaries, Haar pure states and random CPTP maps.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};

use super::state::QuantumState;
use super::superop::Superoperator;

/// Euler-angle parametrization of a Haar-random qubit unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarAngles {
    psi: f64,
    chi: f64,
    xi: f64,
    phi: f64,
}

impl HaarAngles {
    /// `psi, chi ∈ [0, 2π)` and `xi ∈ [0, 1)`; `phi = arcsin(√xi)`.
    pub fn new(psi: f64, chi: f64, xi: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&psi) || !(0.0..TAU).contains(&chi) {
            return Err(Error::InvalidArgument(format!(
                "Euler angles ({psi}, {chi}) outside [0, 2π)"
            )));
        }
        if !(0.0..1.0).contains(&xi) {
            return Err(Error::InvalidArgument(format!("xi = {xi} outside [0, 1)")));
        }
        Ok(Self {
            psi,
            chi,
            xi,
            phi: xi.sqrt().asin(),
        })
    }

    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let psi = rng.random_range(0.0..TAU);
        let chi = rng.random_range(0.0..TAU);
        let xi: f64 = rng.random();
        Self::new(psi, chi, xi).expect("sampled angles are in range")
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unitary(&self) -> CMatrix {
        let (s, c) = self.phi.sin_cos();
        CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::from_polar(c, self.psi),
                C64::from_polar(s, self.chi),
                -C64::from_polar(s, -self.chi),
                C64::from_polar(c, -self.psi),
            ],
        )
    }
}

/// Complex Ginibre matrix with i.i.d. `(N(0,1) + i N(0,1)) / √2` entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    })
}

/// Haar-distributed unitary.
///
/// `dim = 2` uses the Euler-angle form (an `SU(2)` element, Haar up to a
/// global phase that no superoperator can see); larger dimensions use the QR
/// decomposition of a Ginibre matrix with the phases of `R`'s diagonal
/// pushed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix> {
    match dim {
        0 => Err(Error::InvalidDimension(0)),
        1 => Ok(CMatrix::from_element(
            1,
            1,
            C64::from_polar(1.0, rng.random_range(0.0..TAU)),
        )),
        2 => Ok(HaarAngles::sample(rng).unitary()),
        _ => {
            let (q, r) = ginibre(dim, dim, rng).qr().unpack();
            let phases = CVector::from_iterator(
                dim,
                r.diagonal().iter().map(|z| {
                    let n = z.norm();
                    if n > 0.0 {
                        z / n
                    } else {
                        linalg::ONE
                    }
                }),
            );
            Ok(q * CMatrix::from_diagonal(&phases))
        }
    }
}

/// Haar-random pure state `U|0⟩⟨0|U†`.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<QuantumState> {
    let u = haar_unitary(dim, rng)?;
    QuantumState::pure(u.column(0).as_slice())
}

/// Random CPTP map from a normalized Wishart Choi matrix.
///
/// `W = G G†` with `G` a `d² × d²` Ginibre matrix is taken as a Choi matrix;
/// conjugating by `I ⊗ Y^{-1/2}`, where `Y` is the partial trace of `W` over
/// the output factor, makes the map trace preserving while keeping it
/// completely positive.
pub fn random_cptp<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Superoperator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let n = dim * dim;
    let g = ginibre(n, n, rng);
    let w = &g * g.adjoint();
    // Y[k,l] = Σ_i W[(i,k),(i,l)]
    let y = CMatrix::from_fn(dim, dim, |k, l| {
        (0..dim).map(|i| w[(i * dim + k, i * dim + l)]).sum()
    });
    let y_inv_sqrt = linalg::hermitian_function(&y, |x| 1.0 / x.sqrt());
    let normalizer = linalg::kron(&linalg::identity(dim), &y_inv_sqrt);
    let choi = &normalizer * w * &normalizer;
    Superoperator::from_choi(dim, &linalg::hermitian_part(&choi))
}
