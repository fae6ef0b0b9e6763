use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE};
use crate::quantum::UNITARY_TOL;

/// Parameters of the openQASM `u3(θ, φ, λ)` gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct U3Angles {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
}

impl U3Angles {
    pub fn new(theta: f64, phi: f64, lambda: f64) -> Self {
        Self { theta, phi, lambda }
    }

    pub fn matrix(&self) -> CMatrix {
        u3_matrix(self)
    }
}

/// `[[cos(θ/2), −e^{iλ} sin(θ/2)], [e^{iφ} sin(θ/2), e^{i(φ+λ)} cos(θ/2)]]`.
pub fn u3_matrix(angles: &U3Angles) -> CMatrix {
    let (s, c) = (angles.theta / 2.0).sin_cos();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0),
            -C64::from_polar(s, angles.lambda),
            C64::from_polar(s, angles.phi),
            C64::from_polar(c, angles.phi + angles.lambda),
        ],
    )
}

fn wrap(angle: f64) -> f64 {
    let a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a - 2.0 * PI
    } else {
        a
    }
}

/// Angles of a `u3` gate equal to `unitary` up to a global phase, with
/// `θ ∈ [0, π]` and `φ, λ ∈ (−π, π]`.
pub fn u3_angles(unitary: &CMatrix) -> Result<U3Angles> {
    if unitary.shape() != (2, 2) {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: unitary.nrows(),
        });
    }
    let defect = linalg::unitarity_defect(unitary);
    if defect > UNITARY_TOL {
        return Err(Error::ContractViolation(format!(
            "matrix is not unitary (max |UU† − I| = {defect:.3e})"
        )));
    }
    let (a, b, c, d) = (
        unitary[(0, 0)],
        unitary[(0, 1)],
        unitary[(1, 0)],
        unitary[(1, 1)],
    );
    let (cos_half, sin_half) = (a.norm(), c.norm());
    let theta = 2.0 * sin_half.atan2(cos_half);
    // The phase of each output entry is taken from the largest available
    // entries so that rounding noise in tiny entries stays tiny.
    let (phi, lambda) = if cos_half >= sin_half {
        let global = a.arg();
        let sum = d.arg() - global;
        let phi = if sin_half > 0.0 { c.arg() - global } else { 0.0 };
        (phi, sum - phi)
    } else {
        let global = if cos_half > 0.0 { a.arg() } else { c.arg() };
        (c.arg() - global, (-b).arg() - global)
    };
    Ok(U3Angles::new(theta, wrap(phi), wrap(lambda)))
}

/// `max_ij |e^{iγ} A − B|` minimized over the global phase `γ`.
pub fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap = linalg::hs_inner(a, b);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    linalg::max_abs_diff(&a.map(|z| z * phase), b)
}

/// `CX` with the control as the leading tensor factor.
pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}
