#![allow(dead_code)]

use dimwit::dynamics::exact_series;
use dimwit::linalg::{self, CMatrix, C64};
use dimwit::quantum::{haar_unitary, Observable, QuantumState, Superoperator};
use dimwit::rng::Stream;
use dimwit::witness::{delay_matrix, singular_values};

/// Asymptotic two-sample Kolmogorov–Smirnov p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let en = (n * m / (n + m)).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powi(k as i32 - 1) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Haar unitary by modified Gram–Schmidt on Ginibre columns.
pub fn gram_schmidt_haar(dim: usize, rng: &mut Stream) -> CMatrix {
    let mut q = dimwit::quantum::ginibre(dim, dim, rng);
    for j in 0..dim {
        for k in 0..j {
            let proj: C64 = q.column(k).dotc(&q.column(j));
            let col_k = q.column(k).clone_owned();
            let mut col_j = q.column_mut(j);
            col_j -= col_k * proj;
        }
        let norm = q.column(j).norm();
        q.column_mut(j).unscale_mut(norm);
    }
    q
}

/// Eigenphase gap `|ω₁ − ω₂|` folded into `[0, π]` for a 2×2 unitary.
pub fn phase_gap(u: &CMatrix) -> f64 {
    let ev = linalg::eigenvalues(u);
    let gap = (linalg::principal_arg(ev[0]) - linalg::principal_arg(ev[1])).abs();
    gap.min(std::f64::consts::TAU - gap)
}

/// `U_P|0⟩` with `U_P` Haar.
pub fn haar_pure_state(dim: usize, rng: &mut Stream) -> QuantumState {
    QuantumState::basis(dim, 0)
        .unwrap()
        .conjugated(&haar_unitary(dim, rng).unwrap())
        .unwrap()
}

/// `U_M† Z_d U_M` with `Z_d = 2|0⟩⟨0| − I`.
pub fn haar_observable(dim: usize, rng: &mut Stream) -> Observable {
    Observable::ground_vs_rest(dim)
        .unwrap()
        .measured_after(&haar_unitary(dim, rng).unwrap())
        .unwrap()
}

/// Singular values of the exact delay matrix, normalized by the largest.
pub fn normalized_spectrum(
    op: &Superoperator,
    rho: &QuantumState,
    observable: &Observable,
    delay_size: usize,
) -> Vec<f64> {
    let series = exact_series(op, rho, observable, delay_size).unwrap();
    let s = singular_values(&delay_matrix(&series, delay_size).unwrap());
    let top = s[0];
    s.into_iter().map(|x| x / top).collect()
}
