mod common;

use common::{gram_schmidt_haar, ks_two_sample, phase_gap};
use dimwit::linalg::{self, CMatrix, C64};
use dimwit::quantum::{
    apply, haar_unitary, mix_superops, random_cptp, root_unitary, tensor_superop,
    unitary_superop, QuantumState,
};
use dimwit::rng::Seed;
use proptest::prelude::*;

const SAMPLES: usize = 10_000;

#[test]
fn haar_qubit_gap_is_left_invariant() {
    let mut rng = Seed(101).stream();
    let v0 = CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.8), C64::new(0.6, 0.0)],
    )
    .map(|z| z * C64::from_polar(1.0, 0.3));
    let plain: Vec<f64> = (0..SAMPLES)
        .map(|_| phase_gap(&haar_unitary(2, &mut rng).unwrap()))
        .collect();
    let shifted: Vec<f64> = (0..SAMPLES)
        .map(|_| phase_gap(&(&v0 * haar_unitary(2, &mut rng).unwrap())))
        .collect();
    let p = ks_two_sample(&plain, &shifted);
    assert!(p > 0.01, "KS p = {p}");
}

#[test]
fn qubit_euler_form_matches_gram_schmidt_oracle() {
    let mut rng = Seed(102).stream();
    let mut oracle_rng = Seed(103).stream();
    let ours: Vec<f64> = (0..SAMPLES)
        .map(|_| phase_gap(&haar_unitary(2, &mut rng).unwrap()))
        .collect();
    let oracle: Vec<f64> = (0..SAMPLES)
        .map(|_| phase_gap(&gram_schmidt_haar(2, &mut oracle_rng)))
        .collect();
    let p = ks_two_sample(&ours, &oracle);
    assert!(p > 0.01, "KS p = {p}");
}

#[test]
fn qr_haar_matches_gram_schmidt_oracle() {
    for dim in [3, 4, 5] {
        let mut rng = Seed(200 + dim as u64).stream();
        let mut oracle_rng = Seed(300 + dim as u64).stream();
        // |U₀₀|² and the phase of U₀₀ probe both the modulus and phase
        // convention of the QR correction.
        let mut ours = (Vec::new(), Vec::new());
        let mut oracle = (Vec::new(), Vec::new());
        for _ in 0..SAMPLES {
            let u = haar_unitary(dim, &mut rng).unwrap();
            ours.0.push(u[(0, 0)].norm_sqr());
            ours.1.push(u[(0, 0)].arg());
            let v = gram_schmidt_haar(dim, &mut oracle_rng);
            oracle.0.push(v[(0, 0)].norm_sqr());
            oracle.1.push(v[(0, 0)].arg());
        }
        for (a, b) in [(&ours.0, &oracle.0), (&ours.1, &oracle.1)] {
            let p = ks_two_sample(a, b);
            assert!(p > 0.01, "dim {dim}: KS p = {p}");
        }
    }
}

#[test]
fn unitary_superop_power_matches_power_of_unitary() {
    let mut rng = Seed(7).stream();
    for dim in [2, 3, 4] {
        let u = haar_unitary(dim, &mut rng).unwrap();
        let t = unitary_superop(&u).unwrap();
        let mut ut = linalg::identity(dim);
        for k in 0..=40u32 {
            let lhs = t.power(k);
            let rhs = unitary_superop(&ut).unwrap();
            assert!(
                linalg::max_abs_diff(lhs.matrix(), rhs.matrix()) < 1e-9,
                "dim {dim}, t = {k}"
            );
            ut = &ut * &u;
        }
    }
}

#[test]
fn tensor_spectrum_is_product_of_spectra() {
    let mut rng = Seed(8).stream();
    let a = random_cptp(2, &mut rng).unwrap();
    let b = random_cptp(2, &mut rng).unwrap();
    let ab = tensor_superop(&a, &b);
    let mut expected: Vec<C64> = a
        .eigenvalues()
        .iter()
        .flat_map(|x| b.eigenvalues().into_iter().map(move |y| x * y))
        .collect();
    let mut found = ab.eigenvalues();
    // Greedy matching is enough: the products are well separated for this seed.
    for z in found.drain(..) {
        let (k, dist) = expected
            .iter()
            .enumerate()
            .map(|(k, w)| (k, (z - w).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        assert!(dist < 1e-10, "unmatched eigenvalue {z}");
        expected.swap_remove(k);
    }
}

#[test]
fn cptp_maps_have_identity_as_left_eigenvector() {
    let mut rng = Seed(9).stream();
    for dim in 2..=4 {
        let t = random_cptp(dim, &mut rng).unwrap();
        let id = linalg::vectorize(&linalg::identity(dim));
        let left = t.matrix().adjoint() * &id;
        let defect = (left - &id).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(defect < 1e-10, "dim {dim}");
    }
}

#[test]
fn root_unitary_recovers_unitary() {
    let mut rng = Seed(10).stream();
    for dim in [2, 3, 5] {
        let u = haar_unitary(dim, &mut rng).unwrap();
        let r = root_unitary(&u, 7).unwrap();
        let mut p = linalg::identity(dim);
        for _ in 0..7 {
            p = &p * &r;
        }
        assert!(linalg::max_abs_diff(&p, &u) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn haar_output_is_unitary(seed in any::<u64>(), dim in 1usize..7) {
        let u = haar_unitary(dim, &mut Seed(seed).stream()).unwrap();
        prop_assert!(linalg::unitarity_defect(&u) < 1e-10);
    }

    #[test]
    fn random_cptp_is_cptp(seed in any::<u64>(), dim in 2usize..5) {
        let t = random_cptp(dim, &mut Seed(seed).stream()).unwrap();
        prop_assert!(t.trace_preservation_defect() < 1e-10);
        prop_assert!(t.choi_min_eigenvalue() > -1e-10);
    }

    #[test]
    fn mixing_and_tensoring_preserve_trace(seed in any::<u64>(), w in 0.0f64..=1.0) {
        let mut rng = Seed(seed).stream();
        let a = random_cptp(2, &mut rng).unwrap();
        let b = unitary_superop(&haar_unitary(2, &mut rng).unwrap()).unwrap();
        let mixed = mix_superops(&[w, 1.0 - w], &[a.clone(), b.clone()]).unwrap();
        prop_assert!(mixed.trace_preservation_defect() < 1e-10);
        prop_assert!(tensor_superop(&a, &b).trace_preservation_defect() < 1e-10);
        prop_assert!(tensor_superop(&mixed, &a).choi_min_eigenvalue() > -1e-10);
    }

    #[test]
    fn channels_map_states_to_states(seed in any::<u64>(), dim in 2usize..5, steps in 1usize..30) {
        let mut rng = Seed(seed).stream();
        let t = random_cptp(dim, &mut rng).unwrap();
        let mut rho = QuantumState::maximally_mixed(dim).unwrap().conjugated(&haar_unitary(dim, &mut rng).unwrap()).unwrap();
        for _ in 0..steps {
            rho = apply(&t, &rho).unwrap();
        }
        prop_assert!((rho.trace() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn vectorized_inner_product_is_hilbert_schmidt(seed in any::<u64>(), dim in 1usize..5) {
        let mut rng = Seed(seed).stream();
        let a = dimwit::quantum::ginibre(dim, dim, &mut rng);
        let b = dimwit::quantum::ginibre(dim, dim, &mut rng);
        let lhs = linalg::vectorize(&a).dotc(&linalg::vectorize(&b));
        let rhs = (a.adjoint() * &b).trace();
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        prop_assert_eq!(linalg::devectorize(&linalg::vectorize(&a), dim), a);
    }
}
