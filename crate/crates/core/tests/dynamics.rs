mod common;

use common::{haar_observable, haar_pure_state};
use dimwit::dynamics::{exact_series, sample_series, Provenance, TimeSeries};
use dimwit::quantum::{haar_unitary, random_cptp, unitary_superop};
use dimwit::rng::Seed;
use proptest::prelude::*;

fn percentile_99(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[(xs.len() * 99) / 100 - 1]
}

#[test]
fn sampling_error_shrinks_like_inverse_root_shots() {
    let mut rng = Seed(1).stream();
    let op = random_cptp(3, &mut rng).unwrap();
    let rho = haar_pure_state(3, &mut rng);
    let m = haar_observable(3, &mut rng);
    let exact = exact_series(&op, &rho, &m, 6).unwrap();
    let mut previous = f64::INFINITY;
    for (k, shots) in [100u64, 10_000, 1_000_000].into_iter().enumerate() {
        let errors: Vec<f64> = (0..400)
            .map(|r| {
                let s = sample_series(&exact, shots, Seed(1000 * k as u64 + r)).unwrap();
                s.values()
                    .iter()
                    .zip(exact.values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        let p99 = percentile_99(errors);
        // Eleven points, each with standard deviation at most 1/√n.
        assert!(p99 < 4.0 / (shots as f64).sqrt(), "n = {shots}: p99 = {p99}");
        assert!(p99 < previous);
        previous = p99;
    }
}

#[test]
fn estimator_variance_at_half() {
    let exact = TimeSeries::new(vec![0.0; 100_001], 0, Provenance::Exact, None).unwrap();
    let s = sample_series(&exact, 8192, Seed(77)).unwrap();
    let n = s.len() as f64;
    let mean = s.values().iter().sum::<f64>() / n;
    let var = s.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let expected = 1.0 / 8192.0;
    assert!((var / expected - 1.0).abs() < 0.05, "variance {var}, expected {expected}");
}

#[test]
fn same_seed_same_sample() {
    let exact = TimeSeries::new(vec![0.3, -0.2, 0.9], 0, Provenance::Exact, None).unwrap();
    let a = sample_series(&exact, 1000, Seed(5)).unwrap();
    let b = sample_series(&exact, 1000, Seed(5)).unwrap();
    let c = sample_series(&exact, 1000, Seed(6)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn truncation_matches_shorter_run(seed in any::<u64>(), dim in 2usize..5, n in 3usize..12, cut in 2usize..12) {
        prop_assume!(cut < n);
        let mut rng = Seed(seed).stream();
        let op = random_cptp(dim, &mut rng).unwrap();
        let rho = haar_pure_state(dim, &mut rng);
        let m = haar_observable(dim, &mut rng);
        let long = exact_series(&op, &rho, &m, n).unwrap();
        let short = exact_series(&op, &rho, &m, cut).unwrap();
        let truncated = long.truncated(cut).unwrap();
        prop_assert_eq!(truncated.values(), short.values());
    }

    #[test]
    fn squared_map_samples_every_other_point(seed in any::<u64>(), dim in 2usize..5, n in 2usize..8) {
        let mut rng = Seed(seed).stream();
        let op = if seed % 2 == 0 {
            random_cptp(dim, &mut rng).unwrap()
        } else {
            unitary_superop(&haar_unitary(dim, &mut rng).unwrap()).unwrap()
        };
        let rho = haar_pure_state(dim, &mut rng);
        let m = haar_observable(dim, &mut rng);
        let squared = exact_series(&op.power(2), &rho, &m, n).unwrap();
        let full = exact_series(&op, &rho, &m, 2 * n).unwrap();
        for (t, v) in squared.values().iter().enumerate() {
            prop_assert!((v - full.values()[2 * t]).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_values_lie_in_unit_interval(seed in any::<u64>(), dim in 2usize..6) {
        let mut rng = Seed(seed).stream();
        let op = random_cptp(dim, &mut rng).unwrap();
        let s = exact_series(&op, &haar_pure_state(dim, &mut rng), &haar_observable(dim, &mut rng), 8).unwrap();
        prop_assert!(s.values().iter().all(|v| v.abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn sampled_values_are_shot_fractions(seed in any::<u64>(), shots in 1u64..5000, v in -1.0f64..=1.0) {
        let exact = TimeSeries::new(vec![v; 3], 0, Provenance::Exact, None).unwrap();
        let s = sample_series(&exact, shots, Seed(seed)).unwrap();
        for x in s.values() {
            let n_plus = (x + 1.0) * shots as f64 / 2.0;
            prop_assert!((n_plus - n_plus.round()).abs() < 1e-6);
        }
    }
}
