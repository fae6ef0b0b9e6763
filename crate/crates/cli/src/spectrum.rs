//! Trajectories `λ_j^s` of the superoperator spectrum under fractional powers.

use std::path::Path;

use anyhow::{bail, Result};
use serde::Serialize;

use dimwit::linalg::{self, C64};
use dimwit::quantum::MAX_CONDITION;
use dimwit::rng::Seed;
use dimwit::Error;

use crate::campaign::draw_trial;
use crate::config::Evolution;

/// Allowed deviation of `|λ|` from 1 for unitary evolutions.
pub const UNIT_CIRCLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub s: f64,
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

/// Principal branch `exp(s log λ)`; `0^s = 0` for `s > 0`.
pub fn fractional_power(lambda: C64, s: f64) -> C64 {
    if lambda.norm() == 0.0 {
        return if s == 0.0 { linalg::ONE } else { linalg::ZERO };
    }
    C64::from_polar(lambda.norm().powf(s), s * linalg::principal_arg(lambda))
}

/// Evenly spaced powers `0, step, 2·step, …` up to `max`.
pub fn power_grid(max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && max >= 0.0 && max.is_finite()) {
        bail!("need step > 0 and a finite max >= 0");
    }
    let count = (max / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| k as f64 * step).collect())
}

/// Spectrum of the evolution drawn from `seed`, raised to every power in `powers`.
///
/// Eigenvalues are ordered by phase, then modulus. Unitary evolutions must keep
/// every eigenvalue on the unit circle.
pub fn spectrum_dump(
    evolution: Evolution,
    dim: usize,
    seed: Seed,
    powers: &[f64],
) -> Result<Vec<SpectrumPoint>> {
    evolution.validate(&[dim])?;
    let trial = draw_trial(evolution, dim, seed)?;
    let eig = linalg::eigen_decompose(trial.op.matrix())?;
    if !(eig.condition <= MAX_CONDITION) {
        return Err(Error::NearDefective {
            condition: eig.condition,
            limit: MAX_CONDITION,
        }
        .into());
    }
    let mut values = eig.values;
    values.sort_by(|a, b| {
        linalg::principal_arg(*a)
            .total_cmp(&linalg::principal_arg(*b))
            .then(a.norm().total_cmp(&b.norm()))
    });
    let unitary = matches!(
        evolution.resolve(dim),
        Evolution::Identity | Evolution::HaarUnitary | Evolution::TwoQubitStep
    );
    if unitary {
        if let Some(l) = values.iter().find(|l| (l.norm() - 1.0).abs() > UNIT_CIRCLE_TOL) {
            bail!("unitary evolution has eigenvalue {l} off the unit circle");
        }
    }
    let mut points = Vec::with_capacity(powers.len() * values.len());
    for &s in powers {
        for (index, &l) in values.iter().enumerate() {
            let z = fractional_power(l, s);
            points.push(SpectrumPoint {
                s,
                index,
                re: z.re,
                im: z.im,
                modulus: z.norm(),
            });
        }
    }
    Ok(points)
}

pub fn write_spectrum(points: &[SpectrumPoint], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trajectories(points: &[SpectrumPoint], n: usize) -> Vec<Vec<SpectrumPoint>> {
        (0..n)
            .map(|j| points.iter().filter(|p| p.index == j).copied().collect())
            .collect()
    }

    #[test]
    fn identity_is_constant_at_one() {
        let powers = power_grid(3.0, 0.25).unwrap();
        let points = spectrum_dump(Evolution::Identity, 2, Seed(0), &powers).unwrap();
        assert_eq!(points.len(), 4 * powers.len());
        assert!(points.iter().all(|p| (p.re - 1.0).abs() < 1e-12 && p.im.abs() < 1e-12));
    }

    #[test]
    fn cptp_mixture_spirals_inward() {
        let powers = power_grid(5.0, 0.1).unwrap();
        for seed in 0..5 {
            let points =
                spectrum_dump(Evolution::MixedCptp { weight: 0.3 }, 2, Seed(seed), &powers).unwrap();
            let tracks = trajectories(&points, 4);
            for track in &tracks {
                for w in track.windows(2) {
                    assert!(w[1].modulus <= w[0].modulus + 1e-12);
                }
            }
            // Exactly one trajectory stays at 1.
            let fixed = tracks
                .iter()
                .filter(|t| t.iter().all(|p| (p.re - 1.0).abs() < 1e-9 && p.im.abs() < 1e-9))
                .count();
            assert_eq!(fixed, 1);
        }
    }

    #[test]
    fn unitary_trajectories_stay_on_circle() {
        let powers = power_grid(2.0, 0.5).unwrap();
        for evolution in [Evolution::HaarUnitary, Evolution::TwoQubitStep] {
            let points = spectrum_dump(evolution, 4, Seed(3), &powers).unwrap();
            assert!(points.iter().all(|p| (p.modulus - 1.0).abs() < 1e-10));
        }
    }

    #[test]
    fn grid_includes_endpoints() {
        assert_eq!(power_grid(1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(power_grid(1.0, 0.0).is_err());
    }
}
