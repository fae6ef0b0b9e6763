//! Simulated campaigns: many random trials per (dimension, shots) cell.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use dimwit::dynamics::{exact_series, sample_series};
use dimwit::qasm::{OutcomeMap, SuiteGates};
use dimwit::quantum::{
    haar_unitary, mix_superops, random_cptp, unitary_superop, Observable, QuantumState,
    Superoperator,
};
use dimwit::rng::Seed;
use dimwit::witness::{analyze, threshold, RankReport, ValidationConfig};

use crate::config::{CampaignConfig, Evolution};

/// One random instance: the evolution, the initial state and the observable.
pub struct Trial {
    pub op: Superoperator,
    pub rho: QuantumState,
    pub observable: Observable,
}

/// Draws the trial for `evolution` in dimension `dim` from the stream of `seed`.
///
/// Haar-based draws take the step first, then `U_P`, then `U_M`; the state is
/// `U_P|0⟩` and the observable `U_M† (2|0⟩⟨0| − I) U_M`.
pub fn draw_trial(evolution: Evolution, dim: usize, seed: Seed) -> Result<Trial> {
    let evolution = evolution.resolve(dim);
    if evolution == Evolution::TwoQubitStep {
        anyhow::ensure!(dim == 4, "two_qubit_step needs d = 4, got {dim}");
        let gates = SuiteGates::draw_two(seed)?;
        return Ok(Trial {
            op: unitary_superop(&gates.step_unitary())?,
            rho: gates.target_state()?,
            observable: gates.target_observable(&OutcomeMap::Parity)?,
        });
    }
    let mut rng = seed.stream();
    let op = match evolution {
        Evolution::Identity => Superoperator::identity(dim)?,
        Evolution::HaarUnitary => unitary_superop(&haar_unitary(dim, &mut rng)?)?,
        Evolution::MixedCptp { weight } => {
            let general = random_cptp(dim, &mut rng)?;
            let unitary = unitary_superop(&haar_unitary(dim, &mut rng)?)?;
            mix_superops(&[weight, 1.0 - weight], &[general, unitary])?
        }
        Evolution::Auto | Evolution::TwoQubitStep => unreachable!("resolved above"),
    };
    let rho = QuantumState::basis(dim, 0)?.conjugated(&haar_unitary(dim, &mut rng)?)?;
    let observable = Observable::ground_vs_rest(dim)?.measured_after(&haar_unitary(dim, &mut rng)?)?;
    Ok(Trial {
        op,
        rho,
        observable,
    })
}

/// Seed of trial `index` in dimension `dim`.
pub fn trial_seed(seed: u64, dim: usize, index: usize) -> Seed {
    Seed(seed).derive(dim as u64).derive(index as u64)
}

/// Seed of the shot noise for `shots` in a trial; the trial itself does not
/// depend on `shots`, so cells of a power study share their instances.
pub fn noise_seed(trial: Seed, shots: u64) -> Seed {
    trial.derive(shots)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub dim: usize,
    pub shots: u64,
    #[serde(rename = "N")]
    pub delay_size: usize,
    #[serde(rename = "d_a")]
    pub advertised_dim: usize,
    pub evolution: Evolution,
    pub threshold: f64,
    /// Validated rank → number of trials.
    pub histogram: BTreeMap<usize, usize>,
    /// Trials with validated rank above `d_a²`.
    pub rejections: usize,
    pub rejection_fraction: f64,
    pub trials: Vec<RankReport>,
}

impl CellReport {
    fn from_reports(
        dim: usize,
        shots: u64,
        evolution: Evolution,
        config: ValidationConfig,
        trials: Vec<RankReport>,
    ) -> CellReport {
        let mut histogram = BTreeMap::new();
        for r in &trials {
            *histogram.entry(r.validated_rank).or_insert(0) += 1;
        }
        let rejections = trials.iter().filter(|r| r.rejects_null()).count();
        CellReport {
            dim,
            shots,
            delay_size: config.delay_size,
            advertised_dim: config.advertised_dim,
            evolution,
            threshold: threshold(&config),
            histogram,
            rejections,
            rejection_fraction: rejections as f64 / trials.len() as f64,
            trials,
        }
    }

    /// Fraction of trials whose validated rank exceeds `rank`.
    pub fn fraction_above(&self, rank: usize) -> f64 {
        let above: usize = self.histogram.range(rank + 1..).map(|(_, n)| n).sum();
        above as f64 / self.trials.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    /// Ordered by dimension, then shots, as listed in the config.
    pub cells: Vec<CellReport>,
}

impl CampaignReport {
    pub fn cell(&self, dim: usize, shots: u64) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.dim == dim && c.shots == shots)
    }
}

/// Runs every trial of every cell. Trials run in parallel; results are
/// ordered by trial index, so the report does not depend on scheduling.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    config.validate()?;
    let mut cells = Vec::new();
    for &dim in &config.dims {
        let delay_size = config.delay_size_for(dim);
        let validation: Vec<ValidationConfig> = config
            .shots
            .iter()
            .map(|&n| ValidationConfig::new(delay_size, n, config.z, config.advertised_dim_for(dim)))
            .collect::<dimwit::Result<_>>()?;
        let per_trial: Vec<Vec<RankReport>> = (0..config.trials)
            .into_par_iter()
            .map(|index| -> Result<Vec<RankReport>> {
                let seed = trial_seed(config.seed, dim, index);
                let trial = draw_trial(config.evolution, dim, seed)
                    .with_context(|| format!("d = {dim}, trial {index}"))?;
                let exact = exact_series(&trial.op, &trial.rho, &trial.observable, delay_size)?;
                validation
                    .iter()
                    .map(|v| {
                        let sampled = sample_series(&exact, v.shots, noise_seed(seed, v.shots))?;
                        Ok(analyze(&sampled, v)?)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (k, v) in validation.iter().enumerate() {
            let reports = per_trial.iter().map(|r| r[k].clone()).collect();
            cells.push(CellReport::from_reports(
                dim,
                v.shots,
                config.evolution.resolve(dim),
                *v,
                reports,
            ));
        }
    }
    Ok(CampaignReport {
        config: config.clone(),
        cells,
    })
}

/// Writes `report.json`, `histogram.csv` and `rejection.csv` into `dir`.
pub fn write_campaign(report: &CampaignReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join("report.json");
    let file = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    serde_json::to_writer(std::io::BufWriter::new(file), report)?;

    let mut hist = csv::Writer::from_path(dir.join("histogram.csv"))?;
    hist.write_record(["dim", "shots", "validated_rank", "count"])?;
    let mut rejection = csv::Writer::from_path(dir.join("rejection.csv"))?;
    rejection.write_record(["dim", "shots", "d_a", "trials", "rejections", "rejection_fraction"])?;
    for cell in &report.cells {
        for (rank, count) in &cell.histogram {
            hist.serialize((cell.dim, cell.shots, rank, count))?;
        }
        rejection.serialize((
            cell.dim,
            cell.shots,
            cell.advertised_dim,
            cell.trials.len(),
            cell.rejections,
            cell.rejection_fraction,
        ))?;
    }
    hist.flush()?;
    rejection.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Mode;

    fn small(mode: Mode, dims: Vec<usize>, shots: Vec<u64>) -> CampaignConfig {
        CampaignConfig {
            dims,
            trials: 12,
            shots,
            ..CampaignConfig::defaults(mode)
        }
    }

    #[test]
    fn histogram_totals_equal_trials() {
        let report = run_campaign(&small(Mode::Simulate, vec![2, 3], vec![8192])).unwrap();
        for cell in &report.cells {
            assert_eq!(cell.histogram.values().sum::<usize>(), 12);
            let d2 = cell.advertised_dim * cell.advertised_dim;
            assert_eq!(cell.fraction_above(d2), cell.rejection_fraction);
        }
    }

    #[test]
    fn trials_are_shared_across_shot_counts() {
        let report = run_campaign(&small(Mode::Power, vec![5], vec![1 << 14, 1 << 18])).unwrap();
        let (a, b) = (&report.cells[0], &report.cells[1]);
        // Same instances: the exact singular spectrum dominates both, so the
        // leading singular values agree to within the noise level.
        for (x, y) in a.trials.iter().zip(&b.trials) {
            assert!((x.singular_values[0] - y.singular_values[0]).abs() < 0.2);
        }
    }

    #[test]
    fn identical_configs_give_identical_reports() {
        let config = small(Mode::Simulate, vec![3], vec![1000]);
        let a = serde_json::to_string(&run_campaign(&config).unwrap()).unwrap();
        let b = serde_json::to_string(&run_campaign(&config).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mixed_cptp_trials_are_trace_preserving() {
        let t = draw_trial(Evolution::MixedCptp { weight: 0.3 }, 3, Seed(1)).unwrap();
        assert!(t.op.trace_preservation_defect() < 1e-10);
    }
}
