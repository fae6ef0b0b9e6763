//! Stroboscopic time series: exact generation and finite-shot sampling.

use std::fs::File;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{apply, expectation, Observable, QuantumState, Superoperator};
use crate::rng::Seed;

const VALUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    Sampled,
    Ingested,
}

/// Expectation values `⟨M(t)⟩` for `t = 0, …, L − 1` with `L = 2N − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    /// Shots per point; `0` for exact values.
    shots: u64,
    provenance: Provenance,
    seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    shots: u64,
    provenance: Provenance,
    seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    t: usize,
    value: f64,
}

impl TimeSeries {
    pub fn new(
        values: Vec<f64>,
        shots: u64,
        provenance: Provenance,
        seed: Option<u64>,
    ) -> Result<Self> {
        if values.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "time series length {} is not of the form 2N − 1",
                values.len()
            )));
        }
        if let Some((t, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.abs() <= 1.0 + VALUE_TOL))
        {
            return Err(Error::InvalidArgument(format!(
                "value {v} at t = {t} outside [−1, 1]"
            )));
        }
        if provenance == Provenance::Exact && shots != 0 {
            return Err(Error::InvalidArgument(
                "exact series must have shots = 0".into(),
            ));
        }
        if provenance != Provenance::Exact && shots == 0 {
            return Err(Error::InvalidArgument(
                "sampled or ingested series need shots >= 1".into(),
            ));
        }
        Ok(Self {
            values,
            shots,
            provenance,
            seed,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Largest `N` with `2N − 1 ≤ len`.
    pub fn max_delay_size(&self) -> usize {
        self.values.len().div_ceil(2)
    }

    /// The first `2N − 1` points.
    pub fn truncated(&self, delay_size: usize) -> Result<TimeSeries> {
        let required = (2 * delay_size).saturating_sub(1);
        if delay_size == 0 || required > self.values.len() {
            return Err(Error::SeriesTooShort {
                delay_size,
                required,
                found: self.values.len(),
            });
        }
        Ok(TimeSeries {
            values: self.values[..required].to_vec(),
            ..self.clone()
        })
    }

    /// Writes `t,value` CSV to `path` and the metadata sidecar next to it.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut writer = csv::Writer::from_path(path)?;
        for (t, &value) in self.values.iter().enumerate() {
            writer.serialize(Row { t, value })?;
        }
        writer.flush().map_err(|e| Error::io(path, e))?;
        let sidecar = Sidecar {
            shots: self.shots,
            provenance: self.provenance,
            seed: self.seed,
        };
        let meta = sidecar_path(path);
        let file = File::create(&meta).map_err(|e| Error::io(&meta, e))?;
        serde_json::to_writer_pretty(file, &sidecar)?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<TimeSeries> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path)?;
        let mut values = Vec::new();
        for (expected_t, row) in reader.deserialize::<Row>().enumerate() {
            let row = row?;
            if row.t != expected_t {
                return Err(Error::InvalidArgument(format!(
                    "{}: expected t = {expected_t}, found t = {}",
                    path.display(),
                    row.t
                )));
            }
            values.push(row.value);
        }
        let meta = sidecar_path(path);
        let file = File::open(&meta).map_err(|e| Error::io(&meta, e))?;
        let sidecar: Sidecar = serde_json::from_reader(file)?;
        TimeSeries::new(values, sidecar.shots, sidecar.provenance, sidecar.seed)
    }
}

/// `series.csv` → `series.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

/// `⟨M(t)⟩ = Tr(M E^t[ρ₀])` for `t = 0, …, 2N − 2`, by iterating `ρ ← E[ρ]`.
pub fn exact_series(
    op: &Superoperator,
    rho0: &QuantumState,
    observable: &Observable,
    delay_size: usize,
) -> Result<TimeSeries> {
    if delay_size < 2 {
        return Err(Error::InvalidArgument(format!(
            "delay size must be at least 2, got {delay_size}"
        )));
    }
    for found in [rho0.dim(), observable.dim()] {
        if found != op.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                found,
            });
        }
    }
    let len = 2 * delay_size - 1;
    let mut values = Vec::with_capacity(len);
    let mut rho = rho0.clone();
    for t in 0..len {
        values.push(expectation(observable, &rho)?);
        if t + 1 < len {
            rho = apply(op, &rho)?;
        }
    }
    TimeSeries::new(values, 0, Provenance::Exact, None)
}

/// One finite-shot estimate `2n₊/n − 1` with `n₊ ~ Binomial(n, (1 + value)/2)`.
pub fn binomial_estimate<R: Rng + ?Sized>(value: f64, shots: u64, rng: &mut R) -> Result<f64> {
    if !(value.abs() <= 1.0 + VALUE_TOL) {
        return Err(Error::InvalidArgument(format!(
            "expectation {value} outside [−1, 1]"
        )));
    }
    let p_plus = ((1.0 + value) / 2.0).clamp(0.0, 1.0);
    let n_plus = Binomial::new(shots, p_plus)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .sample(rng);
    // (n₊ − n₋)/n is computed from exact integers so that counts ingested
    // from the same draw give bit-identical values.
    Ok((2 * n_plus as i128 - shots as i128) as f64 / shots as f64)
}

/// Finite-shot version of an exact series, drawn from the stream of `seed`.
pub fn sample_series(exact: &TimeSeries, shots: u64, seed: Seed) -> Result<TimeSeries> {
    let mut rng = seed.stream();
    sample_series_with(exact, shots, &mut rng, Some(seed.0))
}

/// As [`sample_series`], consuming exactly one binomial draw per point from `rng`.
pub fn sample_series_with<R: Rng + ?Sized>(
    exact: &TimeSeries,
    shots: u64,
    rng: &mut R,
    seed: Option<u64>,
) -> Result<TimeSeries> {
    if exact.provenance != Provenance::Exact {
        return Err(Error::InvalidArgument(
            "only exact series can be sampled".into(),
        ));
    }
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let values = exact
        .values
        .iter()
        .map(|&v| binomial_estimate(v, shots, rng))
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(values, shots, Provenance::Sampled, seed)
}
