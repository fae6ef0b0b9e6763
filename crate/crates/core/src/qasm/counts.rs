use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Provenance, TimeSeries};
use crate::error::{Error, Result};

/// Outcome counts of the program with `t` step repetitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsRecord {
    pub t: usize,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl CountsRecord {
    /// Checks that keys are `0`/`1` strings of one length and that counts sum to `shots`.
    pub fn validate(&self) -> Result<usize> {
        if self.shots == 0 {
            return Err(Error::InvalidCounts(format!("t = {}: zero shots", self.t)));
        }
        let mut width = None;
        let mut total: u64 = 0;
        for (bits, &n) in &self.counts {
            if bits.is_empty() || !bits.chars().all(|c| c == '0' || c == '1') {
                return Err(Error::InvalidCounts(format!(
                    "t = {}: invalid bitstring {bits:?}",
                    self.t
                )));
            }
            if *width.get_or_insert(bits.len()) != bits.len() {
                return Err(Error::InvalidCounts(format!(
                    "t = {}: bitstrings of different lengths",
                    self.t
                )));
            }
            total = total
                .checked_add(n)
                .ok_or_else(|| Error::InvalidCounts(format!("t = {}: count overflow", self.t)))?;
        }
        if total != self.shots {
            return Err(Error::InvalidCounts(format!(
                "t = {}: counts sum to {total}, expected {} shots",
                self.t, self.shots
            )));
        }
        width.ok_or_else(|| Error::InvalidCounts(format!("t = {}: no outcomes", self.t)))
    }
}

/// Reduction of a measured bitstring to a ±1 outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeMap {
    /// `(−1)^{popcount(b)}`.
    Parity,
    /// `+1` for the all-zeros string only.
    GroundVsRest,
    /// Explicit table; every observed bitstring must be listed.
    Custom(BTreeMap<String, i8>),
}

impl OutcomeMap {
    pub fn sign(&self, bits: &str) -> Result<f64> {
        match self {
            OutcomeMap::Parity => Ok(if bits.chars().filter(|&c| c == '1').count() % 2 == 0 {
                1.0
            } else {
                -1.0
            }),
            OutcomeMap::GroundVsRest => Ok(if bits.chars().all(|c| c == '0') {
                1.0
            } else {
                -1.0
            }),
            OutcomeMap::Custom(table) => match table.get(bits) {
                Some(1) => Ok(1.0),
                Some(-1) => Ok(-1.0),
                Some(v) => Err(Error::InvalidCounts(format!(
                    "outcome map sends {bits:?} to {v}, expected ±1"
                ))),
                None => Err(Error::InvalidCounts(format!(
                    "outcome map has no entry for {bits:?}"
                ))),
            },
        }
    }
}

/// `values[t] = Σ_b sign(b) counts[b] / shots` over records covering
/// `t = 0, …, 2N − 2` (in any order).
pub fn ingest_counts(records: &[CountsRecord], map: &OutcomeMap) -> Result<TimeSeries> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidCounts("no records".into()))?;
    let mut by_t: Vec<Option<&CountsRecord>> = vec![None; records.len()];
    let mut width = None;
    for record in records {
        let w = record.validate()?;
        if *width.get_or_insert(w) != w {
            return Err(Error::InvalidCounts(format!(
                "t = {}: bitstrings of length {w}, expected {}",
                record.t,
                width.unwrap_or(w)
            )));
        }
        if record.shots != first.shots {
            return Err(Error::InvalidCounts(format!(
                "t = {}: {} shots, expected {}",
                record.t, record.shots, first.shots
            )));
        }
        let slot = by_t.get_mut(record.t).ok_or_else(|| {
            Error::InvalidCounts(format!(
                "t = {} out of range for {} records",
                record.t,
                records.len()
            ))
        })?;
        if slot.replace(record).is_some() {
            return Err(Error::InvalidCounts(format!("duplicate t = {}", record.t)));
        }
    }
    let values = by_t
        .iter()
        .enumerate()
        .map(|(t, r)| {
            let r = r.ok_or_else(|| Error::InvalidCounts(format!("missing t = {t}")))?;
            let mut sum = 0.0;
            for (bits, &n) in &r.counts {
                sum += map.sign(bits)? * n as f64;
            }
            Ok(sum / r.shots as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() % 2 == 0 {
        return Err(Error::InvalidCounts(format!(
            "{} records; need 2N − 1 for some N",
            values.len()
        )));
    }
    TimeSeries::new(values, first.shots, Provenance::Ingested, None)
}

pub fn read_counts_json(path: impl AsRef<Path>) -> Result<Vec<CountsRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}

pub fn write_counts_json(path: impl AsRef<Path>, records: &[CountsRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(file, records)?;
    Ok(())
}

/// Loads `step_<t>.json` files, each holding one [`CountsRecord`], from `dir`.
pub fn load_counts_dir(dir: impl AsRef<Path>) -> Result<Vec<CountsRecord>> {
    let dir = dir.as_ref();
    let mut records = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let Some(t) = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.strip_prefix("step_"))
            .and_then(|n| n.strip_suffix(".json"))
            .and_then(|n| n.parse::<usize>().ok())
        else {
            continue;
        };
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let record: CountsRecord = serde_json::from_reader(file)?;
        if record.t != t {
            return Err(Error::InvalidCounts(format!(
                "{} holds t = {}",
                path.display(),
                record.t
            )));
        }
        records.push(record);
    }
    records.sort_by_key(|r| r.t);
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: usize, shots: u64, counts: &[(&str, u64)]) -> CountsRecord {
        CountsRecord {
            t,
            shots,
            counts: counts.iter().map(|(b, n)| (b.to_string(), *n)).collect(),
        }
    }

    fn three(counts: &[(&str, u64)], shots: u64) -> Vec<CountsRecord> {
        (0..3).map(|t| record(t, shots, counts)).collect()
    }

    #[test]
    fn all_zero_outcomes_give_one() {
        let s = ingest_counts(&three(&[("0", 100), ("1", 0)], 100), &OutcomeMap::Parity).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, 1.0]);
        assert_eq!(s.provenance(), Provenance::Ingested);
        assert_eq!(s.shots(), 100);
    }

    #[test]
    fn balanced_outcomes_give_zero() {
        let s = ingest_counts(&three(&[("0", 4096), ("1", 4096)], 8192), &OutcomeMap::Parity).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0, 0.0]);
        let two = three(&[("00", 2048), ("01", 2048), ("10", 2048), ("11", 2048)], 8192);
        let s = ingest_counts(&two, &OutcomeMap::Parity).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn ground_vs_rest_on_two_bits() {
        let two = three(&[("00", 1), ("01", 1), ("10", 1), ("11", 1)], 4);
        let s = ingest_counts(&two, &OutcomeMap::GroundVsRest).unwrap();
        assert_eq!(s.values(), &[-0.5, -0.5, -0.5]);
    }

    #[test]
    fn validation_errors() {
        let mut bad = three(&[("0", 10), ("1", 5)], 16);
        assert!(matches!(ingest_counts(&bad, &OutcomeMap::Parity), Err(Error::InvalidCounts(_))));
        bad = three(&[("0", 10)], 10);
        bad[1].shots = 11;
        bad[1].counts.insert("0".into(), 11);
        assert!(ingest_counts(&bad, &OutcomeMap::Parity).is_err());
        bad = three(&[("0", 10)], 10);
        bad[2].t = 3;
        assert!(ingest_counts(&bad, &OutcomeMap::Parity).is_err());
        bad = three(&[("0", 5), ("2", 5)], 10);
        assert!(ingest_counts(&bad, &OutcomeMap::Parity).is_err());
        bad = (0..2).map(|t| record(t, 1, &[("0", 1)])).collect();
        assert!(ingest_counts(&bad, &OutcomeMap::Parity).is_err());
    }

    #[test]
    fn custom_map_must_cover_outcomes() {
        let map = OutcomeMap::Custom([("0".to_string(), 1)].into_iter().collect());
        assert!(ingest_counts(&three(&[("0", 1), ("1", 1)], 2), &map).is_err());
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("counts.json");
        let records = three(&[("01", 3), ("10", 4)], 7);
        write_counts_json(&path, &records).unwrap();
        assert_eq!(read_counts_json(&path).unwrap(), records);
        for r in &records {
            let p = dir.path().join(format!("step_{}.json", r.t));
            std::fs::write(p, serde_json::to_string(r).unwrap()).unwrap();
        }
        assert_eq!(load_counts_dir(dir.path()).unwrap(), records);
    }
}
