//! Analysis of serialized series: CSV with sidecar, counts JSON, or a
//! directory of per-step counts files.

use std::path::Path;

use anyhow::{bail, Context, Result};

use dimwit::dynamics::TimeSeries;
use dimwit::qasm::{ingest_counts, load_counts_dir, read_counts_json, CountsRecord, OutcomeMap};
use dimwit::witness::{analyze, RankReport, ValidationConfig};

/// Exit status when the null hypothesis `d = d_a` is rejected.
pub const EXIT_REJECTED: i32 = 2;

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Defaults to the largest `N` the series supports.
    pub delay_size: Option<usize>,
    /// Overrides the shot count recorded with the series.
    pub shots: Option<u64>,
    pub z: f64,
    /// Defaults to `2^qubits` for counts and 2 for CSV series.
    pub advertised_dim: Option<usize>,
    pub map: OutcomeMap,
}

/// A loaded series plus the number of measured qubits when it came from counts.
pub struct LoadedSeries {
    pub series: TimeSeries,
    pub qubits: Option<usize>,
}

fn bit_width(records: &[CountsRecord]) -> Option<usize> {
    records
        .first()
        .and_then(|r| r.counts.keys().next())
        .map(String::len)
}

pub fn load_counts(path: &Path) -> Result<Vec<CountsRecord>> {
    if path.is_dir() {
        let records = load_counts_dir(path)?;
        if records.is_empty() {
            bail!("{}: no step_<t>.json files", path.display());
        }
        Ok(records)
    } else {
        Ok(read_counts_json(path)?)
    }
}

pub fn load_series(path: &Path, map: &OutcomeMap) -> Result<LoadedSeries> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let series = TimeSeries::read_csv(path)?;
        return Ok(LoadedSeries {
            series,
            qubits: None,
        });
    }
    let records = load_counts(path)?;
    let series = ingest_counts(&records, map)?;
    Ok(LoadedSeries {
        series,
        qubits: bit_width(&records),
    })
}

pub fn analyze_file(path: &Path, options: &AnalyzeOptions) -> Result<RankReport> {
    let loaded = load_series(path, &options.map)
        .with_context(|| format!("loading {}", path.display()))?;
    let series = loaded.series;
    let delay_size = options.delay_size.unwrap_or_else(|| series.max_delay_size());
    let shots = match (options.shots, series.shots()) {
        (Some(n), _) => n,
        (None, 0) => bail!("{} holds exact values; pass --shots", path.display()),
        (None, n) => n,
    };
    let advertised = options
        .advertised_dim
        .unwrap_or_else(|| loaded.qubits.map_or(2, |q| 1 << q));
    let config = ValidationConfig::new(delay_size, shots, options.z, advertised)?;
    Ok(analyze(&series, &config)?)
}

/// `0` when the null is not rejected, [`EXIT_REJECTED`] otherwise.
pub fn exit_code(report: &RankReport) -> i32 {
    if report.rejects_null() {
        EXIT_REJECTED
    } else {
        0
    }
}
