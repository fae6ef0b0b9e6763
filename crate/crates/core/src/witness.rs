//! Matrix of delayed vectors, singular-value validation against worst-case
//! shot noise, p-value bounds and theoretical rank ceilings.
//!
//! For a time series `⟨M(t)⟩` the `N × N` Hankel matrix
//! `V[k][l] = ⟨M(k + l)⟩` (0-based) has rank at most `d²` for any
//! stroboscopically Markovian process on a `d`-dimensional system. With `n`
//! shots per point, the perturbation of every singular value is bounded with
//! high probability by `h = zN/√n`; singular values above `h` are "validated".

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use crate::linalg;

/// Default number of standard deviations, `p ≈ 0.001`.
pub const DEFAULT_Z: f64 = 3.29;

/// Real symmetric Hankel matrix of delayed vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayMatrix {
    entries: DMatrix<f64>,
}

impl DelayMatrix {
    /// `V[k][l] = values[k + l]` for `k, l < delay_size`.
    pub fn from_values(values: &[f64], delay_size: usize) -> Result<Self> {
        let required = (2 * delay_size).saturating_sub(1);
        if delay_size == 0 || values.len() < required {
            return Err(Error::SeriesTooShort {
                delay_size,
                required,
                found: values.len(),
            });
        }
        Ok(Self {
            entries: DMatrix::from_fn(delay_size, delay_size, |k, l| values[k + l]),
        })
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[(k, l)]
    }
}

pub fn delay_matrix(series: &TimeSeries, delay_size: usize) -> Result<DelayMatrix> {
    DelayMatrix::from_values(series.values(), delay_size)
}

/// Singular values in descending order, computed as `|eigenvalues|` of the
/// symmetric matrix.
pub fn singular_values(v: &DelayMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = linalg::symmetric_eigenvalues(&v.entries)
        .into_iter()
        .map(f64::abs)
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Parameters of the shot-noise validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    /// Delay-matrix size `N`.
    #[serde(rename = "N")]
    pub delay_size: usize,
    /// Shots per time point `n`.
    #[serde(rename = "n")]
    pub shots: u64,
    /// Standard-deviation multiplier.
    pub z: f64,
    /// Advertised dimension `d_a`.
    #[serde(rename = "d_a")]
    pub advertised_dim: usize,
}

impl ValidationConfig {
    pub fn new(delay_size: usize, shots: u64, z: f64, advertised_dim: usize) -> Result<Self> {
        if delay_size == 0 {
            return Err(Error::InvalidArgument("delay size N must be positive".into()));
        }
        if shots == 0 {
            return Err(Error::InvalidArgument("shots n must be positive".into()));
        }
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::InvalidArgument(format!("z = {z} must be finite and positive")));
        }
        if advertised_dim == 0 {
            return Err(Error::InvalidArgument("advertised dimension must be positive".into()));
        }
        Ok(Self {
            delay_size,
            shots,
            z,
            advertised_dim,
        })
    }

    /// Index (1-based) of the first singular value forbidden under the null
    /// hypothesis: `d_a² + 1`.
    pub fn first_forbidden(&self) -> usize {
        self.advertised_dim * self.advertised_dim + 1
    }
}

/// `h = zN/√n`.
pub fn threshold(config: &ValidationConfig) -> f64 {
    config.z * config.delay_size as f64 / (config.shots as f64).sqrt()
}

fn check_sorted(svals: &[f64]) -> Result<()> {
    if let Some(v) = svals.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::ContractViolation(format!(
            "singular value {v} is negative or NaN"
        )));
    }
    if svals.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::ContractViolation(
            "singular values are not sorted in descending order".into(),
        ));
    }
    Ok(())
}

/// Smallest `k ≥ 0` with `s'_{k+1} ≤ h`, taking `s'_{N+1} = 0`.
pub fn validated_rank(svals: &[f64], config: &ValidationConfig) -> Result<usize> {
    check_sorted(svals)?;
    let h = threshold(config);
    Ok(svals.iter().position(|&s| s <= h).unwrap_or(svals.len()))
}

/// Upper bound on the p value for rejecting `d = d_a`:
/// `1 − erf(√n · s'_{d_a²+1} / (N√2))`.
pub fn p_value_bound(svals: &[f64], config: &ValidationConfig) -> Result<f64> {
    check_sorted(svals)?;
    let index = config.first_forbidden();
    if config.delay_size < index || svals.len() < index {
        return Err(Error::DimensionClipped {
            advertised: config.advertised_dim,
            required: index,
            delay_size: config.delay_size.min(svals.len()),
        });
    }
    let s = svals[index - 1];
    let x = (config.shots as f64).sqrt() * s / (config.delay_size as f64 * std::f64::consts::SQRT_2);
    Ok(libm::erfc(x))
}

/// Which structural assumption a rank ceiling is derived under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankAssumption {
    /// Any stroboscopically Markovian process: `d²`.
    General,
    /// Unitary evolution: `d² − d + 1`.
    Unitary,
    /// Unitary with `distinct` distinct eigenvalues: `2·C(q,2) + 1`.
    UnitaryDegenerate { distinct: usize },
    /// Product of independent processes: `(∏ d_i)²`.
    ProductGeneral,
    /// Product of independent unitary processes: `∏ (d_i² − d_i + 1)`.
    ProductUnitary,
}

/// Theoretical ceiling on `rank(V)` for subsystems of dimensions `dims`.
pub fn rank_ceiling(dims: &[usize], assumption: RankAssumption) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::InvalidArgument("no subsystem dimensions given".into()));
    }
    if let Some(&d) = dims.iter().find(|&&d| d == 0) {
        return Err(Error::InvalidDimension(d));
    }
    let total: usize = dims.iter().product();
    Ok(match assumption {
        RankAssumption::General | RankAssumption::ProductGeneral => total * total,
        RankAssumption::Unitary => total * total - total + 1,
        RankAssumption::UnitaryDegenerate { distinct } => {
            if distinct == 0 || distinct > total {
                return Err(Error::InvalidArgument(format!(
                    "{distinct} distinct eigenvalues impossible in dimension {total}"
                )));
            }
            distinct * (distinct - 1) + 1
        }
        RankAssumption::ProductUnitary => dims.iter().map(|d| d * d - d + 1).product(),
    })
}

/// Outcome of validating one time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    pub validated_rank: usize,
    /// Absent when `N < d_a² + 1`.
    pub p_value_bound: Option<f64>,
    pub dimension_clipped: bool,
    pub config: ValidationConfig,
}

impl RankReport {
    /// Whether the validated rank exceeds `d_a²`, i.e. the null hypothesis
    /// `d = d_a` is rejected at the configured level.
    pub fn rejects_null(&self) -> bool {
        self.validated_rank > self.config.advertised_dim * self.config.advertised_dim
    }
}

/// Delay matrix, singular values, threshold, validated rank and p-value bound
/// for the first `2N − 1` points of `series`.
pub fn analyze(series: &TimeSeries, config: &ValidationConfig) -> Result<RankReport> {
    let v = delay_matrix(series, config.delay_size)?;
    let singular_values = singular_values(&v);
    let validated_rank = validated_rank(&singular_values, config)?;
    let (p_value_bound, dimension_clipped) = match p_value_bound(&singular_values, config) {
        Ok(p) => (Some(p), false),
        Err(Error::DimensionClipped { .. }) => (None, true),
        Err(e) => return Err(e),
    };
    Ok(RankReport {
        singular_values,
        threshold: threshold(config),
        validated_rank,
        p_value_bound,
        dimension_clipped,
        config: *config,
    })
}
