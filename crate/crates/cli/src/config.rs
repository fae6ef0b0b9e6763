//! Campaign configuration: defaults, an optional TOML file and command-line
//! flags, merged with precedence flags > file > defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

pub const OUTPUT_DIR_ENV: &str = "DIMWIT_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "dimwit-out";
pub const DEFAULT_SHOTS: u64 = 8192;
pub const DEFAULT_SIMULATE_TRIALS: usize = 2000;
pub const DEFAULT_POWER_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Simulate,
    Power,
    Analyze,
    Emit,
    Ingest,
    Execute,
    Spectrum,
}

/// Random evolution drawn for each trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evolution {
    /// `two_qubit_step` for `d = 4`, `haar_unitary` otherwise.
    Auto,
    Identity,
    HaarUnitary,
    /// `weight · T_random + (1 − weight) · T_U` with `U` Haar.
    MixedCptp { weight: f64 },
    /// `CX (U_1 ⊗ U_2)` on two qubits, read out through parity.
    TwoQubitStep,
}

impl Evolution {
    pub fn resolve(self, dim: usize) -> Evolution {
        match self {
            Evolution::Auto if dim == 4 => Evolution::TwoQubitStep,
            Evolution::Auto => Evolution::HaarUnitary,
            other => other,
        }
    }

    pub fn from_name(name: &str, weight: Option<f64>) -> Result<Evolution> {
        let evolution = match name.replace('-', "_").as_str() {
            "auto" => Evolution::Auto,
            "identity" => Evolution::Identity,
            "haar_unitary" => Evolution::HaarUnitary,
            "mixed_cptp" => Evolution::MixedCptp {
                weight: weight.unwrap_or(0.5),
            },
            "two_qubit_step" => Evolution::TwoQubitStep,
            other => bail!("unknown evolution `{other}`"),
        };
        if weight.is_some() && !matches!(evolution, Evolution::MixedCptp { .. }) {
            bail!("weight only applies to mixed_cptp");
        }
        Ok(evolution)
    }

    pub fn validate(&self, dims: &[usize]) -> Result<()> {
        match *self {
            Evolution::MixedCptp { weight } if !(0.0..=1.0).contains(&weight) => {
                bail!("weight {weight} outside [0, 1]")
            }
            Evolution::TwoQubitStep => {
                if let Some(d) = dims.iter().find(|&&d| d != 4) {
                    bail!("two_qubit_step needs d = 4, got {d}");
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Keys accepted in a `--config` TOML file. All are optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dims: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub shots: Option<Vec<u64>>,
    #[serde(rename = "N")]
    pub delay_size: Option<usize>,
    pub z: Option<f64>,
    #[serde(rename = "d_a")]
    pub advertised_dim: Option<usize>,
    pub seed: Option<u64>,
    pub evolution: Option<String>,
    pub weight: Option<f64>,
    pub output_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn load_optional(path: Option<&Path>) -> Result<FileConfig> {
        path.map(FileConfig::load)
            .transpose()
            .map(Option::unwrap_or_default)
    }
}

/// Flags that override file and default values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dims: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub shots: Option<Vec<u64>>,
    pub delay_size: Option<usize>,
    pub z: Option<f64>,
    pub advertised_dim: Option<usize>,
    pub seed: Option<u64>,
    pub evolution: Option<String>,
    pub weight: Option<f64>,
    pub output_dir: Option<PathBuf>,
}

/// Output directory: flag, then file, then `DIMWIT_OUTPUT_DIR`, then `dimwit-out`.
pub fn output_dir(flag: Option<PathBuf>, file: &FileConfig) -> PathBuf {
    flag.or_else(|| file.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub mode: Mode,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub shots: Vec<u64>,
    /// `None` selects 10 for `d ≤ 3` and 20 otherwise.
    #[serde(rename = "N")]
    pub delay_size: Option<usize>,
    pub z: f64,
    /// `None` selects the largest power of two not above `d`.
    #[serde(rename = "d_a")]
    pub advertised_dim: Option<usize>,
    pub seed: u64,
    pub evolution: Evolution,
    pub output_dir: PathBuf,
}

impl CampaignConfig {
    pub fn defaults(mode: Mode) -> CampaignConfig {
        let (dims, trials, shots) = match mode {
            Mode::Power => (
                vec![4, 5],
                DEFAULT_POWER_TRIALS,
                (14..=19).map(|x| 1u64 << x).collect(),
            ),
            _ => (vec![2, 3], DEFAULT_SIMULATE_TRIALS, vec![DEFAULT_SHOTS]),
        };
        CampaignConfig {
            mode,
            dims,
            trials,
            shots,
            delay_size: None,
            z: dimwit::witness::DEFAULT_Z,
            advertised_dim: None,
            seed: 0,
            evolution: Evolution::Auto,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
        }
    }

    pub fn resolve(mode: Mode, file: &FileConfig, flags: Overrides) -> Result<CampaignConfig> {
        let base = CampaignConfig::defaults(mode);
        let evolution_name = flags.evolution.clone().or_else(|| file.evolution.clone());
        let weight = flags.weight.or(file.weight);
        let evolution = match evolution_name {
            Some(name) => Evolution::from_name(&name, weight)?,
            None if weight.is_some() => bail!("weight given without evolution = mixed_cptp"),
            None => base.evolution,
        };
        let config = CampaignConfig {
            mode,
            dims: flags.dims.or_else(|| file.dims.clone()).unwrap_or(base.dims),
            trials: flags.trials.or(file.trials).unwrap_or(base.trials),
            shots: flags.shots.or_else(|| file.shots.clone()).unwrap_or(base.shots),
            delay_size: flags.delay_size.or(file.delay_size),
            z: flags.z.or(file.z).unwrap_or(base.z),
            advertised_dim: flags.advertised_dim.or(file.advertised_dim),
            seed: flags.seed.or(file.seed).unwrap_or(base.seed),
            evolution,
            output_dir: output_dir(flags.output_dir, file),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.dims.is_empty() || self.shots.is_empty() {
            bail!("dims and shots must be non-empty");
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            bail!("dimension {d} is below 2");
        }
        if self.shots.contains(&0) {
            bail!("shots must be at least 1");
        }
        if !(self.z > 0.0 && self.z.is_finite()) {
            bail!("z = {} must be finite and positive", self.z);
        }
        if matches!(self.delay_size, Some(n) if n < 2) {
            bail!("N must be at least 2");
        }
        if self.advertised_dim == Some(0) {
            bail!("d_a must be positive");
        }
        self.evolution.validate(&self.dims)
    }

    pub fn delay_size_for(&self, dim: usize) -> usize {
        self.delay_size.unwrap_or(if dim <= 3 { 10 } else { 20 })
    }

    pub fn advertised_dim_for(&self, dim: usize) -> usize {
        self.advertised_dim.unwrap_or(1 << dim.ilog2())
    }
}
