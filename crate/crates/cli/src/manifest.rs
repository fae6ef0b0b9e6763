use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Versions {
    pub dimwit: &'static str,
    pub dimwit_cli: &'static str,
}

/// `run_manifest.json`: what ran, with which settings, and for how long.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub command: &'a str,
    pub arguments: Vec<String>,
    pub config: &'a C,
    pub seed: Option<u64>,
    pub versions: Versions,
    pub started_unix_seconds: u64,
    pub wall_clock_seconds: f64,
    pub threads: usize,
}

impl<'a, C: Serialize> RunManifest<'a, C> {
    pub fn new(
        command: &'a str,
        config: &'a C,
        seed: Option<u64>,
        started: SystemTime,
        elapsed: Duration,
    ) -> Self {
        RunManifest {
            command,
            arguments: std::env::args().collect(),
            config,
            seed,
            versions: Versions {
                dimwit: dimwit::VERSION,
                dimwit_cli: env!("CARGO_PKG_VERSION"),
            },
            started_unix_seconds: started
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            wall_clock_seconds: elapsed.as_secs_f64(),
            threads: rayon::current_num_threads(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join("run_manifest.json");
        let file = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }
}
