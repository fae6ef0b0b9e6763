//! Command-line front end. Exit codes: 0 success (null not rejected), 2 null
//! rejected by `analyze`, 1 any error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dimwit::qasm::{
    emit_single_qubit_suite, emit_two_qubit_suite, ingest_counts, parse_program,
    simulate_counts, write_counts_json, CircuitSuite, DeviceModel, OutcomeMap,
};
use dimwit::rng::Seed;

use crate::analyze::{analyze_file, exit_code, load_counts, AnalyzeOptions};
use crate::campaign::{run_campaign, write_campaign};
use crate::config::{self, CampaignConfig, Evolution, FileConfig, Mode, Overrides};
use crate::manifest::RunManifest;
use crate::spectrum::{power_grid, spectrum_dump, write_spectrum};

#[derive(Debug, Parser)]
#[command(name = "dimwit", version, about = "Hilbert-space dimension witness from delayed vectors")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulated campaign: validated-rank histograms per dimension.
    Simulate(CampaignArgs),
    /// Power study: rejection fraction against shot count.
    Power(CampaignArgs),
    /// Validate the rank of a series (CSV) or of counts (JSON file or directory).
    Analyze(AnalyzeArgs),
    /// Write an openQASM 2.0 circuit suite.
    Emit(EmitArgs),
    /// Convert counts into a time-series CSV.
    Ingest(IngestArgs),
    /// Run an emitted suite on a simulated device and write counts.
    Execute(ExecuteArgs),
    /// Eigenvalue trajectories λ^s of a random evolution.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    /// TOML file with defaults for any of the options below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub shots: Option<Vec<u64>>,
    /// Delay size N (default 10 for d <= 3, else 20).
    #[arg(short = 'N', long = "delay-size")]
    pub delay_size: Option<usize>,
    #[arg(long)]
    pub z: Option<f64>,
    /// Advertised dimension d_a (default: largest power of two <= d).
    #[arg(long = "advertised-dim", alias = "d-a")]
    pub advertised_dim: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// auto, identity, haar-unitary, mixed-cptp or two-qubit-step.
    #[arg(long)]
    pub evolution: Option<String>,
    /// Weight of the random CPTP part for mixed-cptp.
    #[arg(long)]
    pub weight: Option<f64>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MapArg {
    Parity,
    GroundVsRest,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Reduction of bitstrings to ±1.
    #[arg(long, value_enum, default_value = "parity")]
    pub map: MapArg,
    /// JSON object from bitstring to ±1; overrides --map.
    #[arg(long)]
    pub map_file: Option<PathBuf>,
}

impl MapArgs {
    pub fn resolve(&self) -> Result<OutcomeMap> {
        if let Some(path) = &self.map_file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let table: BTreeMap<String, i8> = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            return Ok(OutcomeMap::Custom(table));
        }
        Ok(match self.map {
            MapArg::Parity => OutcomeMap::Parity,
            MapArg::GroundVsRest => OutcomeMap::GroundVsRest,
        })
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// `.csv` series (with `.meta.json` sidecar), counts JSON, or counts directory.
    pub input: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Delay size N (default: largest supported by the series).
    #[arg(short = 'N', long = "delay-size")]
    pub delay_size: Option<usize>,
    /// Shots per point (default: from the input).
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long = "advertised-dim", alias = "d-a")]
    pub advertised_dim: Option<usize>,
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub qubits: u8,
    /// Delay size N (default 10 for one qubit, 20 for two).
    #[arg(short = 'N', long = "delay-size")]
    pub delay_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub control: usize,
    #[arg(long, default_value_t = 1)]
    pub target: usize,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Counts JSON file or directory of `step_<t>.json` files.
    pub input: PathBuf,
    #[command(flatten)]
    pub map: MapArgs,
    /// Series CSV to write (default: `<output-dir>/series.csv`).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviceArg {
    Ideal,
    LeakyQutrit,
}

#[derive(Debug, Args)]
pub struct ExecuteArgs {
    /// Directory written by `emit`.
    pub suite: PathBuf,
    #[arg(long, value_enum, default_value = "ideal")]
    pub device: DeviceArg,
    /// Seed of the leaky device's level coupling (default: --seed).
    #[arg(long)]
    pub coupling_seed: Option<u64>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub map: MapArgs,
    /// Counts JSON to write (default: `<output-dir>/counts.json`).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub evolution: Option<String>,
    #[arg(long)]
    pub weight: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest power s.
    #[arg(long, default_value_t = 4.0)]
    pub max_power: f64,
    /// Spacing of the powers s.
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::Simulate(args) => campaign(Mode::Simulate, args),
        Command::Power(args) => campaign(Mode::Power, args),
        Command::Analyze(args) => analyze(args),
        Command::Emit(args) => emit(args),
        Command::Ingest(args) => ingest(args),
        Command::Execute(args) => execute(args),
        Command::Spectrum(args) => spectrum(args),
    }
}

fn campaign(mode: Mode, args: CampaignArgs) -> Result<i32> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let file = FileConfig::load_optional(args.config.as_deref())?;
    let flags = Overrides {
        dims: args.dims,
        trials: args.trials,
        shots: args.shots,
        delay_size: args.delay_size,
        z: args.z,
        advertised_dim: args.advertised_dim,
        seed: args.seed,
        evolution: args.evolution,
        weight: args.weight,
        output_dir: args.output_dir,
    };
    let config = CampaignConfig::resolve(mode, &file, flags)?;
    let report = run_campaign(&config)?;
    write_campaign(&report, &config.output_dir)?;
    let name = if mode == Mode::Power { "power" } else { "simulate" };
    RunManifest::new(name, &config, Some(config.seed), started, clock.elapsed())
        .write(&config.output_dir)?;
    for cell in &report.cells {
        let d2 = cell.advertised_dim * cell.advertised_dim;
        println!(
            "d = {}, n = {}, N = {}: {} / {} trials above rank {d2} ({:.4})",
            cell.dim,
            cell.shots,
            cell.delay_size,
            cell.rejections,
            cell.trials.len(),
            cell.rejection_fraction
        );
    }
    Ok(0)
}

#[derive(Serialize)]
struct AnalyzeEcho<'a> {
    mode: Mode,
    input: &'a Path,
    #[serde(rename = "N")]
    delay_size: Option<usize>,
    shots: Option<u64>,
    z: f64,
    #[serde(rename = "d_a")]
    advertised_dim: Option<usize>,
    map: &'a OutcomeMap,
}

fn analyze(args: AnalyzeArgs) -> Result<i32> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let file = FileConfig::load_optional(args.config.as_deref())?;
    let options = AnalyzeOptions {
        delay_size: args.delay_size.or(file.delay_size),
        shots: args.shots.or_else(|| file.shots.as_ref().and_then(|s| s.first().copied())),
        z: args.z.or(file.z).unwrap_or(dimwit::witness::DEFAULT_Z),
        advertised_dim: args.advertised_dim.or(file.advertised_dim),
        map: args.map.resolve()?,
    };
    let out = config::output_dir(args.output_dir, &file);
    let report = analyze_file(&args.input, &options)?;
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join("rank_report.json");
    let f = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    serde_json::to_writer_pretty(f, &report)?;
    let echo = AnalyzeEcho {
        mode: Mode::Analyze,
        input: &args.input,
        delay_size: options.delay_size,
        shots: options.shots,
        z: options.z,
        advertised_dim: options.advertised_dim,
        map: &options.map,
    };
    RunManifest::new("analyze", &echo, None, started, clock.elapsed()).write(&out)?;
    let d_a = report.config.advertised_dim;
    let verdict = if report.rejects_null() {
        format!("rejected d = {d_a}")
    } else {
        format!("consistent with d = {d_a}")
    };
    let p = report
        .p_value_bound
        .map_or_else(|| "n/a (N clips d_a)".to_string(), |p| format!("{p:.3e}"));
    println!(
        "validated rank {} (threshold {:.6}, N = {}, n = {}): {verdict}; p <= {p}",
        report.validated_rank, report.threshold, report.config.delay_size, report.config.shots
    );
    Ok(exit_code(&report))
}

#[derive(Serialize)]
struct EmitEcho {
    mode: Mode,
    qubits: u8,
    #[serde(rename = "N")]
    delay_size: usize,
    seed: u64,
    control: usize,
    target: usize,
}

fn emit(args: EmitArgs) -> Result<i32> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let file = FileConfig::load_optional(args.config.as_deref())?;
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let delay_size = args
        .delay_size
        .or(file.delay_size)
        .unwrap_or(if args.qubits == 1 { 10 } else { 20 });
    let suite = if args.qubits == 1 {
        emit_single_qubit_suite(Seed(seed), delay_size)?
    } else {
        emit_two_qubit_suite(Seed(seed), delay_size, args.control, args.target)?
    };
    let out = config::output_dir(args.output_dir, &file);
    suite.write_to(&out)?;
    let echo = EmitEcho {
        mode: Mode::Emit,
        qubits: args.qubits,
        delay_size,
        seed,
        control: args.control,
        target: args.target,
    };
    RunManifest::new("emit", &echo, Some(seed), started, clock.elapsed()).write(&out)?;
    println!(
        "wrote {} programs and manifest.json to {}",
        suite.programs().len(),
        out.display()
    );
    Ok(0)
}

fn ingest(args: IngestArgs) -> Result<i32> {
    let file = FileConfig::load_optional(args.config.as_deref())?;
    let map = args.map.resolve()?;
    let records = load_counts(&args.input)?;
    let series = ingest_counts(&records, &map)
        .with_context(|| format!("ingesting {}", args.input.display()))?;
    let path = match args.output {
        Some(p) => p,
        None => {
            let out = config::output_dir(args.output_dir, &file);
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            out.join("series.csv")
        }
    };
    series.write_csv(&path)?;
    println!("wrote {} points ({} shots each) to {}", series.len(), series.shots(), path.display());
    Ok(0)
}

#[derive(Serialize)]
struct ExecuteEcho<'a> {
    mode: Mode,
    suite: &'a Path,
    device: &'a DeviceModel,
    shots: u64,
    seed: u64,
    map: &'a OutcomeMap,
}

fn execute(args: ExecuteArgs) -> Result<i32> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let file = FileConfig::load_optional(args.config.as_deref())?;
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let shots = args
        .shots
        .or_else(|| file.shots.as_ref().and_then(|s| s.first().copied()))
        .unwrap_or(config::DEFAULT_SHOTS);
    let device = match args.device {
        DeviceArg::Ideal => DeviceModel::Ideal,
        DeviceArg::LeakyQutrit => DeviceModel::LeakyQutrit {
            coupling_seed: args.coupling_seed.unwrap_or(seed),
        },
    };
    let map = args.map.resolve()?;
    let manifest = CircuitSuite::read_manifest(&args.suite)?;
    let programs = manifest
        .programs
        .iter()
        .map(|name| {
            let path = args.suite.join(name);
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_program(&text).with_context(|| format!("parsing {}", path.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    if programs.is_empty() {
        bail!("suite {} lists no programs", args.suite.display());
    }
    let records = simulate_counts(&programs, &device, shots, &map, Seed(seed))?;
    let out = config::output_dir(args.output_dir, &file);
    let path = match args.output {
        Some(p) => p,
        None => {
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            out.join("counts.json")
        }
    };
    write_counts_json(&path, &records)?;
    let echo = ExecuteEcho {
        mode: Mode::Execute,
        suite: &args.suite,
        device: &device,
        shots,
        seed,
        map: &map,
    };
    RunManifest::new("execute", &echo, Some(seed), started, clock.elapsed()).write(&out)?;
    println!("wrote counts for {} programs to {}", records.len(), path.display());
    Ok(0)
}

#[derive(Serialize)]
struct SpectrumEcho {
    mode: Mode,
    evolution: Evolution,
    dim: usize,
    seed: u64,
    max_power: f64,
    step: f64,
}

fn spectrum(args: SpectrumArgs) -> Result<i32> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let file = FileConfig::load_optional(args.config.as_deref())?;
    let weight = args.weight.or(file.weight);
    let evolution = match args.evolution.or(file.evolution.clone()) {
        Some(name) => Evolution::from_name(&name, weight)?,
        None => Evolution::Auto,
    };
    let dim = args
        .dim
        .or_else(|| file.dims.as_ref().and_then(|d| d.first().copied()))
        .unwrap_or(2);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let powers = power_grid(args.max_power, args.step)?;
    let points = spectrum_dump(evolution, dim, Seed(seed), &powers)?;
    let out = config::output_dir(args.output_dir, &file);
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    write_spectrum(&points, &out.join("spectrum.csv"))?;
    let echo = SpectrumEcho {
        mode: Mode::Spectrum,
        evolution,
        dim,
        seed,
        max_power: args.max_power,
        step: args.step,
    };
    RunManifest::new("spectrum", &echo, Some(seed), started, clock.elapsed()).write(&out)?;
    println!("wrote {} spectrum points to {}", points.len(), out.join("spectrum.csv").display());
    Ok(0)
}
