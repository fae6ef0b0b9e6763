//! openQASM 2.0 circuit suites and measurement-count ingestion.
//!
//! A suite holds one program per step count `t = 0, …, 2N − 2`. Each program
//! prepares with `U_P`, applies the step `t` times and measures after `U_M`.
//! Running the programs on a device (or on [`device::simulate_counts`]) gives
//! [`counts::CountsRecord`]s, which [`counts::ingest_counts`] turns back into a
//! time series.
//!
//! Bitstrings list classical bits in register order `c0 c1 …`, so character
//! `i` is the outcome of the `i`-th measured qubit (the control comes first in
//! two-qubit suites). This is the reverse of the little-endian keys some
//! vendors return.

pub mod counts;
pub mod device;
pub mod gates;
pub mod parse;
pub mod suite;

pub use counts::{ingest_counts, load_counts_dir, read_counts_json, write_counts_json, CountsRecord, OutcomeMap};
pub use device::{simulate_counts, DeviceModel};
pub use gates::{cnot, phase_aligned_distance, u3_angles, u3_matrix, U3Angles};
pub use parse::{parse_program, Instruction, Program};
pub use suite::{emit_single_qubit_suite, emit_two_qubit_suite, CircuitSuite, SuiteGates, SuiteManifest};
