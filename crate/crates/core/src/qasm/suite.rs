use std::fmt::Write as _;
use std::fs::{self, File};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::quantum::{haar_unitary, unitary_superop, Observable, QuantumState, Superoperator};
use crate::rng::Seed;

use super::counts::OutcomeMap;
use super::gates::{cnot, u3_angles, U3Angles};

/// Angle triples of every gate in a suite, one entry per qubit in the order
/// of [`CircuitSuite::qubits`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteGates {
    pub preparation: Vec<U3Angles>,
    pub measurement: Vec<U3Angles>,
    pub step: Vec<U3Angles>,
}

/// JSON manifest written next to the `.qasm` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub seed: u64,
    #[serde(rename = "N")]
    pub delay_size: usize,
    pub qubit_count: usize,
    pub qubits: Vec<usize>,
    pub gates: SuiteGates,
    pub programs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSuite {
    seed: u64,
    delay_size: usize,
    /// Physical qubit indices; `[control, target]` for two-qubit suites.
    qubits: Vec<usize>,
    gates: SuiteGates,
    programs: Vec<String>,
}

fn haar_u3(rng: &mut crate::rng::Stream) -> Result<U3Angles> {
    u3_angles(&haar_unitary(2, rng)?)
}

fn check_delay_size(delay_size: usize) -> Result<()> {
    if delay_size < 2 {
        return Err(Error::InvalidArgument(format!(
            "delay size must be at least 2, got {delay_size}"
        )));
    }
    Ok(())
}

impl SuiteGates {
    /// Draws `U_P`, `U_M`, `U_1` in that order from the stream of `seed`.
    pub fn draw_single(seed: Seed) -> Result<Self> {
        let mut rng = seed.stream();
        let preparation = haar_u3(&mut rng)?;
        let measurement = haar_u3(&mut rng)?;
        let step = haar_u3(&mut rng)?;
        Ok(Self {
            preparation: vec![preparation],
            measurement: vec![measurement],
            step: vec![step],
        })
    }

    /// Draws `U_P` (control, target), `U_M` (control, target), `U_1`, `U_2`.
    pub fn draw_two(seed: Seed) -> Result<Self> {
        let mut rng = seed.stream();
        let mut draw = |n: usize| (0..n).map(|_| haar_u3(&mut rng)).collect::<Result<Vec<_>>>();
        let preparation = draw(2)?;
        let measurement = draw(2)?;
        let step = draw(2)?;
        Ok(Self {
            preparation,
            measurement,
            step,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.step.len()
    }

    fn local_product(list: &[U3Angles]) -> CMatrix {
        list.iter()
            .map(U3Angles::matrix)
            .reduce(|a, b| linalg::kron(&a, &b))
            .expect("suites have at least one qubit")
    }

    /// The repeated step, `U_1` or `CX (U_1 ⊗ U_2)`.
    pub fn step_unitary(&self) -> CMatrix {
        let local = Self::local_product(&self.step);
        if self.qubit_count() == 2 {
            cnot() * local
        } else {
            local
        }
    }

    /// `U_P |0…0⟩`.
    pub fn target_state(&self) -> Result<QuantumState> {
        let u = Self::local_product(&self.preparation);
        QuantumState::pure(u.column(0).as_slice())
    }

    /// The ±1 observable read out under `map`.
    pub fn target_observable(&self, map: &OutcomeMap) -> Result<Observable> {
        let n = self.qubit_count();
        let dim = 1usize << n;
        let mut plus = CMatrix::zeros(dim, dim);
        for k in 0..dim {
            let bits: String = (0..n)
                .map(|i| if (k >> (n - 1 - i)) & 1 == 1 { '1' } else { '0' })
                .collect();
            if map.sign(&bits)? > 0.0 {
                plus[(k, k)] = linalg::ONE;
            }
        }
        Observable::from_plus_projector(plus)?
            .measured_after(&Self::local_product(&self.measurement))
    }
}

/// Single-qubit suite: `U_P`, then `t` copies of `U_1`, then `U_M`.
pub fn emit_single_qubit_suite(seed: Seed, delay_size: usize) -> Result<CircuitSuite> {
    check_delay_size(delay_size)?;
    CircuitSuite::from_gates(seed.0, delay_size, vec![0], SuiteGates::draw_single(seed)?)
}

/// Two-qubit suite whose step is `CX (U_1 ⊗ U_2)` with `U_1` on `control`.
pub fn emit_two_qubit_suite(
    seed: Seed,
    delay_size: usize,
    control: usize,
    target: usize,
) -> Result<CircuitSuite> {
    check_delay_size(delay_size)?;
    if control == target {
        return Err(Error::InvalidArgument(format!(
            "control and target are both qubit {control}"
        )));
    }
    CircuitSuite::from_gates(seed.0, delay_size, vec![control, target], SuiteGates::draw_two(seed)?)
}

fn u3_line(out: &mut String, angles: &U3Angles, qubit: usize) {
    writeln!(
        out,
        "u3({},{},{}) q[{qubit}];",
        angles.theta, angles.phi, angles.lambda
    )
    .unwrap();
}

impl CircuitSuite {
    /// Builds the programs for explicit gate parameters.
    pub fn from_gates(
        seed: u64,
        delay_size: usize,
        qubits: Vec<usize>,
        gates: SuiteGates,
    ) -> Result<Self> {
        check_delay_size(delay_size)?;
        let n = qubits.len();
        if !(1..=2).contains(&n) {
            return Err(Error::InvalidArgument(format!("{n} qubits per suite")));
        }
        if n == 2 && qubits[0] == qubits[1] {
            return Err(Error::InvalidArgument("repeated qubit index".into()));
        }
        for (name, list) in [
            ("preparation", &gates.preparation),
            ("measurement", &gates.measurement),
            ("step", &gates.step),
        ] {
            if list.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "{} {name} gates for {n} qubits",
                    list.len()
                )));
            }
        }
        let programs = (0..2 * delay_size - 1)
            .map(|t| render(&qubits, &gates, t))
            .collect();
        Ok(Self {
            seed,
            delay_size,
            qubits,
            gates,
            programs,
        })
    }

    pub fn from_manifest(manifest: &SuiteManifest) -> Result<Self> {
        let suite = Self::from_gates(
            manifest.seed,
            manifest.delay_size,
            manifest.qubits.clone(),
            manifest.gates.clone(),
        )?;
        if suite.qubit_count() != manifest.qubit_count {
            return Err(Error::InvalidArgument(format!(
                "manifest lists {} qubits but qubit_count = {}",
                suite.qubit_count(),
                manifest.qubit_count
            )));
        }
        Ok(suite)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn delay_size(&self) -> usize {
        self.delay_size
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn gates(&self) -> &SuiteGates {
        &self.gates
    }

    /// Program texts indexed by step count.
    pub fn programs(&self) -> &[String] {
        &self.programs
    }

    pub fn file_name(t: usize) -> String {
        format!("step_{t}.qasm")
    }

    pub fn manifest(&self) -> SuiteManifest {
        SuiteManifest {
            seed: self.seed,
            delay_size: self.delay_size,
            qubit_count: self.qubit_count(),
            qubits: self.qubits.clone(),
            gates: self.gates.clone(),
            programs: (0..self.programs.len()).map(Self::file_name).collect(),
        }
    }

    /// Writes `step_<t>.qasm` for every program and `manifest.json` into `dir`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (t, program) in self.programs.iter().enumerate() {
            let path = dir.join(Self::file_name(t));
            fs::write(&path, program).map_err(|e| Error::io(&path, e))?;
        }
        let path = dir.join("manifest.json");
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::to_writer_pretty(file, &self.manifest())?;
        Ok(())
    }

    pub fn read_manifest(dir: impl AsRef<Path>) -> Result<SuiteManifest> {
        let path = dir.as_ref().join("manifest.json");
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_reader(file)?)
    }

    /// The repeated step; tensor factors follow [`Self::qubits`].
    pub fn step_unitary(&self) -> CMatrix {
        self.gates.step_unitary()
    }

    pub fn target_superop(&self) -> Result<Superoperator> {
        unitary_superop(&self.step_unitary())
    }

    pub fn target_state(&self) -> Result<QuantumState> {
        self.gates.target_state()
    }

    pub fn target_observable(&self, map: &OutcomeMap) -> Result<Observable> {
        self.gates.target_observable(map)
    }
}

fn render(qubits: &[usize], gates: &SuiteGates, t: usize) -> String {
    let mut out = String::new();
    let width = qubits.iter().max().copied().unwrap_or(0) + 1;
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "qreg q[{width}];").unwrap();
    for k in 0..qubits.len() {
        writeln!(out, "creg c{k}[1];").unwrap();
    }
    for (angles, &q) in gates.preparation.iter().zip(qubits) {
        u3_line(&mut out, angles, q);
    }
    let barrier = format!(
        "barrier {};\n",
        qubits
            .iter()
            .map(|q| format!("q[{q}]"))
            .collect::<Vec<_>>()
            .join(",")
    );
    for block in 0..t {
        if block > 0 {
            out.push_str(&barrier);
        }
        for (angles, &q) in gates.step.iter().zip(qubits) {
            u3_line(&mut out, angles, q);
        }
        if let [control, target] = qubits {
            writeln!(out, "cx q[{control}],q[{target}];").unwrap();
        }
    }
    for (angles, &q) in gates.measurement.iter().zip(qubits) {
        u3_line(&mut out, angles, q);
    }
    for (k, q) in qubits.iter().enumerate() {
        writeln!(out, "measure q[{q}] -> c{k}[0];").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeroth_program_has_no_step() {
        let suite = emit_single_qubit_suite(Seed(1), 3).unwrap();
        let p0 = &suite.programs()[0];
        assert_eq!(p0.matches("u3(").count(), 2);
        assert_eq!(p0.matches("barrier").count(), 0);
        assert!(p0.contains("measure q[0] -> c0[0];"));
    }

    #[test]
    fn sizes() {
        let s = emit_single_qubit_suite(Seed(2), 10).unwrap();
        assert_eq!(s.programs().len(), 19);
        assert_eq!(s.programs()[18].matches("u3(").count(), 20);
        let s = emit_two_qubit_suite(Seed(2), 20, 0, 1).unwrap();
        assert_eq!(s.programs().len(), 39);
        assert_eq!(s.programs()[1].matches("cx ").count(), 1);
    }

    #[test]
    fn invalid_arguments() {
        assert!(emit_single_qubit_suite(Seed(0), 1).is_err());
        assert!(emit_two_qubit_suite(Seed(0), 5, 3, 3).is_err());
    }

    #[test]
    fn register_width_follows_highest_index() {
        let s = emit_two_qubit_suite(Seed(4), 2, 3, 1).unwrap();
        let p = &s.programs()[2];
        assert!(p.contains("qreg q[4];"));
        assert!(p.contains("cx q[3],q[1];"));
        assert!(p.contains("barrier q[3],q[1];"));
        assert!(p.contains("measure q[1] -> c1[0];"));
    }
}
