//! Simulated devices that run parsed suite programs and report counts.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, ONE, ZERO};
use crate::quantum::haar_unitary;
use crate::rng::Seed;

use super::counts::{CountsRecord, OutcomeMap};
use super::parse::{Instruction, Program};

const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeviceModel {
    /// Noiseless qubits.
    Ideal,
    /// A single qubit that is really a three-level system: every `u3` gate
    /// `G` acts as `(G ⊕ 1) L`, with `L` a fixed Haar unitary drawn from
    /// `coupling_seed`. Readout reports `0` for level 0 and `1` otherwise.
    LeakyQutrit { coupling_seed: u64 },
}

fn measured_tail(program: &Program) -> Result<()> {
    let mut measured = vec![false; program.qubits];
    for inst in &program.instructions {
        let touched: Vec<usize> = match inst {
            Instruction::U3 { qubit, .. } => vec![*qubit],
            Instruction::Cx { control, target } => vec![*control, *target],
            Instruction::Barrier(_) => Vec::new(),
            Instruction::Measure { qubit, .. } => {
                measured[*qubit] = true;
                continue;
            }
        };
        if touched.iter().any(|&q| measured[q]) {
            return Err(Error::Qasm("gate after measurement".into()));
        }
    }
    Ok(())
}

fn apply_local(state: &mut CVector, gate: &CMatrix, qubit: usize, width: usize) {
    let stride = 1usize << (width - 1 - qubit);
    for base in 0..state.len() {
        if base & stride != 0 {
            continue;
        }
        let (a, b) = (state[base], state[base | stride]);
        state[base] = gate[(0, 0)] * a + gate[(0, 1)] * b;
        state[base | stride] = gate[(1, 0)] * a + gate[(1, 1)] * b;
    }
}

fn apply_cx(state: &mut CVector, control: usize, target: usize, width: usize) {
    let c = 1usize << (width - 1 - control);
    let t = 1usize << (width - 1 - target);
    for base in 0..state.len() {
        if base & c != 0 && base & t == 0 {
            state.swap_rows(base, base | t);
        }
    }
}

fn qubit_probabilities(program: &Program) -> Result<BTreeMap<String, f64>> {
    let width = program.qubits;
    if width == 0 || width > MAX_QUBITS {
        return Err(Error::Qasm(format!("cannot simulate {width} qubits")));
    }
    let mut state = CVector::from_element(1 << width, ZERO);
    state[0] = ONE;
    for inst in &program.instructions {
        match inst {
            Instruction::U3 { qubit, angles } => {
                apply_local(&mut state, &angles.matrix(), *qubit, width)
            }
            Instruction::Cx { control, target } => apply_cx(&mut state, *control, *target, width),
            Instruction::Barrier(_) | Instruction::Measure { .. } => {}
        }
    }
    let measured = program.measured_qubits();
    let mut out = BTreeMap::new();
    for (k, amp) in state.iter().enumerate() {
        let bits: String = measured
            .iter()
            .map(|&q| if (k >> (width - 1 - q)) & 1 == 1 { '1' } else { '0' })
            .collect();
        *out.entry(bits).or_insert(0.0) += amp.norm_sqr();
    }
    Ok(out)
}

fn qutrit_probabilities(program: &Program, coupling_seed: u64) -> Result<BTreeMap<String, f64>> {
    if program.qubits != 1 || program.clbits != 1 {
        return Err(Error::Qasm(
            "the leaky-qutrit device runs single-qubit programs only".into(),
        ));
    }
    let coupling = haar_unitary(3, &mut Seed(coupling_seed).stream())?;
    let mut state = CVector::from_element(3, ZERO);
    state[0] = ONE;
    for inst in &program.instructions {
        match inst {
            Instruction::U3 { angles, .. } => {
                let g = angles.matrix();
                let mut lifted = CMatrix::identity(3, 3);
                lifted.view_mut((0, 0), (2, 2)).copy_from(&g);
                state = lifted * (&coupling * state);
            }
            Instruction::Cx { .. } => {
                return Err(Error::Qasm("cx on the leaky-qutrit device".into()))
            }
            Instruction::Barrier(_) | Instruction::Measure { .. } => {}
        }
    }
    let ground = state[0].norm_sqr();
    let excited = state[1].norm_sqr() + state[2].norm_sqr();
    Ok(BTreeMap::from([("0".into(), ground), ("1".into(), excited)]))
}

/// Exact outcome distribution of `program` on `device`, keyed by bitstring in
/// classical-bit order. Every bitstring of the right length is present.
pub fn outcome_probabilities(program: &Program, device: &DeviceModel) -> Result<BTreeMap<String, f64>> {
    measured_tail(program)?;
    match device {
        DeviceModel::Ideal => qubit_probabilities(program),
        DeviceModel::LeakyQutrit { coupling_seed } => qutrit_probabilities(program, *coupling_seed),
    }
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> Result<u64> {
    Ok(Binomial::new(n, p.clamp(0.0, 1.0))
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .sample(rng))
}

/// Splits `n` among `probs` (unnormalized) with sequential conditional binomials.
fn multinomial<R: Rng + ?Sized>(n: u64, probs: &[f64], rng: &mut R) -> Result<Vec<u64>> {
    let mut left = n;
    let mut mass: f64 = probs.iter().sum();
    let mut out = Vec::with_capacity(probs.len());
    for (k, &p) in probs.iter().enumerate() {
        let draw = if k + 1 == probs.len() {
            left
        } else if mass > 0.0 {
            binomial(left, p / mass, rng)?
        } else {
            0
        };
        out.push(draw);
        left -= draw;
        mass -= p;
    }
    Ok(out)
}

/// Runs every program for `shots` shots.
///
/// The number of `+1` outcomes under `map` at each `t` is one binomial draw
/// from the stream of `seed`, in order of `t`, exactly as
/// [`crate::dynamics::sample_series`] draws them; the split among bitstrings
/// of equal sign uses a separate derived stream.
pub fn simulate_counts(
    programs: &[Program],
    device: &DeviceModel,
    shots: u64,
    map: &OutcomeMap,
    seed: Seed,
) -> Result<Vec<CountsRecord>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut rng = seed.stream();
    let mut split_rng = seed.derive(1).stream();
    programs
        .iter()
        .enumerate()
        .map(|(t, program)| {
            let probs = outcome_probabilities(program, device)?;
            let mut plus = Vec::new();
            let mut minus = Vec::new();
            for (bits, &p) in &probs {
                if map.sign(bits)? > 0.0 {
                    plus.push((bits, p));
                } else {
                    minus.push((bits, p));
                }
            }
            let p_plus: f64 = plus.iter().map(|(_, p)| p).sum();
            let n_plus = binomial(shots, p_plus, &mut rng)?;
            let mut counts = BTreeMap::new();
            for (group, n) in [(&plus, n_plus), (&minus, shots - n_plus)] {
                let weights: Vec<f64> = group.iter().map(|(_, p)| *p).collect();
                for ((bits, _), k) in group.iter().zip(multinomial(n, &weights, &mut split_rng)?) {
                    counts.insert((*bits).clone(), k);
                }
            }
            Ok(CountsRecord { t, shots, counts })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qasm::parse_program;

    fn program(body: &str, qubits: usize) -> Program {
        let cregs: String = (0..qubits).map(|k| format!("creg c{k}[1];\n")).collect();
        parse_program(&format!("OPENQASM 2.0;\nqreg q[{qubits}];\n{cregs}{body}")).unwrap()
    }

    #[test]
    fn bell_pair_outcomes() {
        let p = program(
            "u3(1.5707963267948966,0,3.141592653589793) q[0];\ncx q[0],q[1];\n\
             measure q[0] -> c0[0];\nmeasure q[1] -> c1[0];\n",
            2,
        );
        let probs = outcome_probabilities(&p, &DeviceModel::Ideal).unwrap();
        assert!((probs["00"] - 0.5).abs() < 1e-15);
        assert!((probs["11"] - 0.5).abs() < 1e-15);
        assert!(probs["01"].abs() < 1e-15 && probs["10"].abs() < 1e-15);
    }

    #[test]
    fn bit_order_follows_classical_register() {
        let p = program(
            "u3(3.141592653589793,0,0) q[1];\nmeasure q[1] -> c0[0];\nmeasure q[0] -> c1[0];\n",
            2,
        );
        let probs = outcome_probabilities(&p, &DeviceModel::Ideal).unwrap();
        assert!((probs["10"] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gate_after_measure_rejected() {
        let p = program("measure q[0] -> c0[0];\nu3(1,0,0) q[0];\n", 1);
        assert!(outcome_probabilities(&p, &DeviceModel::Ideal).is_err());
    }

    #[test]
    fn qutrit_probabilities_sum_to_one() {
        let p = program("u3(1,2,3) q[0];\nu3(0.5,0,1) q[0];\nmeasure q[0] -> c0[0];\n", 1);
        let probs = outcome_probabilities(&p, &DeviceModel::LeakyQutrit { coupling_seed: 9 }).unwrap();
        assert!((probs["0"] + probs["1"] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn counts_sum_to_shots() {
        let p = program(
            "u3(1,2,3) q[0];\nu3(2,1,0) q[1];\ncx q[1],q[0];\nmeasure q[0] -> c0[0];\nmeasure q[1] -> c1[0];\n",
            2,
        );
        let records = simulate_counts(&[p.clone(), p], &DeviceModel::Ideal, 1000, &OutcomeMap::Parity, Seed(3)).unwrap();
        for r in &records {
            assert_eq!(r.validate().unwrap(), 2);
            assert_eq!(r.counts.len(), 4);
        }
    }
}
