//! Reader for the openQASM 2.0 subset written by [`super::suite`].

use crate::error::{Error, Result};

use super::gates::U3Angles;

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    U3 { qubit: usize, angles: U3Angles },
    Cx { control: usize, target: usize },
    Barrier(Vec<usize>),
    Measure { qubit: usize, clbit: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub qubits: usize,
    pub clbits: usize,
    pub instructions: Vec<Instruction>,
}

impl Program {
    /// Number of `cx` gates.
    pub fn cx_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Cx { .. }))
            .count()
    }

    pub fn barrier_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Barrier(_)))
            .count()
    }

    /// Qubits in classical-bit order.
    pub fn measured_qubits(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.clbits];
        for inst in &self.instructions {
            if let Instruction::Measure { qubit, clbit } = *inst {
                out[clbit] = qubit;
            }
        }
        out
    }
}

fn err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Qasm(format!("line {line}: {msg}"))
}

fn qubit_ref(s: &str, width: usize, line: usize) -> Result<usize> {
    let inner = s
        .trim()
        .strip_prefix("q[")
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| err(line, format!("expected q[i], found `{s}`")))?;
    let index: usize = inner.parse().map_err(|_| err(line, format!("bad index `{inner}`")))?;
    if index >= width {
        return Err(err(line, format!("qubit {index} outside qreg q[{width}]")));
    }
    Ok(index)
}

pub fn parse_program(source: &str) -> Result<Program> {
    let mut qubits = None;
    let mut clbits = 0;
    let mut instructions = Vec::new();
    let mut header = false;
    for (k, raw) in source.lines().enumerate() {
        let line = k + 1;
        let text = raw.split("//").next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let stmt = text
            .strip_suffix(';')
            .ok_or_else(|| err(line, "missing `;`"))?
            .trim();
        if !header {
            if stmt != "OPENQASM 2.0" {
                return Err(err(line, "expected `OPENQASM 2.0;`"));
            }
            header = true;
            continue;
        }
        if stmt == "include \"qelib1.inc\"" {
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("qreg ") {
            let width = rest
                .strip_prefix("q[")
                .and_then(|r| r.strip_suffix(']'))
                .and_then(|r| r.parse::<usize>().ok())
                .ok_or_else(|| err(line, format!("bad qreg `{rest}`")))?;
            if qubits.replace(width).is_some() {
                return Err(err(line, "second qreg"));
            }
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("creg ") {
            if rest != format!("c{clbits}[1]") {
                return Err(err(line, format!("expected creg c{clbits}[1], found `{rest}`")));
            }
            clbits += 1;
            continue;
        }
        let width = qubits.ok_or_else(|| err(line, "gate before qreg"))?;
        let inst = if let Some(rest) = stmt.strip_prefix("u3(") {
            let (params, target) = rest
                .split_once(')')
                .ok_or_else(|| err(line, "unclosed u3 parameters"))?;
            let values = params
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| err(line, e))?;
            let [theta, phi, lambda] = values[..] else {
                return Err(err(line, "u3 takes three parameters"));
            };
            Instruction::U3 {
                qubit: qubit_ref(target, width, line)?,
                angles: U3Angles::new(theta, phi, lambda),
            }
        } else if let Some(rest) = stmt.strip_prefix("cx ") {
            let (a, b) = rest
                .split_once(',')
                .ok_or_else(|| err(line, "cx takes two qubits"))?;
            let (control, target) = (qubit_ref(a, width, line)?, qubit_ref(b, width, line)?);
            if control == target {
                return Err(err(line, "cx on a single qubit"));
            }
            Instruction::Cx { control, target }
        } else if let Some(rest) = stmt.strip_prefix("barrier ") {
            Instruction::Barrier(
                rest.split(',')
                    .map(|q| qubit_ref(q, width, line))
                    .collect::<Result<_>>()?,
            )
        } else if let Some(rest) = stmt.strip_prefix("measure ") {
            let (q, c) = rest
                .split_once("->")
                .ok_or_else(|| err(line, "measure needs `->`"))?;
            let c = c.trim();
            let clbit = c
                .strip_prefix('c')
                .and_then(|r| r.strip_suffix("[0]"))
                .and_then(|r| r.parse::<usize>().ok())
                .filter(|&b| b < clbits)
                .ok_or_else(|| err(line, format!("unknown classical bit `{c}`")))?;
            Instruction::Measure {
                qubit: qubit_ref(q, width, line)?,
                clbit,
            }
        } else {
            return Err(err(line, format!("unsupported statement `{stmt}`")));
        };
        instructions.push(inst);
    }
    if !header {
        return Err(Error::Qasm("empty program".into()));
    }
    let qubits = qubits.ok_or_else(|| Error::Qasm("no qreg".into()))?;
    let program = Program {
        qubits,
        clbits,
        instructions,
    };
    let measured = program.measured_qubits();
    if measured.contains(&usize::MAX) {
        return Err(Error::Qasm("classical bit never written".into()));
    }
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_program() {
        let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c0[1];\ncreg c1[1];\n\
                   u3(0.5,-1,2) q[1];\ncx q[1],q[0];\nbarrier q[1],q[0];\n\
                   measure q[1] -> c0[0];\nmeasure q[0] -> c1[0];\n";
        let p = parse_program(src).unwrap();
        assert_eq!(p.qubits, 2);
        assert_eq!(p.cx_count(), 1);
        assert_eq!(p.barrier_count(), 1);
        assert_eq!(p.measured_qubits(), vec![1, 0]);
    }

    #[test]
    fn rejects_unknown_gate() {
        let src = "OPENQASM 2.0;\nqreg q[1];\ncreg c0[1];\nh q[0];\n";
        assert!(parse_program(src).is_err());
    }

    #[test]
    fn rejects_out_of_range_qubit() {
        let src = "OPENQASM 2.0;\nqreg q[1];\ncreg c0[1];\nmeasure q[1] -> c0[0];\n";
        assert!(parse_program(src).is_err());
    }
}
