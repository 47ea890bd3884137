//! OpenQASM 3 export of an iteration schedule, and a parser for the subset we
//! emit so exported programs can be replayed on the simulator.
//!
//! Each iteration `G(β, γ)` is lowered as:
//!
//! * oracle `R(γ)`: `x` on the zero bits of the target, `ctrl(n-1) @ p(-γ)`, undo the `x`s;
//! * diffusion `D(β)`: `h` and `x` on every qubit, `ctrl(n-1) @ p(-β)`, undo both layers.
//!
//! Both are exact (no global phase): `X^{⊗n} MCP(-β) X^{⊗n}` puts `e^{-iβ}` on
//! `|0…0⟩`, and conjugating by `H^{⊗n}` moves that onto `|s₀⟩`.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::generators::ParameterSequence;
use crate::statevector::{OracleSpec, StateVector};

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    /// Phase `e^{iα}` on the all-ones component of `qubits`; the last qubit is
    /// the nominal target, the rest are controls.
    Phase {
        qubits: Vec<usize>,
        alpha: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n: u32,
    pub gates: Vec<Gate>,
    pub measure: bool,
}

impl Circuit {
    pub fn new(n: u32) -> Self {
        Self {
            n,
            gates: Vec::new(),
            measure: false,
        }
    }

    fn all(&self) -> impl Iterator<Item = usize> {
        0..self.n as usize
    }

    fn full_phase(&mut self, alpha: f64) {
        let qubits = self.all().collect();
        self.gates.push(Gate::Phase { qubits, alpha });
    }

    /// Appends `R(γ)` for a single target index.
    pub fn push_oracle(&mut self, target: u64, gamma: f64) {
        let zeros: Vec<usize> = self
            .all()
            .filter(|&q| (target >> (self.n as usize - 1 - q)) & 1 == 0)
            .collect();
        self.gates.extend(zeros.iter().map(|&q| Gate::X(q)));
        self.full_phase(-gamma);
        self.gates.extend(zeros.iter().map(|&q| Gate::X(q)));
    }

    /// Appends `D(β)`.
    pub fn push_diffusion(&mut self, beta: f64) {
        let qs: Vec<usize> = self.all().collect();
        self.gates.extend(qs.iter().map(|&q| Gate::H(q)));
        self.gates.extend(qs.iter().map(|&q| Gate::X(q)));
        self.full_phase(-beta);
        self.gates.extend(qs.iter().map(|&q| Gate::X(q)));
        self.gates.extend(qs.iter().map(|&q| Gate::H(q)));
    }

    /// Runs the gate list on `state` (measurement is ignored).
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        if state.n() != self.n {
            return Err(Error::DimensionMismatch {
                state: state.n(),
                oracle: self.n,
            });
        }
        for g in &self.gates {
            match g {
                Gate::H(q) => state.apply_h(*q)?,
                Gate::X(q) => state.apply_x(*q)?,
                Gate::Phase { qubits, alpha } => state.apply_controlled_phase(qubits, *alpha)?,
            }
        }
        Ok(())
    }

    /// Runs the program from `|0…0⟩`.
    pub fn simulate(&self) -> Result<StateVector> {
        let mut s = StateVector::zero(self.n)?;
        self.apply(&mut s)?;
        Ok(s)
    }

    pub fn to_qasm(&self) -> String {
        let mut out = String::new();
        out.push_str("OPENQASM 3.0;\n");
        out.push_str("include \"stdgates.inc\";\n");
        let _ = writeln!(out, "qubit[{}] q;", self.n);
        if self.measure {
            let _ = writeln!(out, "bit[{}] c;", self.n);
        }
        for g in &self.gates {
            match g {
                Gate::H(q) => {
                    let _ = writeln!(out, "h q[{q}];");
                }
                Gate::X(q) => {
                    let _ = writeln!(out, "x q[{q}];");
                }
                Gate::Phase { qubits, alpha } => {
                    let args: Vec<String> = qubits.iter().map(|q| format!("q[{q}]")).collect();
                    if qubits.len() > 1 {
                        let _ = write!(out, "ctrl({}) @ ", qubits.len() - 1);
                    }
                    let _ = writeln!(out, "p({alpha}) {};", args.join(", "));
                }
            }
        }
        if self.measure {
            out.push_str("c = measure q;\n");
        }
        out
    }
}

/// Lowers a schedule to a single-target circuit: a Hadamard layer followed by
/// every iteration in order, then a full measurement.
pub fn export_circuit(seq: &ParameterSequence, oracle: &OracleSpec) -> Result<Circuit> {
    if oracle.m() != 1 {
        return Err(Error::Unsupported(format!(
            "circuit export supports a single target, got {}",
            oracle.m()
        )));
    }
    if seq.n != oracle.n() {
        return Err(Error::DimensionMismatch {
            state: seq.n,
            oracle: oracle.n(),
        });
    }
    let target = oracle.targets().next().expect("one target");
    let mut c = Circuit::new(oracle.n());
    for q in 0..oracle.n() as usize {
        c.gates.push(Gate::H(q));
    }
    for p in &seq.params {
        c.push_oracle(target, p.gamma());
        c.push_diffusion(p.beta());
    }
    c.measure = true;
    Ok(c)
}

/// Exports straight to OpenQASM 3 text.
pub fn export_qasm(seq: &ParameterSequence, oracle: &OracleSpec) -> Result<String> {
    Ok(export_circuit(seq, oracle)?.to_qasm())
}

/// Parses the OpenQASM 3 subset produced by [`Circuit::to_qasm`].
pub fn parse_qasm(src: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    let mut saw_header = false;
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: &str| Error::QasmParse {
            line: line_no,
            message: message.to_string(),
        };
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| err("missing ';'"))?
            .trim();
        if !saw_header {
            if stmt != "OPENQASM 3.0" && stmt != "OPENQASM 3" {
                return Err(err("expected OPENQASM 3.0 header"));
            }
            saw_header = true;
            continue;
        }
        if stmt.starts_with("include ") {
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("qubit[") {
            let n: u32 = rest
                .strip_suffix("] q")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err("bad qubit declaration"))?;
            circuit = Some(Circuit::new(n));
            continue;
        }
        let c = circuit
            .as_mut()
            .ok_or_else(|| err("gate before qubit declaration"))?;
        if stmt.starts_with("bit[") {
            continue;
        }
        if stmt == "c = measure q" {
            c.measure = true;
            continue;
        }
        let (controls, body) = match stmt.strip_prefix("ctrl(") {
            Some(rest) => {
                let (k, body) = rest
                    .split_once(") @ ")
                    .ok_or_else(|| err("bad control modifier"))?;
                let k: usize = k.parse().map_err(|_| err("bad control count"))?;
                (k, body.trim())
            }
            None => match stmt.strip_prefix("ctrl @ ") {
                Some(body) => (1, body.trim()),
                None => (0, stmt),
            },
        };
        let (name, args) = body
            .split_once(' ')
            .ok_or_else(|| err("expected gate and operands"))?;
        let qubits = args
            .split(',')
            .map(|a| parse_qubit(a.trim(), c.n))
            .collect::<Option<Vec<usize>>>()
            .ok_or_else(|| err("bad qubit operand"))?;
        if qubits.len() != controls + 1 {
            return Err(err("operand count does not match control count"));
        }
        let gate = match name {
            "h" if controls == 0 => Gate::H(qubits[0]),
            "x" if controls == 0 => Gate::X(qubits[0]),
            _ => {
                let alpha: f64 = name
                    .strip_prefix("p(")
                    .and_then(|v| v.strip_suffix(')'))
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| err("unsupported gate"))?;
                Gate::Phase { qubits, alpha }
            }
        };
        c.gates.push(gate);
    }
    circuit.ok_or_else(|| invalid("program declares no qubits"))
}

fn parse_qubit(s: &str, n: u32) -> Option<usize> {
    let q: usize = s.strip_prefix("q[")?.strip_suffix(']')?.parse().ok()?;
    (q < n as usize).then_some(q)
}
