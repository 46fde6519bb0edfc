//! A tiny straight-line circuit language over named wires.
//!
//! ```text
//! # d = a·b + c
//! MUL ab a b
//! ADD d ab c
//! ```
//!
//! A wire read before any gate writes it is an input. Blank lines and `#`
//! comments are skipped. Wires are single-assignment.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use super::{he_add, he_mul, mod_switch, BgvCiphertext, BgvParams, Plaintext};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateOp {
    Add,
    Mul,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub op: GateOp,
    pub out: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub gates: Vec<Gate>,
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut gates = Vec::new();
        let mut written = BTreeSet::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            let bad = |why: &str| Error::Parse(format!("circuit line {}: {why}", no + 1));
            let [op, out, lhs, rhs] = words[..] else {
                return Err(bad("expected `OP out lhs rhs`"));
            };
            let op = match op {
                "ADD" => GateOp::Add,
                "MUL" => GateOp::Mul,
                other => return Err(bad(&format!("unknown gate {other}"))),
            };
            if !written.insert(out.to_string()) {
                return Err(bad(&format!("wire {out} assigned twice")));
            }
            if out == lhs || out == rhs {
                return Err(bad("a gate cannot read its own output"));
            }
            gates.push(Gate {
                op,
                out: out.into(),
                lhs: lhs.into(),
                rhs: rhs.into(),
            });
        }
        if gates.is_empty() {
            return Err(Error::Parse("empty circuit".into()));
        }
        Ok(Circuit { gates })
    }
}

impl Circuit {
    /// Wires read before being written, in first-use order.
    pub fn inputs(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut written = BTreeSet::new();
        let mut out = Vec::new();
        for g in &self.gates {
            for w in [&g.lhs, &g.rhs] {
                if !written.contains(w) && seen.insert(w.clone()) {
                    out.push(w.clone());
                }
            }
            written.insert(g.out.clone());
        }
        out
    }

    /// The wire written by the last gate.
    pub fn output(&self) -> &str {
        &self.gates.last().unwrap().out
    }

    fn run<T: Clone>(
        &self,
        inputs: &BTreeMap<String, T>,
        mut gate: impl FnMut(GateOp, &T, &T) -> Result<T>,
    ) -> Result<BTreeMap<String, T>> {
        let mut wires = inputs.clone();
        for g in &self.gates {
            let fetch = |w: &String| {
                wires
                    .get(w)
                    .ok_or_else(|| Error::InvalidParams(format!("wire {w} has no value")))
            };
            let v = gate(g.op, fetch(&g.lhs)?, fetch(&g.rhs)?)?;
            wires.insert(g.out.clone(), v);
        }
        Ok(wires)
    }
}

/// Evaluates over ciphertexts. The lower-level operand of each gate is
/// switched down until both levels agree.
pub fn eval_circuit(
    circuit: &Circuit,
    inputs: &BTreeMap<String, BgvCiphertext>,
    params: &BgvParams,
) -> Result<BTreeMap<String, BgvCiphertext>> {
    circuit.run(inputs, |op, a, b| {
        let (mut a, mut b) = (a.clone(), b.clone());
        while a.level < b.level {
            a = mod_switch(&a, params)?;
        }
        while b.level < a.level {
            b = mod_switch(&b, params)?;
        }
        match op {
            GateOp::Add => he_add(&a, &b, params),
            GateOp::Mul => he_mul(&a, &b, params),
        }
    })
}

/// The same circuit evaluated in the clear.
pub fn eval_circuit_plain(
    circuit: &Circuit,
    inputs: &BTreeMap<String, Plaintext>,
    params: &BgvParams,
) -> Result<BTreeMap<String, Plaintext>> {
    circuit.run(inputs, |op, a, b| {
        Ok(match op {
            GateOp::Add => params.plain_add(a, b),
            GateOp::Mul => params.plain_mul(a, b),
        })
    })
}
