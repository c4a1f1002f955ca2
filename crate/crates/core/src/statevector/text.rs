//! Plain-text circuit fixtures.
//!
//! One operation per line, whitespace separated: `GATE [angle] qubits...`.
//! Angles are decimal radians; `#` starts a comment. Controls come before
//! targets (`CNOT 1 0` controls on 1 and flips 0; `CSWAP 2 1 0` swaps 1 and 0
//! under control 2). An optional `QUBITS n` line fixes the register width,
//! otherwise it is one more than the largest index used.
//!
//! ```text
//! H 0
//! RZ 1.5707963 2
//! CNOT 1 0
//! CSWAP 2 1 0
//! QFT 0 1 2
//! ```

use super::circuit::{Circuit, Op};
use super::gate::{standard_gate, GateKind, GateOp};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn parse_circuit<T: Real>(src: &str) -> Result<Circuit<T>> {
    let mut width = None;
    let mut ops = Vec::new();
    let mut max_index = None::<usize>;
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let line_no = lineno + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let mut words = line.split_whitespace();
        let mnemonic = words.next().expect("non-empty line").to_ascii_uppercase();
        let rest: Vec<&str> = words.collect();
        if mnemonic == "QUBITS" {
            let [n] = rest.as_slice() else {
                return Err(err("QUBITS takes one count".into()));
            };
            width = Some(n.parse::<usize>().map_err(|e| err(e.to_string()))?);
            continue;
        }
        let rotation = match mnemonic.as_str() {
            "RX" => Some(GateKind::Rx),
            "RY" => Some(GateKind::Ry),
            "RZ" => Some(GateKind::Rz),
            _ => None,
        };
        let (angle, index_words) = match rotation {
            Some(_) => {
                let (a, r) = rest
                    .split_first()
                    .ok_or_else(|| err(format!("{mnemonic} needs an angle")))?;
                let a: f64 = a.parse().map_err(|_| err(format!("bad angle {a:?}")))?;
                (Some(T::lit(a)), r)
            }
            None => (None, rest.as_slice()),
        };
        let qubits = index_words
            .iter()
            .map(|w| {
                w.parse::<usize>()
                    .map_err(|_| err(format!("bad qubit index {w:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let arity = |n: usize| -> Result<()> {
            if qubits.len() == n {
                Ok(())
            } else {
                Err(err(format!(
                    "{mnemonic} takes {n} qubit(s), got {}",
                    qubits.len()
                )))
            }
        };
        let single = |kind: GateKind| -> Result<Op<T>> {
            arity(1)?;
            Ok(Op::Gate(GateOp::single(
                standard_gate(kind, angle)?,
                qubits[0],
            )))
        };
        let op = (|| -> Result<Op<T>> {
            Ok(match mnemonic.as_str() {
                "H" => single(GateKind::H)?,
                "S" => single(GateKind::S)?,
                "T" => single(GateKind::T)?,
                "X" => single(GateKind::X)?,
                "Z" => single(GateKind::Z)?,
                "RX" | "RY" | "RZ" => single(rotation.expect("rotation mnemonic"))?,
                "CNOT" | "CX" => {
                    arity(2)?;
                    Op::Gate(GateOp::cnot(qubits[0], qubits[1])?)
                }
                "CZ" => {
                    arity(2)?;
                    Op::Gate(GateOp::new(
                        standard_gate(GateKind::Z, None)?,
                        qubits[1],
                        vec![qubits[0]],
                    )?)
                }
                "CCX" | "TOFFOLI" => {
                    arity(3)?;
                    Op::Gate(GateOp::toffoli(qubits[0], qubits[1], qubits[2])?)
                }
                "SWAP" => {
                    arity(2)?;
                    Op::Swap {
                        a: qubits[0],
                        b: qubits[1],
                        controls: vec![],
                    }
                }
                "CSWAP" => {
                    arity(3)?;
                    Op::Swap {
                        a: qubits[1],
                        b: qubits[2],
                        controls: vec![qubits[0]],
                    }
                }
                "QFT" | "IQFT" => {
                    if qubits.is_empty() {
                        return Err(err("QFT needs at least one qubit".into()));
                    }
                    Op::Qft {
                        qubits: qubits.clone(),
                        inverse: mnemonic == "IQFT",
                    }
                }
                other => return Err(err(format!("unknown gate {other:?}"))),
            })
        })()
        .map_err(|e| match e {
            Error::Parse { .. } => e,
            other => err(other.to_string()),
        })?;
        max_index = qubits.iter().copied().chain(max_index).max();
        ops.push((line_no, op));
    }
    let n_qubits = match (width, max_index) {
        (Some(w), _) => w,
        (None, Some(m)) => m + 1,
        (None, None) => {
            return Err(Error::Parse {
                line: 0,
                msg: "no operations".into(),
            })
        }
    };
    let mut circuit = Circuit::new(n_qubits);
    for (line, op) in ops {
        circuit.push(op).map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
    }
    Ok(circuit)
}
