use super::gate::{standard_gate, GateKind, GateOp};
use super::state::QuantumState;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub enum Op<T: Real> {
    Gate(GateOp<T>),
    /// Swap of `a` and `b`, conditioned on every control being 1.
    Swap {
        a: usize,
        b: usize,
        controls: Vec<usize>,
    },
    Qft {
        qubits: Vec<usize>,
        inverse: bool,
    },
}

impl<T: Real> Op<T> {
    fn qubits(&self) -> Vec<usize> {
        match self {
            Op::Gate(g) => std::iter::once(g.target)
                .chain(g.controls.iter().copied())
                .collect(),
            Op::Swap { a, b, controls } => [*a, *b]
                .into_iter()
                .chain(controls.iter().copied())
                .collect(),
            Op::Qft { qubits, .. } => qubits.clone(),
        }
    }

    pub fn apply(&self, state: &mut QuantumState<T>) -> Result<()> {
        match self {
            Op::Gate(g) => state.apply_gate(g),
            Op::Swap { a, b, controls } => state.apply_swap(*a, *b, controls),
            Op::Qft { qubits, inverse } => state.apply_qft(qubits, *inverse),
        }
    }
}

/// An ordered list of operations on a fixed-width register.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T: Real> {
    n_qubits: usize,
    ops: Vec<Op<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Op<T>] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: Op<T>) -> Result<&mut Self> {
        let qubits = op.qubits();
        if let Op::Qft { qubits, .. } = &op {
            if qubits.is_empty() {
                return Err(Error::EmptyRegister);
            }
        }
        for (k, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    n_qubits: self.n_qubits,
                });
            }
            if qubits[..k].contains(&q) {
                return Err(Error::QubitCollision(q));
            }
        }
        self.ops.push(op);
        Ok(self)
    }

    pub fn gate(&mut self, kind: GateKind, angle: Option<T>, target: usize) -> Result<&mut Self> {
        let op = GateOp::single(standard_gate(kind, angle)?, target);
        self.push(Op::Gate(op))
    }

    pub fn controlled(
        &mut self,
        kind: GateKind,
        angle: Option<T>,
        controls: Vec<usize>,
        target: usize,
    ) -> Result<&mut Self> {
        let op = GateOp::new(standard_gate(kind, angle)?, target, controls)?;
        self.push(Op::Gate(op))
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push(Op::Gate(GateOp::cnot(control, target)?))
    }

    pub fn apply(&self, state: &mut QuantumState<T>) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch {
                what: "circuit width",
                expected: state.n_qubits(),
                got: self.n_qubits,
            });
        }
        self.ops.iter().try_for_each(|op| op.apply(state))
    }

    /// Runs the circuit on `|0...0⟩`.
    pub fn run(&self) -> Result<QuantumState<T>> {
        let mut state = QuantumState::zero(self.n_qubits)?;
        self.apply(&mut state)?;
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_circuit() {
        let mut c = Circuit::<f64>::new(2);
        c.gate(GateKind::H, None, 1).unwrap().cnot(1, 0).unwrap();
        let s = c.run().unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let re: Vec<f64> = s.amplitudes().iter().map(|a| a.re).collect();
        assert_eq!(re.len(), 4);
        assert!((re[0] - r).abs() < 1e-15 && (re[3] - r).abs() < 1e-15);
        assert_eq!((re[1], re[2]), (0.0, 0.0));
    }

    #[test]
    fn push_validates_indices() {
        let mut c = Circuit::<f64>::new(2);
        assert!(c.gate(GateKind::X, None, 2).is_err());
        assert!(c
            .push(Op::Swap {
                a: 0,
                b: 0,
                controls: vec![]
            })
            .is_err());
        assert!(c
            .push(Op::Qft {
                qubits: vec![],
                inverse: false
            })
            .is_err());
        assert!(c.is_empty());
        let mut wrong = QuantumState::zero(3).unwrap();
        assert!(c.apply(&mut wrong).is_err());
    }
}
