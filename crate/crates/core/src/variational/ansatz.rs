use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::statevector::{Circuit, GateKind};

/// How a classical input vector enters the circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// No prefix; the ansatz starts from `|0...0⟩`.
    None,
    /// Hadamard on every wire, then `Ry(2·atan(x_j))` on wire `j`. Arity = wires.
    PerWire,
    /// Hadamard on every wire, then `Ry(2·atan(x_0))` on every wire. Arity = 1.
    Replicated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entangler {
    None,
    /// CNOT(w+1 -> w) from the top wire down, so every wire reaches the
    /// qubit-0 readout.
    Line,
    /// Line plus CNOT(0 -> last) when there are at least three wires.
    Ring,
}

/// One trainable rotation: `kind(params[slot])` on `wire`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rotation {
    pub kind: GateKind,
    pub wire: usize,
    pub slot: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Layer {
    pub rotations: Vec<Rotation>,
    pub entangler: Entangler,
}

/// Layout of a parameterized circuit: encoding prefix, optional QFT mixing,
/// then the variational layers. Readout is ⟨Z⟩ on qubit 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AnsatzSpec {
    n_qubits: usize,
    layers: Vec<Layer>,
    n_params: usize,
    encoding: Encoding,
    qft_mixing: bool,
}

/// Where a rotation angle comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum AngleSource {
    Param(usize),
    /// `2·atan(input[k])`
    Input(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PlanOp {
    H(usize),
    Rot {
        kind: GateKind,
        wire: usize,
        source: AngleSource,
    },
    Cnot(usize, usize),
    Qft,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, layers: Vec<Layer>, encoding: Encoding) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidConfig(
                "ansatz needs at least one wire".into(),
            ));
        }
        let mut used = Vec::<bool>::new();
        for r in layers.iter().flat_map(|l| &l.rotations) {
            if !r.kind.is_rotation() {
                return Err(Error::UnsupportedGate(r.kind.name().into()));
            }
            if r.wire >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: r.wire,
                    n_qubits,
                });
            }
            if used.len() <= r.slot {
                used.resize(r.slot + 1, false);
            }
            used[r.slot] = true;
        }
        if let Some(slot) = used.iter().position(|u| !u) {
            return Err(Error::InvalidConfig(format!(
                "parameter slot {slot} is never used"
            )));
        }
        Ok(Self {
            n_qubits,
            n_params: used.len(),
            layers,
            encoding,
            qft_mixing: false,
        })
    }

    /// `n_layers` layers of `Ry` then `Rz` on every wire followed by a CNOT
    /// line; slots are numbered in gate order.
    pub fn hardware_efficient(
        n_qubits: usize,
        n_layers: usize,
        encoding: Encoding,
    ) -> Result<Self> {
        let mut slot = 0;
        let layers = (0..n_layers)
            .map(|_| {
                let mut rotations = Vec::with_capacity(2 * n_qubits);
                for wire in 0..n_qubits {
                    for kind in [GateKind::Ry, GateKind::Rz] {
                        rotations.push(Rotation { kind, wire, slot });
                        slot += 1;
                    }
                }
                Layer {
                    rotations,
                    entangler: Entangler::Line,
                }
            })
            .collect();
        Self::new(n_qubits, layers, encoding)
    }

    /// Inserts a QFT over all wires between the encoding and the variational layers.
    pub fn with_qft_mixing(mut self, on: bool) -> Self {
        self.qft_mixing = on;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn qft_mixing(&self) -> bool {
        self.qft_mixing
    }

    /// Length of the input vector `bind` expects.
    pub fn input_arity(&self) -> usize {
        match self.encoding {
            Encoding::None => 0,
            Encoding::PerWire => self.n_qubits,
            Encoding::Replicated => 1,
        }
    }

    pub(crate) fn plan(&self) -> Vec<PlanOp> {
        let n = self.n_qubits;
        let mut plan = Vec::new();
        if self.encoding != Encoding::None {
            plan.extend((0..n).map(PlanOp::H));
            plan.extend((0..n).map(|wire| PlanOp::Rot {
                kind: GateKind::Ry,
                wire,
                source: AngleSource::Input(if self.encoding == Encoding::PerWire {
                    wire
                } else {
                    0
                }),
            }));
        }
        if self.qft_mixing {
            plan.push(PlanOp::Qft);
        }
        for layer in &self.layers {
            plan.extend(layer.rotations.iter().map(|r| PlanOp::Rot {
                kind: r.kind,
                wire: r.wire,
                source: AngleSource::Param(r.slot),
            }));
            if layer.entangler != Entangler::None {
                plan.extend(
                    (0..n.saturating_sub(1))
                        .rev()
                        .map(|w| PlanOp::Cnot(w + 1, w)),
                );
            }
            if layer.entangler == Entangler::Ring && n >= 3 {
                plan.push(PlanOp::Cnot(0, n - 1));
            }
        }
        plan
    }

    pub(crate) fn check_lengths<T>(&self, params: &[T], input: &[T]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::LengthMismatch {
                what: "parameter vector",
                expected: self.n_params,
                got: params.len(),
            });
        }
        if input.len() != self.input_arity() {
            return Err(Error::LengthMismatch {
                what: "input vector",
                expected: self.input_arity(),
                got: input.len(),
            });
        }
        Ok(())
    }
}

/// Encoding angle for one input value.
#[inline]
pub fn encoding_angle<T: Real>(x: T) -> T {
    T::lit(2.0) * x.atan()
}

/// Binds parameters and input into a concrete circuit.
pub fn bind<T: Real>(spec: &AnsatzSpec, params: &[T], input: &[T]) -> Result<Circuit<T>> {
    spec.check_lengths(params, input)?;
    build(spec, &spec.plan(), params, input, None)
}

/// `shift = Some((k, delta))` adds `delta` to the angle of the k-th rotation in the plan.
pub(crate) fn build<T: Real>(
    spec: &AnsatzSpec,
    plan: &[PlanOp],
    params: &[T],
    input: &[T],
    shift: Option<(usize, T)>,
) -> Result<Circuit<T>> {
    if input.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("circuit input"));
    }
    let mut circuit = Circuit::new(spec.n_qubits);
    for (k, op) in plan.iter().enumerate() {
        match *op {
            PlanOp::H(w) => {
                circuit.gate(GateKind::H, None, w)?;
            }
            PlanOp::Rot { kind, wire, source } => {
                let mut angle = match source {
                    AngleSource::Param(s) => params[s],
                    AngleSource::Input(i) => encoding_angle(input[i]),
                };
                if let Some((at, delta)) = shift {
                    if at == k {
                        angle += delta;
                    }
                }
                circuit.gate(kind, Some(angle), wire)?;
            }
            PlanOp::Cnot(c, t) => {
                circuit.cnot(c, t)?;
            }
            PlanOp::Qft => {
                circuit.push(crate::statevector::Op::Qft {
                    qubits: (0..spec.n_qubits).collect(),
                    inverse: false,
                })?;
            }
        }
    }
    Ok(circuit)
}
