//! Dense statevector simulation.
//!
//! Basis convention used everywhere in the crate: bit `k` of a basis index is
//! the state of qubit `k`, so qubit 0 is the least significant bit. Bitstrings
//! rendered as text are written most significant qubit first, e.g. index 6 on
//! three qubits is `110`.

mod circuit;
mod gate;
mod measure;
mod qft;
mod state;
mod text;

pub use circuit::{Circuit, Op};
pub use gate::{standard_gate, GateKind, GateOp, Unitary2};
pub use measure::{total_variation, MeasurementOutcome};
pub use state::{QuantumState, DEFAULT_QUBIT_CAP};
pub use text::parse_circuit;
