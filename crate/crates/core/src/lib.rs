//! Exact statevector simulation, variational circuits, and a hybrid
//! quantum-classical LSTM built on them.
//!
//! The numeric modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix double precision, which all documented tolerances assume.

pub mod bench;
pub mod cell;
pub mod error;
pub mod lstm;
pub mod qlstm;
pub mod qpca;
pub mod rng;
pub mod scalar;
pub mod sequence;
pub mod statevector;
pub mod variational;

pub use error::{Error, Result};
pub use scalar::Real;

pub type QuantumState = statevector::QuantumState<f64>;
pub type Circuit = statevector::Circuit<f64>;
pub type Unitary2 = statevector::Unitary2<f64>;
pub type GateOp = statevector::GateOp<f64>;
