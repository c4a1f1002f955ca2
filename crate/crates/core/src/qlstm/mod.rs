//! Hybrid LSTM whose gates are variational circuits.
//!
//! Each gate family (forget, input, output, candidate) owns one ansatz
//! instance per hidden unit. A unit's circuit sees `concat(x_t, h_{t-1})`
//! through the per-wire `H · Ry(2·atan)` embedding and is read out as ⟨Z⟩ on
//! qubit 0; forget/input/output use `(⟨Z⟩ + 1)/2`, the candidate uses ⟨Z⟩.
//! The cell and hidden vectors are classical and refreshed from those
//! readouts at every step:
//!
//! ```text
//! c_t = f ⊙ c_{t-1} + i ⊙ c̃
//! h_t = o ⊙ tanh(c_t)
//! ```

mod cell;
mod encode;
mod train;

pub use cell::{
    cell_step, cell_step_with, embed, forward, forward_with, gate_activation, predict_sequence,
    FixedGates, GateProvider, QuantumGates,
};
pub use encode::{decode, encode_amplitude};
pub use train::{
    gradient_evaluations, loss, loss_and_gradient, train_from, train_sequence, QlstmCheckpoint,
    QlstmGradient, QlstmTrainConfig, TrainedQlstm,
};

use serde::{Deserialize, Serialize};

use crate::cell::GateFamily;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};
use crate::scalar::Real;
use crate::sequence::Readout;
use crate::statevector::DEFAULT_QUBIT_CAP;
use crate::variational::{initial_params, AnsatzSpec, Encoding};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QlstmConfig {
    pub input_dim: usize,
    pub hidden_dim: usize,
    #[serde(default = "one")]
    pub output_dim: usize,
    pub ansatz_layers: usize,
    /// 0 for exact expectations.
    #[serde(default)]
    pub shots: u64,
    pub seed: u64,
    /// Inserts a QFT over all wires between the embedding and the ansatz.
    #[serde(default)]
    pub qft_mixing: bool,
}

fn one() -> usize {
    1
}

impl QlstmConfig {
    pub fn new(input_dim: usize, hidden_dim: usize, ansatz_layers: usize, seed: u64) -> Self {
        Self {
            input_dim,
            hidden_dim,
            output_dim: 1,
            ansatz_layers,
            shots: 0,
            seed,
            qft_mixing: false,
        }
    }

    pub fn wires(&self) -> usize {
        self.input_dim + self.hidden_dim
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0
            || self.hidden_dim == 0
            || self.output_dim == 0
            || self.ansatz_layers == 0
        {
            return Err(Error::InvalidConfig(
                "qLSTM dimensions and layer count must be at least 1".into(),
            ));
        }
        if self.wires() > DEFAULT_QUBIT_CAP {
            return Err(Error::QubitCapExceeded {
                n_qubits: self.wires(),
                cap: DEFAULT_QUBIT_CAP,
            });
        }
        Ok(())
    }

    /// The ansatz shared by every gate circuit.
    pub fn gate_spec(&self) -> Result<AnsatzSpec> {
        self.validate()?;
        Ok(
            AnsatzSpec::hardware_efficient(self.wires(), self.ansatz_layers, Encoding::PerWire)?
                .with_qft_mixing(self.qft_mixing),
        )
    }

    pub fn params_per_unit(&self) -> Result<usize> {
        Ok(self.gate_spec()?.n_params())
    }

    pub(crate) fn unit_seed(&self, stream: u64, t: usize, family: GateFamily, unit: usize) -> u64 {
        derive_seed(
            self.seed,
            &[stream, t as u64, family.index() as u64, unit as u64],
        )
    }
}

/// Circuit angles for each gate family (unit `j` owns the slice
/// `[j·p, (j+1)·p)` with `p` parameters per unit) and the output readout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QlstmParams<T> {
    pub forget: Vec<T>,
    pub input: Vec<T>,
    pub output: Vec<T>,
    pub candidate: Vec<T>,
    pub readout: Readout<T>,
}

impl<T: Real> QlstmParams<T> {
    /// Angles `U(−π, π)`, readout weights `N(0, 0.1)`, all from the config seed.
    pub fn init(config: &QlstmConfig) -> Result<Self> {
        let n = config.hidden_dim * config.params_per_unit()?;
        let family =
            |f: GateFamily| initial_params(n, derive_seed(config.seed, &[0xA5, f.index() as u64]));
        let mut rng = seeded(derive_seed(config.seed, &[0xB7]));
        Ok(Self {
            forget: family(GateFamily::Forget),
            input: family(GateFamily::Input),
            output: family(GateFamily::Output),
            candidate: family(GateFamily::Candidate),
            readout: Readout::gaussian(config.output_dim, config.hidden_dim, 0.1, &mut rng),
        })
    }

    pub fn zeros(config: &QlstmConfig) -> Result<Self> {
        let n = config.hidden_dim * config.params_per_unit()?;
        Ok(Self {
            forget: vec![T::zero(); n],
            input: vec![T::zero(); n],
            output: vec![T::zero(); n],
            candidate: vec![T::zero(); n],
            readout: Readout::zeros(config.output_dim, config.hidden_dim),
        })
    }

    pub fn family(&self, family: GateFamily) -> &[T] {
        match family {
            GateFamily::Forget => &self.forget,
            GateFamily::Input => &self.input,
            GateFamily::Output => &self.output,
            GateFamily::Candidate => &self.candidate,
        }
    }

    pub fn family_mut(&mut self, family: GateFamily) -> &mut Vec<T> {
        match family {
            GateFamily::Forget => &mut self.forget,
            GateFamily::Input => &mut self.input,
            GateFamily::Output => &mut self.output,
            GateFamily::Candidate => &mut self.candidate,
        }
    }

    pub fn values(&self) -> Vec<T> {
        let mut out: Vec<T> = Vec::new();
        for f in GateFamily::ALL {
            out.extend_from_slice(self.family(f));
        }
        out.extend(self.readout.values().copied());
        out
    }

    pub fn values_mut(&mut self) -> Vec<&mut T> {
        let mut out: Vec<&mut T> = Vec::new();
        out.extend(self.forget.iter_mut());
        out.extend(self.input.iter_mut());
        out.extend(self.output.iter_mut());
        out.extend(self.candidate.iter_mut());
        out.extend(self.readout.values_mut());
        out
    }

    pub(crate) fn check(&self, config: &QlstmConfig) -> Result<()> {
        let n = config.hidden_dim * config.params_per_unit()?;
        for f in GateFamily::ALL {
            if self.family(f).len() != n {
                return Err(Error::LengthMismatch {
                    what: "gate parameter vector",
                    expected: n,
                    got: self.family(f).len(),
                });
            }
        }
        if self.readout.output_dim() != config.output_dim
            || self
                .readout
                .weights
                .iter()
                .any(|r| r.len() != config.hidden_dim)
        {
            return Err(Error::InvalidConfig(
                "readout shape does not match config".into(),
            ));
        }
        Ok(())
    }
}
