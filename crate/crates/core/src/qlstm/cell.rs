use rayon::prelude::*;

use super::{QlstmConfig, QlstmParams};
use crate::cell::{CellState, GateActivations, GateFamily};
use crate::error::{Error, Result};
use crate::scalar::{tanh, Real};
use crate::statevector::Circuit;
use crate::variational::{bind, predict, AnsatzSpec, Encoding};

/// The embedding prefix for `x`: a Hadamard on every wire, then `Ry(2·atan(x_j))` on wire `j`.
pub fn embed<T: Real>(x: &[T]) -> Result<Circuit<T>> {
    if x.is_empty() {
        return Err(Error::Empty("embedding input"));
    }
    let spec = AnsatzSpec::hardware_efficient(x.len(), 0, Encoding::PerWire)?;
    bind(&spec, &[], x)
}

/// Source of gate activations for a cell step.
pub trait GateProvider<T: Real> {
    fn activations(&self, x: &[T], h_prev: &[T], t: usize) -> Result<GateActivations<T>>;
}

/// Activations computed by the gate circuits.
pub struct QuantumGates<'a, T> {
    pub config: &'a QlstmConfig,
    pub params: &'a QlstmParams<T>,
    spec: AnsatzSpec,
    /// Separates the shot streams of different sequences.
    pub stream: u64,
}

impl<'a, T: Real> QuantumGates<'a, T> {
    pub fn new(config: &'a QlstmConfig, params: &'a QlstmParams<T>, stream: u64) -> Result<Self> {
        params.check(config)?;
        Ok(Self {
            spec: config.gate_spec()?,
            config,
            params,
            stream,
        })
    }

    fn family(&self, family: GateFamily, x: &[T], h_prev: &[T], t: usize) -> Result<Vec<T>> {
        let z: Vec<T> = x.iter().chain(h_prev).copied().collect();
        let p = self.spec.n_params();
        let slice = self.params.family(family);
        (0..self.config.hidden_dim)
            .into_par_iter()
            .map(|j| {
                let seed = self.config.unit_seed(self.stream, t, family, j);
                let v = predict(
                    &self.spec,
                    &slice[j * p..(j + 1) * p],
                    &z,
                    self.config.shots,
                    seed,
                )?;
                Ok(map_readout(family, v))
            })
            .collect()
    }
}

/// Readout value to activation, clamped into the family's range.
pub(crate) fn map_readout<T: Real>(family: GateFamily, v: T) -> T {
    let v = v.max(-T::one()).min(T::one());
    if family.is_sigmoid_like() {
        (v + T::one()) * T::lit(0.5)
    } else {
        v
    }
}

impl<T: Real> GateProvider<T> for QuantumGates<'_, T> {
    fn activations(&self, x: &[T], h_prev: &[T], t: usize) -> Result<GateActivations<T>> {
        Ok(GateActivations {
            f: self.family(GateFamily::Forget, x, h_prev, t)?,
            i: self.family(GateFamily::Input, x, h_prev, t)?,
            o: self.family(GateFamily::Output, x, h_prev, t)?,
            c_tilde: self.family(GateFamily::Candidate, x, h_prev, t)?,
        })
    }
}

/// Returns the same activations at every step.
pub struct FixedGates<T>(pub GateActivations<T>);

impl<T: Real> GateProvider<T> for FixedGates<T> {
    fn activations(&self, _x: &[T], _h_prev: &[T], _t: usize) -> Result<GateActivations<T>> {
        Ok(self.0.clone())
    }
}

/// Activations of one gate family for every hidden unit.
pub fn gate_activation<T: Real>(
    family: GateFamily,
    h_prev: &[T],
    x_t: &[T],
    params: &QlstmParams<T>,
    config: &QlstmConfig,
    t: usize,
) -> Result<Vec<T>> {
    check_inputs(config, x_t, h_prev)?;
    QuantumGates::new(config, params, 0)?.family(family, x_t, h_prev, t)
}

fn check_inputs<T>(config: &QlstmConfig, x: &[T], h: &[T]) -> Result<()> {
    if x.len() != config.input_dim {
        return Err(Error::LengthMismatch {
            what: "input dimension",
            expected: config.input_dim,
            got: x.len(),
        });
    }
    if h.len() != config.hidden_dim {
        return Err(Error::LengthMismatch {
            what: "hidden state",
            expected: config.hidden_dim,
            got: h.len(),
        });
    }
    Ok(())
}

/// One step with activations from `gates`.
pub fn cell_step_with<T: Real, G: GateProvider<T> + ?Sized>(
    state: &CellState<T>,
    x_t: &[T],
    t: usize,
    gates: &G,
) -> Result<(CellState<T>, GateActivations<T>)> {
    let hidden = state.hidden_dim();
    state.check(hidden)?;
    let a = gates.activations(x_t, &state.h, t)?;
    for v in [&a.f, &a.i, &a.o, &a.c_tilde] {
        if v.len() != hidden {
            return Err(Error::LengthMismatch {
                what: "activation vector",
                expected: hidden,
                got: v.len(),
            });
        }
    }
    let mut c = Vec::with_capacity(hidden);
    let mut h = Vec::with_capacity(hidden);
    for j in 0..hidden {
        let cj = a.f[j] * state.c[j] + a.i[j] * a.c_tilde[j];
        c.push(cj);
        h.push(a.o[j] * tanh(cj));
    }
    Ok((CellState { c, h }, a))
}

/// One step with the gate circuits.
pub fn cell_step<T: Real>(
    state: &CellState<T>,
    x_t: &[T],
    t: usize,
    params: &QlstmParams<T>,
    config: &QlstmConfig,
) -> Result<(CellState<T>, GateActivations<T>)> {
    state.check(config.hidden_dim)?;
    check_inputs(config, x_t, &state.h)?;
    cell_step_with(state, x_t, t, &QuantumGates::new(config, params, 0)?)
}

/// Iterates from `c₀ = h₀ = 0`; returns every `h_t` and the final state.
pub fn forward_with<T: Real, G: GateProvider<T> + ?Sized>(
    sequence: &[Vec<T>],
    hidden_dim: usize,
    gates: &G,
) -> Result<(Vec<Vec<T>>, CellState<T>)> {
    if sequence.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    let mut state = CellState::zeros(hidden_dim);
    let mut hs = Vec::with_capacity(sequence.len());
    for (t, x) in sequence.iter().enumerate() {
        state = cell_step_with(&state, x, t, gates)?.0;
        hs.push(state.h.clone());
    }
    Ok((hs, state))
}

pub fn forward<T: Real>(
    sequence: &[Vec<T>],
    params: &QlstmParams<T>,
    config: &QlstmConfig,
) -> Result<(Vec<Vec<T>>, CellState<T>)> {
    for x in sequence {
        check_inputs(config, x, &vec![T::zero(); config.hidden_dim])?;
    }
    forward_with(
        sequence,
        config.hidden_dim,
        &QuantumGates::new(config, params, 0)?,
    )
}

/// Readout of every `h_t`, using shot stream `stream`.
pub fn predict_sequence<T: Real>(
    sequence: &[Vec<T>],
    params: &QlstmParams<T>,
    config: &QlstmConfig,
    stream: u64,
) -> Result<Vec<Vec<T>>> {
    for x in sequence {
        check_inputs(config, x, &vec![T::zero(); config.hidden_dim])?;
    }
    let (hs, _) = forward_with(
        sequence,
        config.hidden_dim,
        &QuantumGates::new(config, params, stream)?,
    )?;
    Ok(hs.iter().map(|h| params.readout.apply(h)).collect())
}
