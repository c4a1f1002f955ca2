//! Classical LSTM baseline trained by backpropagation through time.

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cell::{CellState, GateActivations};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};
use crate::scalar::{sigmoid, tanh, Real};
use crate::sequence::{check_dataset, squared_error, Readout, Sequence};

/// Affine map over `concat(x, h)` for one gate family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateWeights<T> {
    /// `hidden_dim x (input_dim + hidden_dim)`
    pub weights: Vec<Vec<T>>,
    pub bias: Vec<T>,
}

impl<T: Real> GateWeights<T> {
    fn zeros(hidden_dim: usize, width: usize) -> Self {
        Self {
            weights: vec![vec![T::zero(); width]; hidden_dim],
            bias: vec![T::zero(); hidden_dim],
        }
    }

    /// `W z + b`
    pub fn preactivation(&self, z: &[T]) -> Vec<T> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(z).fold(*b, |acc, (w, x)| acc + *w * *x))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLstmParams<T> {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub forget: GateWeights<T>,
    pub input: GateWeights<T>,
    pub output: GateWeights<T>,
    pub candidate: GateWeights<T>,
    pub readout: Readout<T>,
}

impl<T: Real> ClassicalLstmParams<T> {
    pub fn zeros(input_dim: usize, hidden_dim: usize, output_dim: usize) -> Self {
        let width = input_dim + hidden_dim;
        Self {
            input_dim,
            hidden_dim,
            forget: GateWeights::zeros(hidden_dim, width),
            input: GateWeights::zeros(hidden_dim, width),
            output: GateWeights::zeros(hidden_dim, width),
            candidate: GateWeights::zeros(hidden_dim, width),
            readout: Readout::zeros(output_dim, hidden_dim),
        }
    }

    /// Every weight (gates and readout) drawn `N(0, 0.1)`; biases zero.
    pub fn gaussian(input_dim: usize, hidden_dim: usize, output_dim: usize, seed: u64) -> Self {
        let mut p = Self::zeros(input_dim, hidden_dim, output_dim);
        let mut rng = seeded(derive_seed(seed, &[0x157]));
        let normal = Normal::new(0.0, 0.1).expect("finite std");
        for gate in [&mut p.forget, &mut p.input, &mut p.output, &mut p.candidate] {
            for w in gate.weights.iter_mut().flatten() {
                *w = T::lit(normal.sample(&mut rng));
            }
        }
        p.readout = Readout::gaussian(output_dim, hidden_dim, 0.1, &mut rng);
        p
    }

    pub fn output_dim(&self) -> usize {
        self.readout.output_dim()
    }

    fn gates(&self) -> [&GateWeights<T>; 4] {
        [&self.forget, &self.input, &self.output, &self.candidate]
    }

    /// All trainable values in a fixed order.
    pub fn values(&self) -> Vec<T> {
        let mut out = Vec::new();
        for g in self.gates() {
            out.extend(g.weights.iter().flatten().copied());
            out.extend(g.bias.iter().copied());
        }
        out.extend(self.readout.values().copied());
        out
    }

    pub fn values_mut(&mut self) -> Vec<&mut T> {
        let mut out: Vec<&mut T> = Vec::new();
        for g in [
            &mut self.forget,
            &mut self.input,
            &mut self.output,
            &mut self.candidate,
        ] {
            out.extend(g.weights.iter_mut().flatten());
            out.extend(g.bias.iter_mut());
        }
        out.extend(self.readout.values_mut());
        out
    }

    fn check_shapes(&self) -> Result<()> {
        let width = self.input_dim + self.hidden_dim;
        for g in self.gates() {
            if g.weights.len() != self.hidden_dim
                || g.bias.len() != self.hidden_dim
                || g.weights.iter().any(|r| r.len() != width)
            {
                return Err(Error::InvalidConfig("gate weight shape mismatch".into()));
            }
        }
        if self
            .readout
            .weights
            .iter()
            .any(|r| r.len() != self.hidden_dim)
        {
            return Err(Error::InvalidConfig("readout shape mismatch".into()));
        }
        Ok(())
    }
}

fn concat<T: Copy>(x: &[T], h: &[T]) -> Vec<T> {
    x.iter().chain(h).copied().collect()
}

/// Classical gate values for one step.
pub fn activations<T: Real>(
    params: &ClassicalLstmParams<T>,
    x: &[T],
    h_prev: &[T],
) -> GateActivations<T> {
    let z = concat(x, h_prev);
    GateActivations {
        f: params
            .forget
            .preactivation(&z)
            .into_iter()
            .map(sigmoid)
            .collect(),
        i: params
            .input
            .preactivation(&z)
            .into_iter()
            .map(sigmoid)
            .collect(),
        o: params
            .output
            .preactivation(&z)
            .into_iter()
            .map(sigmoid)
            .collect(),
        c_tilde: params
            .candidate
            .preactivation(&z)
            .into_iter()
            .map(tanh)
            .collect(),
    }
}

/// One LSTM step: `c = f⊙c_prev + i⊙c̃`, `h = o⊙tanh(c)`.
pub fn cell_step<T: Real>(
    c_prev: &[T],
    h_prev: &[T],
    x: &[T],
    params: &ClassicalLstmParams<T>,
) -> Result<(Vec<T>, Vec<T>, GateActivations<T>)> {
    params.check_shapes()?;
    CellState {
        c: c_prev.to_vec(),
        h: h_prev.to_vec(),
    }
    .check(params.hidden_dim)?;
    if x.len() != params.input_dim {
        return Err(Error::LengthMismatch {
            what: "input dimension",
            expected: params.input_dim,
            got: x.len(),
        });
    }
    let a = activations(params, x, h_prev);
    let c: Vec<T> = (0..params.hidden_dim)
        .map(|j| a.f[j] * c_prev[j] + a.i[j] * a.c_tilde[j])
        .collect();
    let h = (0..params.hidden_dim)
        .map(|j| a.o[j] * tanh(c[j]))
        .collect();
    Ok((c, h, a))
}

/// Runs the cell over `inputs` from the zero state; returns every `h_t` and the final state.
pub fn forward<T: Real>(
    inputs: &[Vec<T>],
    params: &ClassicalLstmParams<T>,
) -> Result<(Vec<Vec<T>>, CellState<T>)> {
    if inputs.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    let mut state = CellState::zeros(params.hidden_dim);
    let mut hs = Vec::with_capacity(inputs.len());
    for x in inputs {
        let (c, h, _) = cell_step(&state.c, &state.h, x, params)?;
        hs.push(h.clone());
        state = CellState { c, h };
    }
    Ok((hs, state))
}

/// Readout outputs for every step.
pub fn predict_sequence<T: Real>(
    inputs: &[Vec<T>],
    params: &ClassicalLstmParams<T>,
) -> Result<Vec<Vec<T>>> {
    let (hs, _) = forward(inputs, params)?;
    Ok(hs.iter().map(|h| params.readout.apply(h)).collect())
}

struct StepCache<T> {
    z: Vec<T>,
    a: GateActivations<T>,
    c_prev: Vec<T>,
    c: Vec<T>,
    h: Vec<T>,
}

/// Masked MSE over the dataset and its gradient by backpropagation through time.
pub fn loss_and_gradient<T: Real>(
    params: &ClassicalLstmParams<T>,
    data: &[Sequence<T>],
) -> Result<(T, ClassicalLstmParams<T>)> {
    params.check_shapes()?;
    let n_total = check_dataset(data, params.input_dim, params.output_dim())?;
    let per_seq = data
        .par_iter()
        .map(|s| sequence_gradient(params, s, n_total))
        .collect::<Result<Vec<_>>>()?;
    let mut grad =
        ClassicalLstmParams::zeros(params.input_dim, params.hidden_dim, params.output_dim());
    let mut sse = T::zero();
    for (s, g) in per_seq {
        sse += s;
        for (acc, v) in grad.values_mut().into_iter().zip(g.values()) {
            *acc += v;
        }
    }
    Ok((sse / T::lit(n_total as f64), grad))
}

/// Masked MSE only.
pub fn loss<T: Real>(params: &ClassicalLstmParams<T>, data: &[Sequence<T>]) -> Result<T> {
    let n_total = check_dataset(data, params.input_dim, params.output_dim())?;
    let sse = data
        .par_iter()
        .map(|s| {
            let out = predict_sequence(&s.inputs, params)?;
            Ok(out
                .iter()
                .zip(&s.targets)
                .map(|(p, y)| squared_error(p, y, n_total).0)
                .sum::<T>())
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(sse.into_iter().sum::<T>() / T::lit(n_total as f64))
}

fn sequence_gradient<T: Real>(
    params: &ClassicalLstmParams<T>,
    seq: &Sequence<T>,
    n_total: usize,
) -> Result<(T, ClassicalLstmParams<T>)> {
    let hd = params.hidden_dim;
    let mut caches = Vec::with_capacity(seq.len());
    let mut state = CellState::zeros(hd);
    for x in &seq.inputs {
        let (c, h, a) = cell_step(&state.c, &state.h, x, params)?;
        caches.push(StepCache {
            z: concat(x, &state.h),
            a,
            c_prev: state.c.clone(),
            c: c.clone(),
            h: h.clone(),
        });
        state = CellState { c, h };
    }
    let mut grad = ClassicalLstmParams::zeros(params.input_dim, hd, params.output_dim());
    let mut sse = T::zero();
    let mut dh_next = vec![T::zero(); hd];
    let mut dc_next = vec![T::zero(); hd];
    for (t, step) in caches.iter().enumerate().rev() {
        let (e, dy) = squared_error(&params.readout.apply(&step.h), &seq.targets[t], n_total);
        sse += e;
        let dh_out = params.readout.backward(&step.h, &dy, &mut grad.readout);
        let a = &step.a;
        let mut dpre = [
            vec![T::zero(); hd],
            vec![T::zero(); hd],
            vec![T::zero(); hd],
            vec![T::zero(); hd],
        ];
        for j in 0..hd {
            let dh = dh_out[j] + dh_next[j];
            let tc = tanh(step.c[j]);
            let d_o = dh * tc;
            let dc = dh * a.o[j] * (T::one() - tc * tc) + dc_next[j];
            let d_f = dc * step.c_prev[j];
            let d_i = dc * a.c_tilde[j];
            let d_g = dc * a.i[j];
            dc_next[j] = dc * a.f[j];
            dpre[0][j] = d_f * a.f[j] * (T::one() - a.f[j]);
            dpre[1][j] = d_i * a.i[j] * (T::one() - a.i[j]);
            dpre[2][j] = d_o * a.o[j] * (T::one() - a.o[j]);
            dpre[3][j] = d_g * (T::one() - a.c_tilde[j] * a.c_tilde[j]);
        }
        let mut dz = vec![T::zero(); step.z.len()];
        let gates = [
            &params.forget,
            &params.input,
            &params.output,
            &params.candidate,
        ];
        let grads = [
            &mut grad.forget,
            &mut grad.input,
            &mut grad.output,
            &mut grad.candidate,
        ];
        for ((w, g), dp) in gates.into_iter().zip(grads).zip(&dpre) {
            for j in 0..hd {
                g.bias[j] += dp[j];
                for (k, zk) in step.z.iter().enumerate() {
                    g.weights[j][k] += dp[j] * *zk;
                    dz[k] += w.weights[j][k] * dp[j];
                }
            }
        }
        dh_next.copy_from_slice(&dz[params.input_dim..]);
    }
    Ok((sse, grad))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLstmConfig {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub output_dim: usize,
    pub learning_rate: f64,
    pub iterations: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedLstm<T> {
    pub params: ClassicalLstmParams<T>,
    /// Loss before each update; the last entry is the loss of `params`.
    pub loss_history: Vec<f64>,
}

pub fn train<T: Real>(
    data: &[Sequence<T>],
    config: &ClassicalLstmConfig,
) -> Result<TrainedLstm<T>> {
    if config.hidden_dim == 0 || config.input_dim == 0 || config.output_dim == 0 {
        return Err(Error::InvalidConfig("dimensions must be at least 1".into()));
    }
    let init = ClassicalLstmParams::gaussian(
        config.input_dim,
        config.hidden_dim,
        config.output_dim,
        config.seed,
    );
    train_from(init, data, config.learning_rate, config.iterations)
}

/// Full-batch gradient descent for `iterations` updates.
pub fn train_from<T: Real>(
    mut params: ClassicalLstmParams<T>,
    data: &[Sequence<T>],
    learning_rate: f64,
    iterations: usize,
) -> Result<TrainedLstm<T>> {
    if !(learning_rate > 0.0 && learning_rate.is_finite()) {
        return Err(Error::InvalidConfig(
            "learning_rate must be positive".into(),
        ));
    }
    let lr = T::lit(learning_rate);
    let mut history = Vec::with_capacity(iterations + 1);
    for iteration in 0..=iterations {
        let (l, grad) = loss_and_gradient(&params, data)?;
        let l = l.to_f64_lossy();
        if !l.is_finite() {
            return Err(Error::Diverged { iteration, cost: l });
        }
        history.push(l);
        if iteration == iterations {
            break;
        }
        for (p, g) in params.values_mut().into_iter().zip(grad.values()) {
            *p -= lr * g;
        }
    }
    Ok(TrainedLstm {
        params,
        loss_history: history,
    })
}
