use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cell::{map_readout, predict_sequence};
use super::{QlstmConfig, QlstmParams};
use crate::cell::{CellState, GateFamily};
use crate::error::{Error, Result};
use crate::scalar::{tanh, Real};
use crate::sequence::{check_dataset, squared_error, Readout, Sequence};
use crate::variational::{jacobian, jacobian_cost, AnsatzSpec, Jacobian};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QlstmTrainConfig {
    pub learning_rate: f64,
    pub iterations: usize,
}

/// Loss, full gradient and bookkeeping for one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct QlstmGradient<T> {
    pub loss: T,
    pub grad: QlstmParams<T>,
    /// Max-norm of the circuit-parameter gradient contributed at each step
    /// index, summed over sequences.
    pub per_step_max: Vec<T>,
    /// Circuits executed.
    pub evaluations: u64,
}

struct StepCache<T> {
    c_prev: Vec<T>,
    c: Vec<T>,
    h: Vec<T>,
    /// `[family][unit]`
    jac: Vec<Vec<Jacobian<T>>>,
    act: [Vec<T>; 4],
}

fn sequence_pass<T: Real>(
    spec: &AnsatzSpec,
    params: &QlstmParams<T>,
    config: &QlstmConfig,
    seq: &Sequence<T>,
    n_total: usize,
) -> Result<(T, QlstmParams<T>, Vec<Vec<T>>, u64)> {
    let hd = config.hidden_dim;
    let p = spec.n_params();
    let mut state = CellState::zeros(hd);
    let mut caches = Vec::with_capacity(seq.len());
    let mut evaluations = 0;
    for (t, x) in seq.inputs.iter().enumerate() {
        let z: Vec<T> = x.iter().chain(&state.h).copied().collect();
        let jac = GateFamily::ALL
            .iter()
            .map(|&family| {
                let slice = params.family(family);
                (0..hd)
                    .map(|j| {
                        let seed = config.unit_seed(seq.id, t, family, j);
                        jacobian(spec, &slice[j * p..(j + 1) * p], &z, config.shots, seed)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        evaluations += jac.iter().flatten().map(|j| j.evaluations).sum::<u64>();
        let act: [Vec<T>; 4] = std::array::from_fn(|g| {
            jac[g]
                .iter()
                .map(|jj| map_readout(GateFamily::ALL[g], jj.value))
                .collect()
        });
        let [f, i, o, g] = &act;
        let c: Vec<T> = (0..hd).map(|j| f[j] * state.c[j] + i[j] * g[j]).collect();
        let h: Vec<T> = (0..hd).map(|j| o[j] * tanh(c[j])).collect();
        caches.push(StepCache {
            c_prev: state.c.clone(),
            c: c.clone(),
            h: h.clone(),
            jac,
            act,
        });
        state = CellState { c, h };
    }

    let mut grad = QlstmParams {
        forget: vec![T::zero(); hd * p],
        input: vec![T::zero(); hd * p],
        output: vec![T::zero(); hd * p],
        candidate: vec![T::zero(); hd * p],
        readout: Readout::zeros(config.output_dim, hd),
    };
    let mut per_step = vec![vec![T::zero(); 4 * hd * p]; seq.len()];
    let mut sse = T::zero();
    let mut dh_next = vec![T::zero(); hd];
    let mut dc_next = vec![T::zero(); hd];
    let half = T::lit(0.5);
    for (t, step) in caches.iter().enumerate().rev() {
        let (e, dy) = squared_error(&params.readout.apply(&step.h), &seq.targets[t], n_total);
        sse += e;
        let dh_out = params.readout.backward(&step.h, &dy, &mut grad.readout);
        let [f, i, o, g] = &step.act;
        let mut dact = [
            vec![T::zero(); hd],
            vec![T::zero(); hd],
            vec![T::zero(); hd],
            vec![T::zero(); hd],
        ];
        for j in 0..hd {
            let dh = dh_out[j] + dh_next[j];
            let tc = tanh(step.c[j]);
            let dc = dh * o[j] * (T::one() - tc * tc) + dc_next[j];
            dact[0][j] = dc * step.c_prev[j];
            dact[1][j] = dc * g[j];
            dact[2][j] = dh * tc;
            dact[3][j] = dc * i[j];
            dc_next[j] = dc * f[j];
        }
        let mut dz = vec![T::zero(); config.wires()];
        for (gi, family) in GateFamily::ALL.into_iter().enumerate() {
            let target = grad.family_mut(family);
            for j in 0..hd {
                // (v + 1)/2 for the sigmoid-like families
                let dv = if family.is_sigmoid_like() {
                    dact[gi][j] * half
                } else {
                    dact[gi][j]
                };
                let jac = &step.jac[gi][j];
                let offset = gi * hd * p + j * p;
                for (k, d) in jac.d_params.iter().enumerate() {
                    let contrib = dv * *d;
                    target[j * p + k] += contrib;
                    per_step[t][offset + k] += contrib;
                }
                for (acc, d) in dz.iter_mut().zip(&jac.d_input) {
                    *acc += dv * *d;
                }
            }
        }
        dh_next.copy_from_slice(&dz[config.input_dim..]);
    }
    Ok((sse, grad, per_step, evaluations))
}

/// Masked MSE of the readout and its gradient: shift-rule Jacobians of every
/// gate circuit at every step, chained backwards through `c_t`, `h_t`.
pub fn loss_and_gradient<T: Real>(
    params: &QlstmParams<T>,
    config: &QlstmConfig,
    data: &[Sequence<T>],
) -> Result<QlstmGradient<T>> {
    params.check(config)?;
    let spec = config.gate_spec()?;
    let n_total = check_dataset(data, config.input_dim, config.output_dim)?;
    let parts = data
        .par_iter()
        .map(|s| sequence_pass(&spec, params, config, s, n_total))
        .collect::<Result<Vec<_>>>()?;
    let mut grad = QlstmParams::zeros(config)?;
    let mut sse = T::zero();
    let mut evaluations = 0;
    let longest = data.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut step_sums = vec![vec![T::zero(); 4 * config.hidden_dim * spec.n_params()]; longest];
    for (s, g, per_step, n) in parts {
        sse += s;
        evaluations += n;
        for (acc, v) in grad.values_mut().into_iter().zip(g.values()) {
            *acc += v;
        }
        for (acc, step) in step_sums.iter_mut().zip(per_step) {
            for (a, v) in acc.iter_mut().zip(step) {
                *a += v;
            }
        }
    }
    let per_step_max = step_sums
        .iter()
        .map(|v| v.iter().fold(T::zero(), |m, x| m.max(x.abs())))
        .collect();
    Ok(QlstmGradient {
        loss: sse / T::lit(n_total as f64),
        grad,
        per_step_max,
        evaluations,
    })
}

/// Masked MSE of the readout over the dataset.
pub fn loss<T: Real>(
    params: &QlstmParams<T>,
    config: &QlstmConfig,
    data: &[Sequence<T>],
) -> Result<T> {
    params.check(config)?;
    let n_total = check_dataset(data, config.input_dim, config.output_dim)?;
    let sse = data
        .par_iter()
        .map(|s| {
            let out = predict_sequence(&s.inputs, params, config, s.id)?;
            Ok(out
                .iter()
                .zip(&s.targets)
                .map(|(p, y)| squared_error(p, y, n_total).0)
                .sum::<T>())
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(sse.into_iter().sum::<T>() / T::lit(n_total as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedQlstm<T> {
    pub params: QlstmParams<T>,
    /// Loss before each update; the last entry is the loss of `params`.
    pub loss_history: Vec<f64>,
    /// Circuits executed during training.
    pub evaluations: u64,
}

/// Gradient descent from [`QlstmParams::init`].
pub fn train_sequence<T: Real>(
    data: &[Sequence<T>],
    config: &QlstmConfig,
    train: &QlstmTrainConfig,
) -> Result<TrainedQlstm<T>> {
    train_from(QlstmParams::init(config)?, data, config, train)
}

pub fn train_from<T: Real>(
    mut params: QlstmParams<T>,
    data: &[Sequence<T>],
    config: &QlstmConfig,
    train: &QlstmTrainConfig,
) -> Result<TrainedQlstm<T>> {
    if !(train.learning_rate > 0.0 && train.learning_rate.is_finite()) {
        return Err(Error::InvalidConfig(
            "learning_rate must be positive".into(),
        ));
    }
    let lr = T::lit(train.learning_rate);
    let mut history = Vec::with_capacity(train.iterations + 1);
    let mut evaluations = 0;
    for iteration in 0..=train.iterations {
        let g = loss_and_gradient(&params, config, data)?;
        evaluations += g.evaluations;
        let l = g.loss.to_f64_lossy();
        if !l.is_finite() {
            return Err(Error::Diverged { iteration, cost: l });
        }
        history.push(l);
        if iteration == train.iterations {
            break;
        }
        for (p, d) in params.values_mut().into_iter().zip(g.grad.values()) {
            *p -= lr * d;
        }
    }
    Ok(TrainedQlstm {
        params,
        loss_history: history,
        evaluations,
    })
}

/// Circuits one [`loss_and_gradient`] call runs on `data`.
pub fn gradient_evaluations(config: &QlstmConfig, steps: usize) -> Result<u64> {
    Ok(4 * config.hidden_dim as u64 * steps as u64 * jacobian_cost(&config.gate_spec()?))
}

/// JSON checkpoint `{config, params, loss_history}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QlstmCheckpoint {
    pub config: QlstmConfig,
    pub params: QlstmParams<f64>,
    pub loss_history: Vec<f64>,
}

impl QlstmCheckpoint {
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        let ck: Self = serde_json::from_reader(r)?;
        ck.params.check(&ck.config)?;
        Ok(ck)
    }
}
