use std::io::{Read, Write};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::ansatz::AnsatzSpec;
use super::eval::{cost_mse, gradient, GradientMode, TrainingSample};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};
use crate::scalar::{sigmoid, Real};

/// Training stops once successive costs differ by less than this, or the
/// cost itself drops below it.
pub const STOP_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub gradient_mode: GradientMode,
    /// 0 for exact expectations.
    pub shots: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            max_iters: 500,
            seed: 0,
            gradient_mode: GradientMode::ParameterShift,
            shots: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(
                "learning_rate must be positive".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    #[serde(rename = "params")]
    pub final_params: Vec<f64>,
    pub cost_history: Vec<f64>,
    pub iterations_run: usize,
}

impl TrainReport {
    pub fn final_cost(&self) -> f64 {
        *self.cost_history.last().expect("history is never empty")
    }

    pub fn to_json_writer<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn from_json_reader<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }
}

/// θ₀ ~ U(−π, π), drawn from the config seed.
pub fn initial_params<T: Real>(n_params: usize, seed: u64) -> Vec<T> {
    let mut rng = seeded(derive_seed(seed, &[0x1A17]));
    (0..n_params)
        .map(|_| T::lit(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)))
        .collect()
}

/// Gradient descent from the seeded initial point.
pub fn train<T: Real>(
    spec: &AnsatzSpec,
    data: &[TrainingSample<T>],
    config: &TrainConfig,
) -> Result<TrainReport> {
    train_from(
        spec,
        data,
        config,
        initial_params(spec.n_params(), config.seed),
    )
}

/// Gradient descent `θ ← θ − lr·∇MSE` from an explicit starting point.
pub fn train_from<T: Real>(
    spec: &AnsatzSpec,
    data: &[TrainingSample<T>],
    config: &TrainConfig,
    mut params: Vec<T>,
) -> Result<TrainReport> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let lr = T::lit(config.learning_rate);
    let mut history: Vec<f64> = Vec::new();
    for iteration in 0..config.max_iters {
        let seed = derive_seed(config.seed, &[iteration as u64]);
        let cost =
            cost_mse(spec, &params, data, config.shots, derive_seed(seed, &[0]))?.to_f64_lossy();
        if !cost.is_finite() {
            return Err(Error::Diverged { iteration, cost });
        }
        let converged = cost < STOP_TOLERANCE
            || history
                .last()
                .is_some_and(|prev| (prev - cost).abs() < STOP_TOLERANCE);
        history.push(cost);
        if converged || iteration + 1 == config.max_iters {
            break;
        }
        let grad = gradient(
            spec,
            &params,
            data,
            config.gradient_mode,
            config.shots,
            derive_seed(seed, &[1]),
        )?;
        for (p, g) in params.iter_mut().zip(grad) {
            *p -= lr * g;
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Diverged {
                iteration,
                cost: f64::NAN,
            });
        }
    }
    Ok(TrainReport {
        final_params: params.iter().map(|p| p.to_f64_lossy()).collect(),
        iterations_run: history.len(),
        cost_history: history,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind {
    /// `2σ(x) − 1`, which maps σ's `[0, 1]` onto the readout range; recover σ with `(v + 1)/2`.
    SigmoidRescaled,
    Tanh,
}

impl ActivationKind {
    pub fn target<T: Real>(self, x: T) -> T {
        match self {
            ActivationKind::SigmoidRescaled => T::lit(2.0) * sigmoid(x) - T::one(),
            ActivationKind::Tanh => x.tanh(),
        }
    }
}

/// 41 evenly spaced points on `[-2, 2]` with the activation as target.
pub fn activation_dataset<T: Real>(kind: ActivationKind) -> Vec<TrainingSample<T>> {
    (0..41)
        .map(|k| {
            let x = T::lit(-2.0 + 0.1 * k as f64);
            TrainingSample {
                x: vec![x],
                y: kind.target(x),
            }
        })
        .collect()
}

/// Trains `spec` (input arity 1) to reproduce an activation function on the grid.
pub fn fit_activation<T: Real>(
    kind: ActivationKind,
    spec: &AnsatzSpec,
    config: &TrainConfig,
) -> Result<TrainReport> {
    if spec.input_arity() != 1 {
        return Err(Error::LengthMismatch {
            what: "activation-fit input arity",
            expected: 1,
            got: spec.input_arity(),
        });
    }
    train::<T>(spec, &activation_dataset(kind), config)
}

/// Reads `x0,...,xk,y` rows (with header).
pub fn read_samples_csv<R: Read>(reader: R) -> Result<Vec<TrainingSample<f64>>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().last() != Some("y") {
        return Err(Error::Parse {
            line: 1,
            msg: "last column must be `y`".into(),
        });
    }
    let mut out = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let values = record
            .iter()
            .map(|v| {
                v.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: row + 2,
                    msg: format!("{v:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let (y, x) = values.split_last().expect("header guarantees one column");
        out.push(TrainingSample::new(x.to_vec(), *y)?);
    }
    Ok(out)
}

pub fn write_samples_csv<W: Write>(writer: W, data: &[TrainingSample<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let arity = data.first().map_or(0, |s| s.x.len());
    let mut header: Vec<String> = (0..arity).map(|k| format!("x{k}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for s in data {
        let row: Vec<String> = s.x.iter().chain([&s.y]).map(|v| v.to_string()).collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
