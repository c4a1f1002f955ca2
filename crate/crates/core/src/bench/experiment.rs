use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::dataset::{generate_dataset, DatasetSize, Task};
use super::metrics::{
    memory_capacity, mse, regression_accuracy, sign_accuracy, MemoryCapacity, Scalability,
    ScalePoint, SequenceModel,
};
use crate::error::{Error, Result};
use crate::lstm::{self, ClassicalLstmConfig, ClassicalLstmParams};
use crate::qlstm::{self, QlstmConfig, QlstmParams, QlstmTrainConfig};
use crate::sequence::Sequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Qlstm,
    ClassicalLstm,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Qlstm => "qlstm",
            ModelKind::ClassicalLstm => "classical_lstm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qlstm" => Ok(ModelKind::Qlstm),
            "classical_lstm" => Ok(ModelKind::ClassicalLstm),
            other => Err(Error::InvalidConfig(format!("unknown model {other:?}"))),
        }
    }
}

fn default_hidden() -> usize {
    2
}
fn default_layers() -> usize {
    2
}
fn default_iterations() -> usize {
    200
}
fn default_learning_rate() -> f64 {
    0.25
}
fn default_n_sequences() -> usize {
    10
}
fn default_length() -> usize {
    16
}
fn default_delay() -> usize {
    2
}
fn default_period() -> usize {
    32
}
fn default_memory_delays() -> Vec<usize> {
    vec![1, 2, 3]
}
fn default_sweep_hidden() -> Vec<usize> {
    vec![1, 2, 4]
}
fn default_sweep_lengths() -> Vec<usize> {
    vec![8, 16, 32]
}

/// One benchmark run, read from a TOML `key = value` file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub model: ModelKind,
    pub seed: u64,
    #[serde(default = "default_hidden")]
    pub hidden_dim: usize,
    /// Ansatz layers per gate circuit (qLSTM only).
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default)]
    pub shots: u64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_n_sequences")]
    pub n_sequences: usize,
    #[serde(default = "default_length")]
    pub length: usize,
    /// Echo delay of the main task when it is `delayed_echo`.
    #[serde(default = "default_delay")]
    pub delay: usize,
    #[serde(default = "default_period")]
    pub period: usize,
    /// Delays probed for memory capacity, each with a freshly trained model.
    #[serde(default = "default_memory_delays")]
    pub memory_delays: Vec<usize>,
    #[serde(default = "default_sweep_hidden")]
    pub sweep_hidden: Vec<usize>,
    #[serde(default = "default_sweep_lengths")]
    pub sweep_lengths: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(task: Task, model: ModelKind, seed: u64) -> Self {
        Self {
            task,
            model,
            seed,
            hidden_dim: default_hidden(),
            layers: default_layers(),
            shots: 0,
            iterations: default_iterations(),
            learning_rate: default_learning_rate(),
            n_sequences: default_n_sequences(),
            length: default_length(),
            delay: default_delay(),
            period: default_period(),
            memory_delays: default_memory_delays(),
            sweep_hidden: default_sweep_hidden(),
            sweep_lengths: default_sweep_lengths(),
            output: None,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let config: Self = toml::from_str(s)?;
        config.validate()?;
        Ok(config)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.hidden_dim == 0 || self.layers == 0 {
            return bad("hidden_dim and layers must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self
            .memory_delays
            .iter()
            .any(|&d| d == 0 || d >= self.length)
        {
            return bad("memory delays must lie in 1..length");
        }
        if self.sweep_hidden.contains(&0) || self.sweep_lengths.contains(&0) {
            return bad("sweep sizes must be positive");
        }
        let sizes: std::collections::BTreeSet<usize> = self
            .sweep_hidden
            .iter()
            .flat_map(|h| self.sweep_lengths.iter().map(move |l| h * l))
            .collect();
        if sizes.len() < 2 {
            return bad("scalability sweep needs at least two problem sizes");
        }
        self.size(self.delay).validate(self.task)
    }

    fn size(&self, delay: usize) -> DatasetSize {
        DatasetSize {
            n_sequences: self.n_sequences,
            length: self.length,
            delay,
            period: self.period,
        }
    }

    fn qlstm_config(&self, hidden_dim: usize) -> QlstmConfig {
        QlstmConfig {
            shots: self.shots,
            ..QlstmConfig::new(1, hidden_dim, self.layers, self.seed)
        }
    }
}

/// A trained model of either family.
#[derive(Clone, Debug)]
pub enum FittedModel {
    Quantum {
        config: QlstmConfig,
        params: QlstmParams<f64>,
    },
    Classical(ClassicalLstmParams<f64>),
}

impl SequenceModel for FittedModel {
    fn predict(&self, inputs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        match self {
            // Stream 1 keeps evaluation shots apart from training shots.
            FittedModel::Quantum { config, params } => {
                qlstm::predict_sequence(inputs, params, config, 1)
            }
            FittedModel::Classical(p) => lstm::predict_sequence(inputs, p),
        }
    }
}

struct Fit {
    model: FittedModel,
    loss_history: Vec<f64>,
    circuit_evaluations: u64,
}

fn fit(config: &ExperimentConfig, train: &[Sequence<f64>]) -> Result<Fit> {
    match config.model {
        ModelKind::Qlstm => {
            let qc = config.qlstm_config(config.hidden_dim);
            let t = qlstm::train_sequence(
                train,
                &qc,
                &QlstmTrainConfig {
                    learning_rate: config.learning_rate,
                    iterations: config.iterations,
                },
            )?;
            Ok(Fit {
                model: FittedModel::Quantum {
                    config: qc,
                    params: t.params,
                },
                loss_history: t.loss_history,
                circuit_evaluations: t.evaluations,
            })
        }
        ModelKind::ClassicalLstm => {
            let t = lstm::train(
                train,
                &ClassicalLstmConfig {
                    input_dim: 1,
                    hidden_dim: config.hidden_dim,
                    output_dim: 1,
                    learning_rate: config.learning_rate,
                    iterations: config.iterations,
                    seed: config.seed,
                },
            )?;
            Ok(Fit {
                model: FittedModel::Classical(t.params),
                loss_history: t.loss_history,
                circuit_evaluations: 0,
            })
        }
    }
}

/// Circuits run by one prediction pass of a qLSTM over `data`.
fn prediction_circuits(model: &FittedModel, data: &[Sequence<f64>]) -> u64 {
    match model {
        FittedModel::Quantum { config, .. } => {
            4 * config.hidden_dim as u64 * data.iter().map(|s| s.len() as u64).sum::<u64>()
        }
        FittedModel::Classical(_) => 0,
    }
}

/// Task accuracy: sign agreement for echo, `1 − normalized MSE` otherwise.
pub fn task_accuracy(task: Task, model: &dyn SequenceModel, data: &[Sequence<f64>]) -> Result<f64> {
    if task.is_classification() {
        sign_accuracy(model, data)
    } else {
        regression_accuracy(model, data)
    }
}

/// Gate-weight multiply-adds of one classical forward pass.
pub fn classical_work(input_dim: usize, hidden_dim: usize, length: usize) -> u64 {
    (4 * hidden_dim * (input_dim + hidden_dim + 1) * length) as u64
}

/// Times one loss-and-gradient pass per `(hidden, length)` point on a sine
/// sequence with freshly initialized parameters.
pub fn scalability_sweep(config: &ExperimentConfig) -> Result<Scalability> {
    let mut points = Vec::new();
    for &hidden_dim in &config.sweep_hidden {
        for &length in &config.sweep_lengths {
            let size = DatasetSize {
                n_sequences: 2,
                length,
                ..DatasetSize::default()
            };
            let data = generate_dataset(Task::Sine, config.seed, &size)?;
            let train = &data.train[..1];
            let (work, seconds) = match config.model {
                ModelKind::Qlstm => {
                    let qc = config.qlstm_config(hidden_dim);
                    let params = QlstmParams::init(&qc)?;
                    let start = Instant::now();
                    qlstm::loss_and_gradient(&params, &qc, train)?;
                    (
                        qlstm::gradient_evaluations(&qc, length)?,
                        start.elapsed().as_secs_f64(),
                    )
                }
                ModelKind::ClassicalLstm => {
                    let params = ClassicalLstmParams::gaussian(1, hidden_dim, 1, config.seed);
                    let start = Instant::now();
                    lstm::loss_and_gradient(&params, train)?;
                    (
                        classical_work(1, hidden_dim, length),
                        start.elapsed().as_secs_f64(),
                    )
                }
            };
            points.push(ScalePoint {
                hidden_dim,
                length,
                work,
                seconds,
            });
        }
    }
    Scalability::from_points(points)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    pub wall_seconds: f64,
    /// Exact count over training and test prediction; 0 for classical models.
    pub circuit_evaluations: u64,
    pub gradient_steps: usize,
    /// Worker threads available to the run.
    pub parallelism: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    /// Training produced a non-finite loss; metrics after `stage` are unset.
    Diverged {
        stage: String,
        iteration: usize,
        cost: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub task: Task,
    pub model: ModelKind,
    pub seed: u64,
    pub status: RunStatus,
    pub accuracy: f64,
    pub test_mse: f64,
    pub train_loss_initial: f64,
    pub train_loss_final: f64,
    pub computational_efficiency: Efficiency,
    pub memory_capacity: MemoryCapacity,
    pub scalability: Scalability,
    pub config: ExperimentConfig,
}

impl MetricsRecord {
    pub fn is_completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    /// Copy with every wall-clock field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.computational_efficiency.wall_seconds = 0.0;
        r.scalability.time_slope = 0.0;
        r.scalability
            .points
            .iter_mut()
            .for_each(|p| p.seconds = 0.0);
        r
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }
}

fn diverged(stage: &str, err: Error) -> Result<RunStatus> {
    match err {
        Error::Diverged { iteration, cost } => Ok(RunStatus::Diverged {
            stage: stage.into(),
            iteration,
            cost: cost.is_finite().then_some(cost),
        }),
        other => Err(other),
    }
}

/// Trains on the task's train split, scores the test split, then probes
/// memory capacity and scalability. Divergence yields a record with a
/// `diverged` status instead of an error.
pub fn run_experiment(config: &ExperimentConfig) -> Result<MetricsRecord> {
    config.validate()?;
    let start = Instant::now();
    let mut record = MetricsRecord {
        task: config.task,
        model: config.model,
        seed: config.seed,
        status: RunStatus::Completed,
        accuracy: 0.0,
        test_mse: 0.0,
        train_loss_initial: 0.0,
        train_loss_final: 0.0,
        computational_efficiency: Efficiency {
            parallelism: rayon::current_num_threads(),
            ..Efficiency::default()
        },
        memory_capacity: MemoryCapacity::default(),
        scalability: Scalability::default(),
        config: config.clone(),
    };
    let data = generate_dataset(config.task, config.seed, &config.size(config.delay))?;
    let main = match fit(config, &data.train) {
        Ok(f) => f,
        Err(e) => {
            record.status = diverged("train", e)?;
            record.computational_efficiency.wall_seconds = start.elapsed().as_secs_f64();
            return Ok(record);
        }
    };
    record.accuracy = task_accuracy(config.task, &main.model, &data.test)?;
    record.test_mse = mse(&main.model, &data.test)?;
    record.train_loss_initial = main.loss_history[0];
    record.train_loss_final = *main.loss_history.last().expect("non-empty history");
    record.computational_efficiency.circuit_evaluations =
        main.circuit_evaluations + prediction_circuits(&main.model, &data.test);
    record.computational_efficiency.gradient_steps = main.loss_history.len() - 1;
    record.computational_efficiency.wall_seconds = start.elapsed().as_secs_f64();

    let memory = memory_capacity(&config.memory_delays, |delay| {
        let echo = generate_dataset(Task::DelayedEcho, config.seed, &config.size(delay))?;
        let f = fit(config, &echo.train)?;
        sign_accuracy(&f.model, &echo.test)
    });
    match memory {
        Ok(m) => record.memory_capacity = m,
        Err(e) => {
            record.status = diverged("memory_capacity", e)?;
            return Ok(record);
        }
    }
    record.scalability = scalability_sweep(config)?;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_defaults_and_rejections() {
        let c = ExperimentConfig::from_toml_str(
            "task = \"sine\"\nmodel = \"classical_lstm\"\nseed = 3\n",
        )
        .unwrap();
        assert_eq!(
            c,
            ExperimentConfig::new(Task::Sine, ModelKind::ClassicalLstm, 3)
        );
        // seed is mandatory
        assert!(ExperimentConfig::from_toml_str("task = \"sine\"\nmodel = \"qlstm\"\n").is_err());
        assert!(ExperimentConfig::from_toml_str(
            "task = \"speech\"\nmodel = \"qlstm\"\nseed = 1\n"
        )
        .is_err());
        assert!(ExperimentConfig::from_toml_str(
            "task = \"sine\"\nmodel = \"qlstm\"\nseed = 1\ncolour = 2\n"
        )
        .is_err());
        assert!(ExperimentConfig::from_toml_str(
            "task = \"sine\"\nmodel = \"qlstm\"\nseed = 1\nlearning_rate = -1.0\n"
        )
        .is_err());
    }

    #[test]
    fn work_counts_grow_with_size() {
        assert_eq!(classical_work(1, 2, 8), 4 * 2 * 4 * 8);
        let mut c = ExperimentConfig::new(Task::Sine, ModelKind::ClassicalLstm, 0);
        c.sweep_hidden = vec![1, 2];
        c.sweep_lengths = vec![4, 8];
        let s = scalability_sweep(&c).unwrap();
        assert_eq!(s.points.len(), 4);
        assert!(s.work_slope > 1.0);
    }
}
