use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};
use crate::sequence::Sequence;

/// Synthetic sequence tasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Next value of a sampled sine wave.
    Sine,
    /// Reproduce the ±1 input from `delay` steps earlier.
    DelayedEcho,
    /// Next value of a clamped Gaussian random walk.
    RandomWalk,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Sine => "sine",
            Task::DelayedEcho => "delayed_echo",
            Task::RandomWalk => "random_walk",
        }
    }

    /// Whether accuracy is a fraction of correct signs rather than `1 − normalized MSE`.
    pub fn is_classification(self) -> bool {
        self == Task::DelayedEcho
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" => Ok(Task::Sine),
            "delayed_echo" => Ok(Task::DelayedEcho),
            "random_walk" => Ok(Task::RandomWalk),
            other => Err(Error::InvalidConfig(format!("unknown task {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetSize {
    pub n_sequences: usize,
    pub length: usize,
    /// Echo delay (delayed_echo only).
    pub delay: usize,
    /// Samples per period (sine only).
    pub period: usize,
}

impl Default for DatasetSize {
    fn default() -> Self {
        Self {
            n_sequences: 20,
            length: 16,
            delay: 2,
            period: 32,
        }
    }
}

impl DatasetSize {
    pub fn validate(&self, task: Task) -> Result<()> {
        if self.n_sequences < 2 {
            return Err(Error::InvalidConfig(
                "need at least two sequences for a train/test split".into(),
            ));
        }
        if self.length == 0 {
            return Err(Error::InvalidConfig(
                "sequence length must be positive".into(),
            ));
        }
        match task {
            Task::DelayedEcho if self.delay >= self.length => {
                return Err(Error::InvalidConfig(format!(
                    "delay {} leaves no supervised step in length {}",
                    self.delay, self.length
                )))
            }
            Task::Sine if self.period == 0 => {
                return Err(Error::InvalidConfig("period must be positive".into()))
            }
            _ => {}
        }
        Ok(())
    }
}

/// Sequences split 80/20 by id.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskDataset {
    pub task: Task,
    pub train: Vec<Sequence<f64>>,
    pub test: Vec<Sequence<f64>>,
}

impl TaskDataset {
    pub fn all(&self) -> Vec<Sequence<f64>> {
        self.train.iter().chain(&self.test).cloned().collect()
    }
}

/// Deterministic for a given `(task, seed, size)`.
pub fn generate_dataset(task: Task, seed: u64, size: &DatasetSize) -> Result<TaskDataset> {
    size.validate(task)?;
    let sequences: Vec<Sequence<f64>> = (0..size.n_sequences as u64)
        .map(|id| {
            let mut rng = seeded(derive_seed(seed, &[task as u64, id]));
            let (inputs, targets) = match task {
                Task::Sine => {
                    let phase = rng.random_range(0..size.period);
                    let at = |t: usize| {
                        (2.0 * std::f64::consts::PI * (t + phase) as f64 / size.period as f64).sin()
                    };
                    (0..size.length)
                        .map(|t| (vec![at(t)], vec![at(t + 1)]))
                        .unzip()
                }
                Task::DelayedEcho => {
                    let xs: Vec<f64> = (0..size.length)
                        .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                        .collect();
                    (0..size.length)
                        .map(|t| {
                            let y = if t >= size.delay {
                                xs[t - size.delay]
                            } else {
                                f64::NAN
                            };
                            (vec![xs[t]], vec![y])
                        })
                        .unzip()
                }
                Task::RandomWalk => {
                    let step = Normal::new(0.0, 0.2).expect("finite std");
                    let mut walk = vec![0.0_f64];
                    for _ in 0..size.length {
                        let next =
                            (walk.last().expect("seeded") + step.sample(&mut rng)).clamp(-1.0, 1.0);
                        walk.push(next);
                    }
                    (0..size.length)
                        .map(|t| (vec![walk[t]], vec![walk[t + 1]]))
                        .unzip()
                }
            };
            Sequence {
                id,
                inputs,
                targets,
            }
        })
        .collect();
    let n_train = (size.n_sequences * 4 / 5).clamp(1, size.n_sequences - 1);
    let mut train = sequences;
    let test = train.split_off(n_train);
    Ok(TaskDataset { task, train, test })
}
