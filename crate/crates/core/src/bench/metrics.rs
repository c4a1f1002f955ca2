use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::Sequence;

/// Anything that maps an input sequence to per-step outputs.
pub trait SequenceModel: Sync {
    fn predict(&self, inputs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>>;
}

impl<F> SequenceModel for F
where
    F: Fn(&[Vec<f64>]) -> Result<Vec<Vec<f64>>> + Sync,
{
    fn predict(&self, inputs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        self(inputs)
    }
}

fn supervised_pairs(model: &dyn SequenceModel, data: &[Sequence<f64>]) -> Result<Vec<(f64, f64)>> {
    let mut pairs = Vec::new();
    for seq in data {
        let out = model.predict(&seq.inputs)?;
        if out.len() != seq.targets.len() {
            return Err(Error::LengthMismatch {
                what: "prediction steps",
                expected: seq.targets.len(),
                got: out.len(),
            });
        }
        for (p, y) in out.iter().zip(&seq.targets) {
            pairs.extend(
                p.iter()
                    .zip(y)
                    .filter(|(_, y)| y.is_finite())
                    .map(|(p, y)| (*p, *y)),
            );
        }
    }
    if pairs.is_empty() {
        return Err(Error::Empty("supervised targets"));
    }
    Ok(pairs)
}

/// Masked MSE over every supervised target.
pub fn mse(model: &dyn SequenceModel, data: &[Sequence<f64>]) -> Result<f64> {
    let pairs = supervised_pairs(model, data)?;
    Ok(pairs.iter().map(|(p, y)| (p - y).powi(2)).sum::<f64>() / pairs.len() as f64)
}

/// `1 − MSE / Var(y)`, clamped to `[0, 1]`.
pub fn regression_accuracy(model: &dyn SequenceModel, data: &[Sequence<f64>]) -> Result<f64> {
    let pairs = supervised_pairs(model, data)?;
    let n = pairs.len() as f64;
    let mean = pairs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let var = pairs.iter().map(|(_, y)| (y - mean).powi(2)).sum::<f64>() / n;
    let mse = pairs.iter().map(|(p, y)| (p - y).powi(2)).sum::<f64>() / n;
    Ok(if var > 0.0 {
        (1.0 - mse / var).clamp(0.0, 1.0)
    } else if mse == 0.0 {
        1.0
    } else {
        0.0
    })
}

/// Fraction of supervised steps whose prediction has the target's sign
/// (a zero prediction counts as positive).
pub fn sign_accuracy(model: &dyn SequenceModel, data: &[Sequence<f64>]) -> Result<f64> {
    let pairs = supervised_pairs(model, data)?;
    let hits = pairs
        .iter()
        .filter(|(p, y)| (*p >= 0.0) == (*y >= 0.0))
        .count();
    Ok(hits as f64 / pairs.len() as f64)
}

pub const MEMORY_THRESHOLD: f64 = 0.9;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MemoryCapacity {
    /// Longest tested delay reaching [`MEMORY_THRESHOLD`]; 0 when none does.
    pub delay: usize,
    pub delays: Vec<usize>,
    pub accuracies: Vec<f64>,
}

/// Evaluates echo accuracy at each delay via `accuracy_at`.
pub fn memory_capacity<F>(delays: &[usize], mut accuracy_at: F) -> Result<MemoryCapacity>
where
    F: FnMut(usize) -> Result<f64>,
{
    if delays.is_empty() {
        return Err(Error::Empty("memory delays"));
    }
    let accuracies = delays
        .iter()
        .map(|&d| accuracy_at(d))
        .collect::<Result<Vec<_>>>()?;
    let delay = delays
        .iter()
        .zip(&accuracies)
        .filter(|(_, a)| **a >= MEMORY_THRESHOLD)
        .map(|(d, _)| *d)
        .max()
        .unwrap_or(0);
    Ok(MemoryCapacity {
        delay,
        delays: delays.to_vec(),
        accuracies,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalePoint {
    pub hidden_dim: usize,
    pub length: usize,
    /// Deterministic cost of one loss-and-gradient pass.
    pub work: u64,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Scalability {
    /// Slope of `ln(work)` against `ln(hidden_dim · length)`.
    pub work_slope: f64,
    /// Same against wall-clock seconds.
    pub time_slope: f64,
    pub points: Vec<ScalePoint>,
}

impl Scalability {
    pub fn from_points(points: Vec<ScalePoint>) -> Result<Self> {
        let size: Vec<f64> = points
            .iter()
            .map(|p| ((p.hidden_dim * p.length) as f64).ln())
            .collect();
        let work: Vec<f64> = points.iter().map(|p| (p.work.max(1) as f64).ln()).collect();
        let time: Vec<f64> = points.iter().map(|p| p.seconds.max(1e-9).ln()).collect();
        Ok(Self {
            work_slope: log_log_slope(&size, &work)?,
            time_slope: log_log_slope(&size, &time)?,
            points,
        })
    }
}

/// Least-squares slope of `y` on `x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            what: "slope samples",
            expected: x.len(),
            got: y.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidConfig(
            "scalability sweep needs at least two problem sizes".into(),
        ));
    }
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| (a - mx) * (b - my))
        .sum::<f64>()
        / sxx)
}
