use std::io::Write;

use serde::Serialize;

use super::experiment::{MetricsRecord, ModelKind};
use crate::error::{Error, Result};

pub const METRICS: [&str; 4] = [
    "accuracy",
    "computational_efficiency",
    "memory_capacity",
    "scalability",
];

/// Published forecast values for each model, in [`METRICS`] order. They are
/// reproduced as a labelled reference column and never checked against
/// measurements.
pub fn predicted_reference(model: ModelKind) -> [f64; 4] {
    match model {
        ModelKind::Qlstm => [0.9, 0.7, 0.95, 0.8],
        ModelKind::ClassicalLstm => [0.8, 0.85, 0.9, 0.6],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub model: String,
    pub metric: String,
    pub value: f64,
    pub paper_predicted: f64,
}

/// The measured scalar reported for each metric: accuracy, circuit
/// evaluations, capacity delay and the deterministic work slope. Wall-clock
/// figures stay in the JSON records only.
pub fn metric_values(record: &MetricsRecord) -> [f64; 4] {
    [
        record.accuracy,
        record.computational_efficiency.circuit_evaluations as f64,
        record.memory_capacity.delay as f64,
        record.scalability.work_slope,
    ]
}

/// One row per record and metric. All records must share a task.
pub fn compare(records: &[MetricsRecord]) -> Result<Vec<ComparisonRow>> {
    if records.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "compare needs at least two records, got {}",
            records.len()
        )));
    }
    let task = records[0].task;
    if let Some(other) = records.iter().find(|r| r.task != task) {
        return Err(Error::TaskMismatch(
            task.to_string(),
            other.task.to_string(),
        ));
    }
    Ok(records
        .iter()
        .flat_map(|r| {
            let reference = predicted_reference(r.model);
            let values = metric_values(r);
            (0..4).map(move |k| ComparisonRow {
                model: r.model.to_string(),
                metric: METRICS[k].to_string(),
                value: values[k],
                paper_predicted: reference[k],
            })
        })
        .collect())
}

/// CSV with header `model,metric,value,paper_predicted`.
pub fn write_comparison_csv<W: Write>(writer: W, rows: &[ComparisonRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
