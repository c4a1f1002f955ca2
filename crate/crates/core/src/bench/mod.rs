//! Benchmark harness: synthetic tasks, experiment runner, metrics and the
//! model comparison table.

mod compare;
mod dataset;
mod experiment;
mod metrics;

pub use compare::{
    compare, metric_values, predicted_reference, write_comparison_csv, ComparisonRow, METRICS,
};
pub use dataset::{generate_dataset, DatasetSize, Task, TaskDataset};
pub use experiment::{
    classical_work, run_experiment, scalability_sweep, task_accuracy, Efficiency, ExperimentConfig,
    FittedModel, MetricsRecord, ModelKind, RunStatus,
};
pub use metrics::{
    log_log_slope, memory_capacity, mse, regression_accuracy, sign_accuracy, MemoryCapacity,
    Scalability, ScalePoint, SequenceModel, MEMORY_THRESHOLD,
};
