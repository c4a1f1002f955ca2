use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis index {index} out of range for {n_qubits} qubits")]
    BasisIndexOutOfRange { index: usize, n_qubits: usize },
    #[error("{n_qubits} qubits exceeds the configured cap of {cap}")]
    QubitCapExceeded { n_qubits: usize, cap: usize },
    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} used more than once in one operation")]
    QubitCollision(usize),
    #[error("matrix is not unitary (max |U^dagger U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("gate {gate} {detail}")]
    GateAngle {
        gate: &'static str,
        detail: &'static str,
    },
    #[error("empty register")]
    EmptyRegister,
    #[error("shots must be positive")]
    ZeroShots,
    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("cannot normalize an all-zero vector")]
    ZeroVector,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported gate in parameter-shift mode: {0}")]
    UnsupportedGate(String),
    #[error("training diverged at iteration {iteration}: cost is {cost}")]
    Diverged { iteration: usize, cost: f64 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("records describe different tasks: {0} vs {1}")]
    TaskMismatch(String, String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
