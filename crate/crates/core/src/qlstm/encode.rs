use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::statevector::{QuantumState, DEFAULT_QUBIT_CAP};

/// Amplitude encoding: `α_i = x_i / ‖x‖₂`, zero-padded to the next power of
/// two (at least one qubit).
pub fn encode_amplitude<T: Real>(x: &[T]) -> Result<QuantumState<T>> {
    if x.is_empty() {
        return Err(Error::Empty("amplitude vector"));
    }
    let dim = x.len().next_power_of_two().max(2);
    let n_qubits = dim.trailing_zeros() as usize;
    if n_qubits > DEFAULT_QUBIT_CAP {
        return Err(Error::QubitCapExceeded {
            n_qubits,
            cap: DEFAULT_QUBIT_CAP,
        });
    }
    let mut amplitudes: Vec<Complex<T>> = x.iter().map(|v| Complex::new(*v, T::zero())).collect();
    amplitudes.resize(dim, Complex::new(T::zero(), T::zero()));
    QuantumState::normalized(amplitudes)
}

/// Basis-state distribution of `state`: exact when `shots == 0`, otherwise
/// the empirical frequencies of `shots` seeded samples.
pub fn decode<T: Real>(state: &QuantumState<T>, shots: u64, seed: u64) -> Result<Vec<T>> {
    if shots == 0 {
        return Ok(state.probabilities());
    }
    let mut freq = vec![T::zero(); state.dim()];
    for (i, n) in state.sample_counts(shots, seed)? {
        freq[i] = T::lit(n as f64 / shots as f64);
    }
    Ok(freq)
}
