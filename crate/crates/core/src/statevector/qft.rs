use num_complex::Complex;

use super::gate::{standard_gate, GateKind};
use super::state::QuantumState;
use crate::error::{Error, Result};
use crate::scalar::Real;

impl<T: Real> QuantumState<T> {
    /// Quantum Fourier transform on the register `qubits` (qubits[0] is the
    /// register's least significant bit): `|j⟩ -> 2^{-m/2} Σ_k e^{2πi jk/2^m} |k⟩`,
    /// including the final bit-reversal swaps. `inverse` applies the adjoint.
    pub fn apply_qft(&mut self, qubits: &[usize], inverse: bool) -> Result<()> {
        if qubits.is_empty() {
            return Err(Error::EmptyRegister);
        }
        for (k, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..k].contains(&q) {
                return Err(Error::QubitCollision(q));
            }
        }
        let m = qubits.len();
        let h = standard_gate::<T>(GateKind::H, None)?;
        let sign = if inverse { -T::one() } else { T::one() };
        let cphase = |state: &mut Self, a: usize, b: usize, dist: usize| {
            let angle = sign * T::PI() / T::lit((1u64 << dist) as f64);
            state.apply_phase_mask(1 << a | 1 << b, Complex::from_polar(T::one(), angle));
        };
        if !inverse {
            for i in (0..m).rev() {
                self.apply_unitary(&h, qubits[i], 0);
                for j in (0..i).rev() {
                    cphase(self, qubits[j], qubits[i], i - j);
                }
            }
            self.reverse_register(qubits)?;
        } else {
            self.reverse_register(qubits)?;
            for i in 0..m {
                for j in 0..i {
                    cphase(self, qubits[j], qubits[i], i - j);
                }
                self.apply_unitary(&h, qubits[i], 0);
            }
        }
        Ok(())
    }

    fn reverse_register(&mut self, qubits: &[usize]) -> Result<()> {
        let m = qubits.len();
        for k in 0..m / 2 {
            self.apply_swap(qubits[k], qubits[m - 1 - k], &[])?;
        }
        Ok(())
    }
}
