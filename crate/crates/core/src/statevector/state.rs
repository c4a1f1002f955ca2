use num_complex::Complex;
use rayon::prelude::*;

use super::gate::{GateOp, Unitary2};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest register a state may be created with unless a cap is passed
/// explicitly. 2^20 double-precision amplitudes is 16 MiB.
pub const DEFAULT_QUBIT_CAP: usize = 20;

/// Below this many amplitudes the kernels stay on the calling thread.
const PAR_MIN_LEN: usize = 1 << 14;

/// Normalized complex amplitudes over `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState<T: Real> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> QuantumState<T> {
    /// `|index⟩` on `n_qubits` qubits, subject to [`DEFAULT_QUBIT_CAP`].
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        Self::basis_with_cap(n_qubits, index, DEFAULT_QUBIT_CAP)
    }

    pub fn basis_with_cap(n_qubits: usize, index: usize, cap: usize) -> Result<Self> {
        check_size(n_qubits, cap)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::BasisIndexOutOfRange { index, n_qubits });
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// `|0...0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Wraps amplitudes that are already normalized (within the scalar's tolerance).
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let n_qubits = register_size(amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::NonFinite("amplitude"));
        }
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if !((norm - T::one()).abs() <= T::norm_tol()) {
            return Err(Error::InvalidConfig(format!(
                "amplitudes are not normalized (sum of squares = {norm})"
            )));
        }
        Ok(state)
    }

    /// Scales arbitrary amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let n_qubits = register_size(amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::NonFinite("amplitude"));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(Error::ZeroVector);
        }
        for a in &mut amplitudes {
            *a = *a / norm;
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    #[inline]
    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, x| acc + x)
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, op: &GateOp<T>) -> Result<()> {
        op.validate(self.n_qubits)?;
        self.apply_unitary(&op.gate, op.target, op.control_mask());
        Ok(())
    }

    /// Applies `u` to `target` on every basis pair whose `control_mask` bits are all set.
    /// Indices must already be validated.
    pub(crate) fn apply_unitary(&mut self, u: &Unitary2<T>, target: usize, control_mask: usize) {
        let stride = 1usize << target;
        let [[m00, m01], [m10, m11]] = u.entries();
        let kernel = |base: usize, chunk: &mut [Complex<T>]| {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (off, (a0, a1)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                if (base + off) & control_mask != control_mask {
                    continue;
                }
                let (x0, x1) = (*a0, *a1);
                *a0 = m00 * x0 + m01 * x1;
                *a1 = m10 * x0 + m11 * x1;
            }
        };
        let block = 2 * stride;
        if self.amplitudes.len() >= PAR_MIN_LEN && self.amplitudes.len() / block > 1 {
            self.amplitudes
                .par_chunks_mut(block)
                .enumerate()
                .for_each(|(k, chunk)| kernel(k * block, chunk));
        } else {
            self.amplitudes
                .chunks_mut(block)
                .enumerate()
                .for_each(|(k, chunk)| kernel(k * block, chunk));
        }
    }

    /// Multiplies by `phase` every amplitude whose index has all `mask` bits set.
    pub(crate) fn apply_phase_mask(&mut self, mask: usize, phase: Complex<T>) {
        let f = |(i, a): (usize, &mut Complex<T>)| {
            if i & mask == mask {
                *a = *a * phase;
            }
        };
        if self.amplitudes.len() >= PAR_MIN_LEN {
            self.amplitudes.par_iter_mut().enumerate().for_each(f);
        } else {
            self.amplitudes.iter_mut().enumerate().for_each(f);
        }
    }

    /// Exchanges qubits `a` and `b` on the subspace where every control is 1.
    pub fn apply_swap(&mut self, a: usize, b: usize, controls: &[usize]) -> Result<()> {
        let mut all = vec![a, b];
        all.extend_from_slice(controls);
        self.check_distinct_in_range(&all)?;
        let mask = controls.iter().fold(0usize, |m, &c| m | (1 << c));
        let (ba, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amplitudes.len() {
            // visit each exchanged pair once, from the side with a=1, b=0
            if i & ba != 0 && i & bb == 0 && i & mask == mask {
                self.amplitudes.swap(i, i ^ ba ^ bb);
            }
        }
        Ok(())
    }

    /// Controlled swap (Fredkin): exchanges `a` and `b` when `control` is 1.
    pub fn apply_cswap(&mut self, control: usize, a: usize, b: usize) -> Result<()> {
        self.apply_swap(a, b, &[control])
    }

    /// Applies a dense `2^k x 2^k` row-major matrix to the `targets` register
    /// (targets[0] is the least significant register bit) wherever all
    /// `controls` are 1. The matrix is trusted to be unitary.
    pub fn apply_controlled_matrix(
        &mut self,
        matrix: &[Complex<T>],
        targets: &[usize],
        controls: &[usize],
    ) -> Result<()> {
        if targets.is_empty() {
            return Err(Error::EmptyRegister);
        }
        let sub = 1usize << targets.len();
        if matrix.len() != sub * sub {
            return Err(Error::LengthMismatch {
                what: "controlled matrix entries",
                expected: sub * sub,
                got: matrix.len(),
            });
        }
        let mut all = targets.to_vec();
        all.extend_from_slice(controls);
        self.check_distinct_in_range(&all)?;
        let target_mask = targets.iter().fold(0usize, |m, &t| m | (1 << t));
        let control_mask = controls.iter().fold(0usize, |m, &c| m | (1 << c));
        let offsets: Vec<usize> = (0..sub)
            .map(|s| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| s >> r & 1 == 1)
                    .fold(0, |acc, (_, &t)| acc | (1 << t))
            })
            .collect();
        let mut gathered = vec![Complex::new(T::zero(), T::zero()); sub];
        for base in 0..self.amplitudes.len() {
            if base & target_mask != 0 || base & control_mask != control_mask {
                continue;
            }
            for (g, off) in gathered.iter_mut().zip(&offsets) {
                *g = self.amplitudes[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let entries = &matrix[row * sub..(row + 1) * sub];
                self.amplitudes[base | off] = entries
                    .iter()
                    .zip(&gathered)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (m, g)| {
                        acc + m * g
                    });
            }
        }
        Ok(())
    }

    fn check_distinct_in_range(&self, qubits: &[usize]) -> Result<()> {
        for (k, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..k].contains(&q) {
                return Err(Error::QubitCollision(q));
            }
        }
        Ok(())
    }
}

fn check_size(n_qubits: usize, cap: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::InvalidConfig(
            "a register needs at least one qubit".into(),
        ));
    }
    if n_qubits > cap {
        return Err(Error::QubitCapExceeded { n_qubits, cap });
    }
    Ok(())
}

fn register_size(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidConfig(format!(
            "amplitude count {len} is not a power of two >= 2"
        )));
    }
    let n = len.trailing_zeros() as usize;
    check_size(n, DEFAULT_QUBIT_CAP)?;
    Ok(n)
}
