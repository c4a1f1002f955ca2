//! Quantum PCA at desk scale.
//!
//! The data matrix is amplitude-encoded as `Σ X_ij |i⟩|j⟩ / ‖X‖_F`. The
//! covariance `C = XᵀX` is trace-normalized to `C̃` (eigenvalues in `[0, 1]`)
//! and exponentiated classically into `U = exp(2πi C̃)`; phase estimation on
//! each classical eigenvector then reads the eigenvalue back as an `m`-bit
//! fraction.
//!
//! An eigenvalue of exactly 1 (rank-one data) has phase 1 ≡ 0, so it is
//! indistinguishable from a null direction. Phase comparisons therefore use
//! the circular distance, and such spectra are flagged as degenerate.

mod eigen;
mod matrix;

pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use matrix::ComplexMatrix;

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::scalar::Real;
use crate::statevector::{standard_gate, GateKind, GateOp, QuantumState};

pub const MAX_COLUMNS: usize = 8;
pub const MAX_ANCILLAS: usize = 10;

/// Real `rows x cols` matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DataMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty("data matrix"));
        }
        if cols > MAX_COLUMNS {
            return Err(Error::InvalidConfig(format!(
                "at most {MAX_COLUMNS} columns, got {cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                what: "data matrix entries",
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("data matrix"));
        }
        if data.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroVector);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                what: "data matrix row",
                expected: cols,
                got: bad.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|x| *x * *x).sum::<T>().sqrt()
    }

    /// `XᵀX`, row-major `cols x cols`.
    pub fn covariance(&self) -> Vec<T> {
        let d = self.cols;
        let mut c = vec![T::zero(); d * d];
        for i in 0..self.rows {
            let row = &self.data[i * d..(i + 1) * d];
            for a in 0..d {
                for b in 0..d {
                    c[a * d + b] += row[a] * row[b];
                }
            }
        }
        c
    }
}

impl DataMatrix<f64> {
    /// Numeric CSV rows; a non-numeric first row is taken as a header.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if line == 0 => continue,
                Err(e) => {
                    return Err(Error::Parse {
                        line: line + 1,
                        msg: e.to_string(),
                    })
                }
            }
        }
        Self::from_rows(&rows)
    }
}

fn register_qubits(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros().max(1) as usize
}

/// `Σ X_ij |i⟩|j⟩ / ‖X‖_F` with the row register in the high bits: basis
/// index `i·2^q + j` where `q = max(1, ⌈log₂ d⌉)`.
pub fn prepare_data_state<T: Real>(x: &DataMatrix<T>) -> Result<QuantumState<T>> {
    let (rq, cq) = (register_qubits(x.rows), register_qubits(x.cols));
    let norm = x.frobenius_norm();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << (rq + cq)];
    for i in 0..x.rows {
        for j in 0..x.cols {
            amps[(i << cq) | j] = Complex::new(x.get(i, j) / norm, T::zero());
        }
    }
    QuantumState::normalized(amps)
}

/// Eigendecomposition of `C̃ = XᵀX / tr(XᵀX)`.
pub fn normalized_covariance_spectrum<T: Real>(x: &DataMatrix<T>) -> Result<SymmetricEigen<T>> {
    let mut c = x.covariance();
    let d = x.cols;
    let trace: T = (0..d).map(|i| c[i * d + i]).sum();
    if trace <= T::zero() {
        return Err(Error::ZeroVector);
    }
    c.iter_mut().for_each(|v| *v /= trace);
    let mut eig = symmetric_eigen(&c, d)?;
    // Round-off can push the smallest eigenvalues a hair below zero.
    eig.values.iter_mut().for_each(|v| *v = v.max(T::zero()));
    Ok(eig)
}

/// `V · diag(e^{2πiλ}) · Vᵀ` from real eigenpairs.
pub fn unitary_from_spectrum<T: Real>(eig: &SymmetricEigen<T>) -> ComplexMatrix<T> {
    let d = eig.values.len();
    let two_pi = T::lit(2.0) * T::PI();
    let mut entries = vec![Complex::new(T::zero(), T::zero()); d * d];
    for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
        let phase = Complex::from_polar(T::one(), two_pi * *lambda);
        for a in 0..d {
            for b in 0..d {
                entries[a * d + b] += phase * (v[a] * v[b]);
            }
        }
    }
    ComplexMatrix::new(d, entries).expect("square by construction")
}

/// `exp(2πi C̃)` on the `d`-dimensional column space.
pub fn covariance_unitary<T: Real>(x: &DataMatrix<T>) -> Result<ComplexMatrix<T>> {
    Ok(unitary_from_spectrum(&normalized_covariance_spectrum(x)?))
}

/// Ancilla-register statistics from one phase-estimation run.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseEstimate<T> {
    pub ancillas: usize,
    /// Exact outcome distribution over the `2^m` ancilla values.
    pub probabilities: Vec<T>,
    /// Sampled outcomes; empty when `shots == 0`.
    pub counts: BTreeMap<usize, u64>,
}

impl<T: Real> PhaseEstimate<T> {
    /// Most frequent sampled outcome, or the most probable one without shots.
    /// Ties go to the smaller outcome.
    pub fn modal_outcome(&self) -> usize {
        if self.counts.is_empty() {
            let mut best = 0;
            for (j, p) in self.probabilities.iter().enumerate() {
                if *p > self.probabilities[best] {
                    best = j;
                }
            }
            best
        } else {
            let mut best = (0, 0);
            for (&j, &c) in &self.counts {
                if c > best.1 {
                    best = (j, c);
                }
            }
            best.0
        }
    }

    pub fn phase(&self, outcome: usize) -> f64 {
        outcome as f64 / (1u64 << self.ancillas) as f64
    }

    pub fn modal_phase(&self) -> f64 {
        self.phase(self.modal_outcome())
    }
}

/// Textbook phase estimation: the eigenvector on qubits `0..q`, `m` ancillas
/// on `q..q+m` put in superposition, ancilla `k` controls `U^(2^k)`, then an
/// inverse QFT over the ancillas. Non-power-of-two `U` is padded with an
/// identity block.
pub fn phase_estimate<T: Real>(
    u: &ComplexMatrix<T>,
    eigenvector: &[Complex<T>],
    m: usize,
    shots: u64,
    seed: u64,
) -> Result<PhaseEstimate<T>> {
    if !(1..=MAX_ANCILLAS).contains(&m) {
        return Err(Error::InvalidConfig(format!(
            "ancilla count must be in 1..={MAX_ANCILLAS}, got {m}"
        )));
    }
    if eigenvector.len() != u.dim() {
        return Err(Error::LengthMismatch {
            what: "eigenvector length",
            expected: u.dim(),
            got: eigenvector.len(),
        });
    }
    let q = register_qubits(u.dim());
    let padded = u.padded(1 << q);
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << (q + m)];
    amps[..eigenvector.len()].copy_from_slice(eigenvector);
    let mut state = QuantumState::from_amplitudes(amps)?;
    let targets: Vec<usize> = (0..q).collect();
    let ancillas: Vec<usize> = (q..q + m).collect();
    let h = standard_gate(GateKind::H, None)?;
    let mut power = padded;
    for (k, &a) in ancillas.iter().enumerate() {
        state.apply_gate(&GateOp::single(h, a))?;
        if k > 0 {
            power = power.matmul(&power);
        }
        state.apply_controlled_matrix(power.entries(), &targets, &[a])?;
    }
    state.apply_qft(&ancillas, true)?;
    let mut probabilities = vec![T::zero(); 1 << m];
    for (idx, p) in state.probabilities().into_iter().enumerate() {
        probabilities[idx >> q] += p;
    }
    let mut counts = BTreeMap::new();
    if shots > 0 {
        for (idx, c) in state.sample_counts(shots, seed)? {
            *counts.entry(idx >> q).or_insert(0) += c;
        }
    }
    Ok(PhaseEstimate {
        ancillas: m,
        probabilities,
        counts,
    })
}

/// Distance on the unit circle of phases.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    /// Measured `m`-bit phase per returned component, descending.
    pub phases: Vec<f64>,
    /// Shots landing on each modal outcome (0 for exact runs).
    pub counts: Vec<u64>,
    pub components: Vec<Vec<f64>>,
    /// Classical eigenvalues of `C̃` for the returned components.
    pub eigenvalues: Vec<f64>,
    /// Exact probability of each modal outcome.
    pub modal_probabilities: Vec<f64>,
    /// Two eigenvalues closer than `2^-m` on the phase circle; ranking is
    /// then arbitrary among them.
    pub degenerate_spectrum: bool,
    pub ancillas: usize,
    pub shots: u64,
}

impl PcaResult {
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }
}

/// Phase estimation on every classical eigenvector of `C̃`; the `k` with the
/// largest measured phases are returned.
pub fn qpca_top_k<T: Real>(
    x: &DataMatrix<T>,
    k: usize,
    m: usize,
    shots: u64,
    seed: u64,
) -> Result<PcaResult> {
    let d = x.cols();
    if k == 0 || k > d {
        return Err(Error::InvalidConfig(format!(
            "k must be in 1..={d}, got {k}"
        )));
    }
    let eig = normalized_covariance_spectrum(x)?;
    let u = unitary_from_spectrum(&eig);
    let runs: Vec<PhaseEstimate<T>> = eig
        .vectors
        .par_iter()
        .enumerate()
        .map(|(idx, v)| {
            let v: Vec<Complex<T>> = v.iter().map(|&a| Complex::new(a, T::zero())).collect();
            phase_estimate(&u, &v, m, shots, derive_seed(seed, &[idx as u64]))
        })
        .collect::<Result<_>>()?;
    let lambdas: Vec<f64> = eig.values.iter().map(|v| v.to_f64_lossy()).collect();
    let resolution = 1.0 / (1u64 << m) as f64;
    let degenerate_spectrum = (0..d)
        .flat_map(|a| (a + 1..d).map(move |b| (a, b)))
        .any(|(a, b)| circular_distance(lambdas[a], lambdas[b]) < resolution);
    let mut order: Vec<usize> = (0..d).collect();
    // Stable, so equal phases keep the classical order.
    order.sort_by(|&a, &b| runs[b].modal_phase().total_cmp(&runs[a].modal_phase()));
    order.truncate(k);
    Ok(PcaResult {
        phases: order.iter().map(|&i| runs[i].modal_phase()).collect(),
        counts: order
            .iter()
            .map(|&i| {
                runs[i]
                    .counts
                    .get(&runs[i].modal_outcome())
                    .copied()
                    .unwrap_or(0)
            })
            .collect(),
        components: order
            .iter()
            .map(|&i| eig.vectors[i].iter().map(|v| v.to_f64_lossy()).collect())
            .collect(),
        eigenvalues: order.iter().map(|&i| lambdas[i]).collect(),
        modal_probabilities: order
            .iter()
            .map(|&i| runs[i].probabilities[runs[i].modal_outcome()].to_f64_lossy())
            .collect(),
        degenerate_spectrum,
        ancillas: m,
        shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn data_state_examples() {
        let s = prepare_data_state(&DataMatrix::new(1, 1, vec![1.0]).unwrap()).unwrap();
        assert_eq!(s.n_qubits(), 2);
        assert_eq!(s.amplitude(0), c(1.0));
        let s = prepare_data_state(&DataMatrix::new(2, 2, vec![1.0; 4]).unwrap()).unwrap();
        assert!(s.amplitudes().iter().all(|a| (a - c(0.5)).norm() < 1e-15));
        let s =
            prepare_data_state(&DataMatrix::new(2, 2, vec![3.0, 0.0, 0.0, 4.0]).unwrap()).unwrap();
        let expected = [0.6, 0.0, 0.0, 0.8];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a - c(e)).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_zero_and_wide_matrices() {
        assert!(matches!(
            DataMatrix::new(2, 2, vec![0.0; 4]),
            Err(Error::ZeroVector)
        ));
        assert!(DataMatrix::new(1, 9, vec![1.0; 9]).is_err());
        assert!(DataMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn diagonal_covariance_unitary() {
        // C = diag(3, 1) → C̃ = diag(0.75, 0.25)
        let x = DataMatrix::new(2, 2, vec![3.0_f64.sqrt(), 0.0, 0.0, 1.0]).unwrap();
        let u = covariance_unitary(&x).unwrap();
        let expected = [
            Complex::from_polar(1.0, 1.5 * std::f64::consts::PI),
            c(0.0),
            c(0.0),
            Complex::from_polar(1.0, 0.5 * std::f64::consts::PI),
        ];
        for (a, e) in u.entries().iter().zip(expected) {
            assert!((a - e).norm() < 1e-12, "{a} vs {e}");
        }
    }

    #[test]
    fn exact_phase_is_deterministic() {
        let i = Complex::new(0.0, 1.0);
        let u = ComplexMatrix::new(2, vec![c(1.0), c(0.0), c(0.0), i]).unwrap();
        let est = phase_estimate(&u, &[c(0.0), c(1.0)], 2, 0, 0).unwrap();
        assert!((est.probabilities[1] - 1.0).abs() < 1e-12);
        assert_eq!(est.modal_phase(), 0.25);
        let est = phase_estimate(&u, &[c(1.0), c(0.0)], 2, 100, 3).unwrap();
        assert_eq!(est.counts, BTreeMap::from([(0, 100)]));
    }

    #[test]
    fn phase_estimate_errors() {
        let u = ComplexMatrix::<f64>::identity(2);
        assert!(phase_estimate(&u, &[c(1.0)], 2, 0, 0).is_err());
        assert!(phase_estimate(&u, &[c(1.0), c(0.0)], 0, 0, 0).is_err());
        assert!(phase_estimate(&u, &[c(1.0), c(0.0)], 11, 0, 0).is_err());
    }

    #[test]
    fn circular_distance_wraps() {
        assert!((circular_distance(0.99, 0.0) - 0.01).abs() < 1e-12);
        assert_eq!(circular_distance(0.25, 0.75), 0.5);
    }

    #[test]
    fn csv_with_and_without_header() {
        let x = DataMatrix::read_csv("a,b\n1,2\n3,4\n".as_bytes()).unwrap();
        assert_eq!((x.rows(), x.cols(), x.get(1, 0)), (2, 2, 3.0));
        let x = DataMatrix::read_csv("1,2\n3,4\n".as_bytes()).unwrap();
        assert_eq!(x.rows(), 2);
        assert!(matches!(
            DataMatrix::read_csv("1,2\nx,4\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
