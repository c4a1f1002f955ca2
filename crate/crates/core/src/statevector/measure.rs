use std::collections::BTreeMap;
use std::fmt;

use rand::Rng as _;

use super::state::QuantumState;
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::scalar::Real;

/// Result of a full computational-basis measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOutcome<T: Real> {
    /// Measured basis index.
    pub index: usize,
    /// `bitstring[k]` is the measured value of qubit `k`.
    pub bitstring: Vec<bool>,
    /// Born probability of this outcome before collapse.
    pub probability: T,
}

impl<T: Real> fmt::Display for MeasurementOutcome<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.bitstring.iter().rev() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl<T: Real> QuantumState<T> {
    /// Born probabilities `|a_i|^2`, indexed by basis state.
    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes().iter().map(|a| a.norm_sqr()).collect()
    }

    /// ⟨Z⟩ on one qubit.
    pub fn expectation_z(&self, qubit: usize) -> Result<T> {
        self.check_qubit(qubit)?;
        let bit = 1usize << qubit;
        Ok(self
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if i & bit == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum())
    }

    /// Measures every qubit. The outcome is chosen by inverse CDF over
    /// ascending basis index against one uniform draw from the seeded generator.
    pub fn measure_all(&self, rng_seed: u64) -> (MeasurementOutcome<T>, QuantumState<T>) {
        let probs = self.probabilities();
        let r: f64 = seeded(rng_seed).random();
        let index = inverse_cdf(&probs, r);
        let outcome = MeasurementOutcome {
            index,
            bitstring: (0..self.n_qubits()).map(|k| index >> k & 1 == 1).collect(),
            probability: probs[index],
        };
        let collapsed = QuantumState::basis_with_cap(self.n_qubits(), index, usize::MAX)
            .expect("index drawn from this state's own basis");
        (outcome, collapsed)
    }

    /// Histogram of `shots` independent measurements; the state is untouched.
    pub fn sample_counts(&self, shots: u64, rng_seed: u64) -> Result<BTreeMap<usize, u64>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let cdf = cumulative(&self.probabilities());
        let mut rng = seeded(rng_seed);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let r: f64 = rng.random();
            *counts.entry(search_cdf(&cdf, r)).or_insert(0) += 1;
        }
        Ok(counts)
    }

    /// Mean of `(-1)^bit` over `shots` sampled outcomes of one qubit.
    pub fn sampled_expectation_z(&self, qubit: usize, shots: u64, rng_seed: u64) -> Result<T> {
        self.check_qubit(qubit)?;
        let counts = self.sample_counts(shots, rng_seed)?;
        let signed: i64 = counts
            .iter()
            .map(|(&i, &n)| {
                if i >> qubit & 1 == 0 {
                    n as i64
                } else {
                    -(n as i64)
                }
            })
            .sum();
        Ok(T::lit(signed as f64 / shots as f64))
    }
}

fn cumulative<T: Real>(probs: &[T]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p.to_f64_lossy();
            acc
        })
        .collect()
}

/// First index whose cumulative mass exceeds `r`. If rounding leaves the total
/// below `r`, the last index with nonzero mass wins.
fn search_cdf(cdf: &[f64], r: f64) -> usize {
    let k = cdf.partition_point(|&c| c <= r);
    if k < cdf.len() {
        return k;
    }
    let total = *cdf.last().expect("non-empty state");
    cdf.iter().rposition(|&c| c < total).map_or(0, |i| i + 1)
}

fn inverse_cdf<T: Real>(probs: &[T], r: f64) -> usize {
    search_cdf(&cumulative(probs), r)
}

/// Total-variation distance between two distributions over the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::{standard_gate, GateKind, GateOp};

    fn plus() -> QuantumState<f64> {
        let mut s = QuantumState::zero(1).unwrap();
        s.apply_gate(&GateOp::single(
            standard_gate(GateKind::H, None).unwrap(),
            0,
        ))
        .unwrap();
        s
    }

    fn bell() -> QuantumState<f64> {
        let mut s = QuantumState::zero(2).unwrap();
        s.apply_gate(&GateOp::single(
            standard_gate(GateKind::H, None).unwrap(),
            1,
        ))
        .unwrap();
        s.apply_gate(&GateOp::cnot(1, 0).unwrap()).unwrap();
        s
    }

    #[test]
    fn probabilities_examples() {
        let p = plus().probabilities();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let p = bell().probabilities();
        assert!((p[0] - 0.5).abs() < 1e-15);
        assert!((p[3] - 0.5).abs() < 1e-15);
        assert_eq!(p[1], 0.0);
        assert_eq!(p[2], 0.0);
        let p = QuantumState::<f64>::basis(3, 4).unwrap().probabilities();
        assert_eq!(p, vec![0., 0., 0., 0., 1., 0., 0., 0.]);
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(
            QuantumState::<f64>::zero(1)
                .unwrap()
                .expectation_z(0)
                .unwrap(),
            1.0
        );
        assert!(plus().expectation_z(0).unwrap().abs() < 1e-15);
        let mut s = QuantumState::<f64>::zero(1).unwrap();
        s.apply_gate(&GateOp::single(
            standard_gate(GateKind::Rx, Some(0.7)).unwrap(),
            0,
        ))
        .unwrap();
        let z = s.expectation_z(0).unwrap();
        assert!((z - 0.7_f64.cos()).abs() < 1e-14);
        let p = s.probabilities();
        assert!((z - (p[0] - p[1])).abs() < 1e-15);
        assert!(s.expectation_z(1).is_err());
    }

    #[test]
    fn measure_deterministic_cases() {
        let s = QuantumState::<f64>::basis(1, 1).unwrap();
        for seed in 0..20 {
            let (o, collapsed) = s.measure_all(seed);
            assert_eq!(o.bitstring, vec![true]);
            assert_eq!(o.probability, 1.0);
            assert_eq!(collapsed, s);
        }
        let p = plus();
        for seed in 0..20 {
            assert_eq!(p.measure_all(seed).0, p.measure_all(seed).0);
        }
    }

    #[test]
    fn bell_measurements_only_correlated() {
        let b = bell();
        let mut zeros = 0;
        for seed in 0..10_000 {
            let (o, collapsed) = b.measure_all(seed);
            assert!(o.index == 0 || o.index == 3, "got {o}");
            assert!((o.probability - 0.5).abs() < 1e-12);
            assert_eq!(collapsed.probabilities()[o.index], 1.0);
            zeros += (o.index == 0) as u32;
        }
        let f = f64::from(zeros) / 10_000.0;
        assert!((f - 0.5).abs() <= 0.02, "frequency {f}");
    }

    #[test]
    fn outcome_display_is_msb_first() {
        let s = QuantumState::<f64>::basis(3, 6).unwrap();
        assert_eq!(s.measure_all(1).0.to_string(), "110");
    }

    #[test]
    fn sample_counts_contract() {
        let z = QuantumState::<f64>::zero(1).unwrap();
        assert_eq!(z.sample_counts(100, 3).unwrap(), BTreeMap::from([(0, 100)]));
        assert!(matches!(z.sample_counts(0, 3), Err(Error::ZeroShots)));
        let mut u = QuantumState::<f64>::zero(2).unwrap();
        let h = standard_gate(GateKind::H, None).unwrap();
        u.apply_gate(&GateOp::single(h, 0)).unwrap();
        u.apply_gate(&GateOp::single(h, 1)).unwrap();
        let before = u.clone();
        let counts = u.sample_counts(40_000, 11).unwrap();
        assert_eq!(u, before);
        assert_eq!(counts.values().sum::<u64>(), 40_000);
        let sigma = (40_000.0_f64 * 0.25 * 0.75).sqrt();
        for k in 0..4 {
            let n = counts[&k] as f64;
            assert!((n - 10_000.0).abs() <= 3.0 * sigma, "count {k} = {n}");
        }
        assert_eq!(counts, u.sample_counts(40_000, 11).unwrap());
    }

    #[test]
    fn cdf_rounding_falls_back_to_last_supported_index() {
        let cdf = [0.25, 0.999_999, 0.999_999];
        assert_eq!(search_cdf(&cdf, 0.9999995), 1);
        assert_eq!(search_cdf(&cdf, 0.1), 0);
        assert_eq!(search_cdf(&cdf, 0.25), 1);
    }
}
