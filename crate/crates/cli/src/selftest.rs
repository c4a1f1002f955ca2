//! Quick invariant checks over every module, run by `qlstm-bench selftest`.

use num_complex::Complex;
use qlstm_core::bench::{generate_dataset, DatasetSize, Task};
use qlstm_core::cell::{CellState, GateActivations};
use qlstm_core::qlstm::{cell_step_with, decode, encode_amplitude, FixedGates, GateProvider};
use qlstm_core::qpca::{qpca_top_k, DataMatrix};
use qlstm_core::sequence::write_sequences_csv;
use qlstm_core::statevector::{standard_gate, GateKind};
use qlstm_core::variational::{gradient, AnsatzSpec, Encoding, GradientMode, TrainingSample};
use qlstm_core::{lstm, Circuit, QuantumState, Result, Unitary2};

pub struct Check {
    pub name: &'static str,
    pub outcome: Result<bool>,
}

fn close(a: Complex<f64>, b: f64) -> bool {
    (a - Complex::new(b, 0.0)).norm() < 1e-12
}

fn power(u: Unitary2, n: usize) -> Unitary2 {
    (0..n).fold(Unitary2::identity(), |acc, _| acc.matmul(&u))
}

fn gate_identities() -> Result<bool> {
    let id = Unitary2::identity();
    let cases = [
        (GateKind::H, 2),
        (GateKind::S, 4),
        (GateKind::T, 8),
        (GateKind::X, 2),
        (GateKind::Z, 2),
    ];
    for (kind, n) in cases {
        let p = power(standard_gate(kind, None)?, n);
        for r in 0..2 {
            for c in 0..2 {
                if (p.entry(r, c) - id.entry(r, c)).norm() > 1e-12 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn bell_state() -> Result<bool> {
    let mut c = Circuit::new(2);
    c.gate(GateKind::H, None, 0)?.cnot(0, 1)?;
    let s = c.run()?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok(close(s.amplitude(0), r)
        && close(s.amplitude(1), 0.0)
        && close(s.amplitude(2), 0.0)
        && close(s.amplitude(3), r))
}

fn qft_matches_dft() -> Result<bool> {
    let m = 3;
    let n = 1usize << m;
    for x in 0..n {
        let mut s = QuantumState::basis(m, x)?;
        s.apply_qft(&[0, 1, 2], false)?;
        for y in 0..n {
            let angle = 2.0 * std::f64::consts::PI * (x * y) as f64 / n as f64;
            let expected = Complex::from_polar(1.0 / (n as f64).sqrt(), angle);
            if (s.amplitude(y) - expected).norm() > 1e-12 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn shift_rule_matches_finite_difference() -> Result<bool> {
    let spec = AnsatzSpec::hardware_efficient(2, 2, Encoding::PerWire)?;
    let params: Vec<f64> = (0..spec.n_params()).map(|k| 0.3 + 0.7 * k as f64).collect();
    let data = [TrainingSample::new(vec![0.4, -1.2], 0.25)?];
    let a = gradient(&spec, &params, &data, GradientMode::ParameterShift, 0, 0)?;
    let b = gradient(&spec, &params, &data, GradientMode::CentralDifference, 0, 0)?;
    Ok(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-6))
}

fn amplitude_round_trip() -> Result<bool> {
    let p = decode(&encode_amplitude(&[1.0_f64, 2.0, 2.0])?, 0, 0)?;
    let expected = [1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0, 0.0];
    Ok(p.len() == 4 && p.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12))
}

fn perfect_memory() -> Result<bool> {
    let gates = FixedGates(GateActivations::constant(3, 1.0, 0.0, 0.0, 0.7));
    let c0 = vec![0.25, -0.5, 1.0];
    let mut state = CellState {
        c: c0.clone(),
        h: vec![0.0; 3],
    };
    for t in 0..100 {
        state = cell_step_with(&state, &[0.3], t, &gates)?.0;
    }
    Ok(state.c == c0)
}

struct Classical<'a>(&'a lstm::ClassicalLstmParams<f64>);

impl GateProvider<f64> for Classical<'_> {
    fn activations(&self, x: &[f64], h_prev: &[f64], _t: usize) -> Result<GateActivations<f64>> {
        Ok(lstm::activations(self.0, x, h_prev))
    }
}

fn classical_wiring() -> Result<bool> {
    let params = lstm::ClassicalLstmParams::gaussian(2, 3, 1, 11);
    let state = CellState {
        c: vec![0.1, -0.2, 0.3],
        h: vec![0.05, 0.4, -0.6],
    };
    let x = [0.9, -0.3];
    let (c, h, _) = lstm::cell_step(&state.c, &state.h, &x, &params)?;
    let (q, _) = cell_step_with(&state, &x, 0, &Classical(&params))?;
    Ok(q.c == c && q.h == h)
}

fn qpca_diagonal() -> Result<bool> {
    let x = DataMatrix::new(2, 2, vec![2.0, 0.0, 0.0, 1.0])?;
    let r = qpca_top_k(&x, 2, 4, 0, 0)?;
    Ok(r.phases == [13.0 / 16.0, 3.0 / 16.0] && r.components[0] == [1.0, 0.0])
}

fn dataset_determinism() -> Result<bool> {
    let bytes = || -> Result<Vec<u8>> {
        let d = generate_dataset(Task::DelayedEcho, 42, &DatasetSize::default())?;
        let mut buf = Vec::new();
        write_sequences_csv(&mut buf, &d.all())?;
        Ok(buf)
    };
    Ok(bytes()? == bytes()?)
}

pub fn run_all() -> Vec<Check> {
    let checks: [(&'static str, fn() -> Result<bool>); 9] = [
        ("gate identities H^2 S^4 T^8", gate_identities),
        ("bell state amplitudes", bell_state),
        ("qft equals dft (3 qubits)", qft_matches_dft),
        (
            "parameter shift vs central difference",
            shift_rule_matches_finite_difference,
        ),
        ("amplitude encode/decode round trip", amplitude_round_trip),
        ("perfect memory over 100 steps", perfect_memory),
        ("cell wiring equals classical lstm", classical_wiring),
        ("qpca diagonal example", qpca_diagonal),
        ("dataset determinism", dataset_determinism),
    ];
    checks
        .into_iter()
        .map(|(name, f)| Check { name, outcome: f() })
        .collect()
}
