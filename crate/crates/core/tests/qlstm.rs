use proptest::prelude::*;
use qlstm_core::bench::{generate_dataset, DatasetSize, Task};
use qlstm_core::cell::{CellState, GateActivations, GateFamily};
use qlstm_core::lstm::{self, ClassicalLstmParams};
use qlstm_core::qlstm::*;
use qlstm_core::rng::seeded;
use qlstm_core::sequence::Sequence;
use qlstm_core::statevector::total_variation;
use qlstm_core::{Error, QuantumState};
use rand::Rng as _;

/// σ/tanh stubs from a classical parameter set, standing in for the circuits.
struct ClassicalStub<'a>(&'a ClassicalLstmParams<f64>);

impl GateProvider<f64> for ClassicalStub<'_> {
    fn activations(
        &self,
        x: &[f64],
        h_prev: &[f64],
        _t: usize,
    ) -> qlstm_core::Result<GateActivations<f64>> {
        Ok(lstm::activations(self.0, x, h_prev))
    }
}

fn uniform(rng: &mut qlstm_core::rng::Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

#[test]
fn wiring_matches_classical_cell_bitwise() {
    let mut rng = seeded(1000);
    for case in 0..1000u64 {
        let (input, hidden) = (1 + case as usize % 3, 1 + (case as usize / 3) % 4);
        let mut params = ClassicalLstmParams::zeros(input, hidden, 1);
        for v in params.values_mut() {
            *v = rng.random_range(-2.0..2.0);
        }
        let state = CellState {
            c: uniform(&mut rng, hidden, 1.0),
            h: uniform(&mut rng, hidden, 1.0),
        };
        let x = uniform(&mut rng, input, 3.0);
        let (c, h, a) = lstm::cell_step(&state.c, &state.h, &x, &params).unwrap();
        let (q, qa) = cell_step_with(&state, &x, 0, &ClassicalStub(&params)).unwrap();
        assert_eq!((q.c, q.h), (c, h), "case {case}");
        assert_eq!(qa, a);
    }
}

#[test]
fn hand_computed_step() {
    let state = CellState {
        c: vec![0.5_f64],
        h: vec![0.0],
    };
    let gates = FixedGates(GateActivations::constant(1, 0.5, 0.5, 1.0, 1.0));
    let (next, _) = cell_step_with(&state, &[0.0], 0, &gates).unwrap();
    assert_eq!(next.c, vec![0.75]);
    assert!((next.h[0] - 0.6351).abs() < 1e-4);
    let write = FixedGates(GateActivations::constant(1, 0.0, 1.0, 1.0, -0.4));
    assert_eq!(
        cell_step_with(&state, &[0.0], 0, &write).unwrap().0.c,
        vec![-0.4]
    );
}

#[test]
fn perfect_memory_over_long_horizon() {
    let c0 = vec![0.3, -0.9, 0.123456789];
    let gates = FixedGates(GateActivations::constant(3, 1.0, 0.0, 0.0, 0.5));
    let mut state = CellState {
        c: c0.clone(),
        h: vec![0.0; 3],
    };
    for t in 0..1000 {
        state = cell_step_with(&state, &[1.0, -1.0], t, &gates).unwrap().0;
        assert_eq!(state.c, c0);
        assert_eq!(state.h, vec![0.0; 3]);
    }
}

#[test]
fn degenerate_gate_activations() {
    let config = QlstmConfig::new(1, 2, 1, 0);
    let params = QlstmParams::<f64>::zeros(&config).unwrap();
    let c = gate_activation(
        GateFamily::Candidate,
        &[0.0, 0.0],
        &[0.0],
        &params,
        &config,
        0,
    )
    .unwrap();
    assert!(c.iter().all(|v| v.abs() < 1e-15));
    let f = gate_activation(GateFamily::Forget, &[0.0, 0.0], &[0.0], &params, &config, 0).unwrap();
    assert!(f.iter().all(|v| (v - 0.5).abs() < 1e-15));
    assert!(gate_activation(GateFamily::Forget, &[0.0], &[0.0], &params, &config, 0).is_err());
}

#[test]
fn embedding_of_one() {
    let s = embed(&[1.0_f64]).unwrap().run().unwrap();
    // Ry(π/2) carries |+⟩ to |1⟩: amplitudes (cos π/4 − sin π/4, sin π/4 + cos π/4)/√2
    assert!((s.probabilities()[1] - 1.0).abs() < 1e-12);
    let s = embed(&[-1.0_f64]).unwrap().run().unwrap();
    assert!((s.probabilities()[0] - 1.0).abs() < 1e-12);
    assert!(embed(&[f64::NAN]).is_err());
}

#[test]
fn gradient_reaches_the_first_step() {
    let size = DatasetSize {
        n_sequences: 5,
        length: 8,
        delay: 2,
        ..DatasetSize::default()
    };
    let mut alive = 0;
    for seed in 0..10 {
        let data = generate_dataset(Task::DelayedEcho, seed, &size).unwrap();
        let config = QlstmConfig::new(1, 2, 2, seed);
        let params = QlstmParams::init(&config).unwrap();
        let g = loss_and_gradient(&params, &config, &data.train).unwrap();
        assert!(g.per_step_max.iter().all(|v| v.is_finite()));
        if g.per_step_max[0] > 1e-6 {
            alive += 1;
        }
    }
    assert!(alive >= 8, "only {alive}/10 seeds");
}

#[test]
fn untrained_outputs_as_targets_give_zero_loss() {
    let config = QlstmConfig::new(1, 2, 1, 3);
    let params = QlstmParams::init(&config).unwrap();
    let inputs: Vec<Vec<f64>> = (0..5).map(|t| vec![(t as f64 * 0.7).sin()]).collect();
    let targets = predict_sequence(&inputs, &params, &config, 0).unwrap();
    let data = [Sequence {
        id: 0,
        inputs,
        targets,
    }];
    let trained = train_from(
        params.clone(),
        &data,
        &config,
        &QlstmTrainConfig {
            learning_rate: 0.5,
            iterations: 3,
        },
    )
    .unwrap();
    assert!(trained.loss_history.iter().all(|&l| l == 0.0));
    assert_eq!(trained.params, params);
}

#[test]
fn training_is_bit_reproducible() {
    let size = DatasetSize {
        n_sequences: 3,
        length: 5,
        ..DatasetSize::default()
    };
    let data = generate_dataset(Task::Sine, 2, &size).unwrap();
    for shots in [0, 64] {
        let config = QlstmConfig {
            shots,
            ..QlstmConfig::new(1, 2, 1, 9)
        };
        let train = QlstmTrainConfig {
            learning_rate: 0.2,
            iterations: 3,
        };
        let a = train_sequence(&data.train, &config, &train).unwrap();
        let b = train_sequence(&data.train, &config, &train).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.evaluations,
            4 * gradient_evaluations(&config, 5).unwrap() * data.train.len() as u64
        );
    }
}

#[test]
fn checkpoint_round_trip() {
    let config = QlstmConfig::new(1, 2, 1, 4);
    let ck = QlstmCheckpoint {
        config: config.clone(),
        params: QlstmParams::init(&config).unwrap(),
        loss_history: vec![0.5, 0.25],
    };
    let mut buf = Vec::new();
    ck.write_json(&mut buf).unwrap();
    assert_eq!(QlstmCheckpoint::read_json(buf.as_slice()).unwrap(), ck);
}

#[test]
fn decode_examples() {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let bell = encode_amplitude(&[r, 0.0, 0.0, r]).unwrap();
    let p = decode(&bell, 0, 0).unwrap();
    assert!((p[0] - 0.5).abs() < 1e-15 && p[1] == 0.0 && p[2] == 0.0 && (p[3] - 0.5).abs() < 1e-15);
    assert_eq!(
        decode(&QuantumState::basis(2, 2).unwrap(), 0, 0).unwrap(),
        vec![0.0, 0.0, 1.0, 0.0]
    );
    let s = encode_amplitude(&[0.3, -1.2, 0.5, 0.9]).unwrap();
    let exact = decode(&s, 0, 0).unwrap();
    let sampled = decode(&s, 100_000, 5).unwrap();
    assert!((sampled.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(total_variation(&exact, &sampled) <= 0.01);
    assert!(matches!(
        encode_amplitude(&[0.0, 0.0]),
        Err(Error::ZeroVector)
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn encode_decode_round_trip(xs in prop::collection::vec(-10.0f64..10.0, 1..20)) {
        prop_assume!(xs.iter().any(|x| x.abs() > 1e-3));
        let p = decode(&encode_amplitude(&xs).unwrap(), 0, 0).unwrap();
        let norm2: f64 = xs.iter().map(|x| x * x).sum();
        prop_assert_eq!(p.len(), xs.len().next_power_of_two().max(2));
        for (k, pk) in p.iter().enumerate() {
            let expected = xs.get(k).map_or(0.0, |x| x * x / norm2);
            prop_assert!((pk - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn ranges_hold_along_trajectories(seed in any::<u64>(), steps in 1usize..12) {
        let config = QlstmConfig::new(1, 2, 1, seed);
        let mut params = QlstmParams::<f64>::init(&config).unwrap();
        let mut rng = seeded(seed);
        for v in params.values_mut() {
            *v = rng.random_range(-10.0..10.0);
        }
        let mut state = CellState::zeros(2);
        for t in 0..steps {
            let x = [rng.random_range(-20.0..20.0)];
            let (next, a) = cell_step(&state, &x, t, &params, &config).unwrap();
            prop_assert!(a.in_range());
            prop_assert!(next.h.iter().all(|h| h.abs() <= 1.0));
            state = next;
        }
    }
}
