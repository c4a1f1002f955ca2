use nalgebra::{DMatrix, SymmetricEigen as OracleEigen};
use num_complex::Complex;
use proptest::prelude::*;
use qlstm_core::qpca::*;
use rand::Rng as _;

fn oracle_eigenvalues(x: &DataMatrix<f64>) -> Vec<f64> {
    let d = x.cols();
    let c = DMatrix::from_row_slice(d, d, &x.covariance());
    let tr = c.trace();
    let mut v: Vec<f64> = OracleEigen::new(c / tr)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn random_matrix(seed: u64, rows: usize, cols: usize) -> DataMatrix<f64> {
    let mut rng = qlstm_core::rng::seeded(seed);
    DataMatrix::new(
        rows,
        cols,
        (0..rows * cols)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect(),
    )
    .unwrap()
}

#[test]
fn jacobi_matches_nalgebra() {
    for seed in 0..40 {
        let d = 1 + (seed as usize % 8);
        let x = random_matrix(seed, 1 + (seed as usize % 7), d);
        let eig = normalized_covariance_spectrum(&x).unwrap();
        for (a, b) in eig.values.iter().zip(oracle_eigenvalues(&x)) {
            assert!((a - b.max(0.0)).abs() < 1e-12, "seed {seed}: {a} vs {b}");
        }
        assert!((eig.values.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        // vectors orthonormal
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = eig.vectors[i]
                    .iter()
                    .zip(&eig.vectors[j])
                    .map(|(a, b)| a * b)
                    .sum();
                assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn covariance_unitary_is_unitary() {
    for seed in 0..20 {
        let x = random_matrix(100 + seed, 5, 1 + seed as usize % 8);
        assert!(covariance_unitary(&x).unwrap().unitarity_deviation() < 1e-10);
    }
}

#[test]
fn isotropic_covariance_gives_minus_identity() {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let x = DataMatrix::new(2, 2, vec![r, 0.0, 0.0, r]).unwrap();
    let u = covariance_unitary(&x).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let e = if i == j { -1.0 } else { 0.0 };
            assert!((u.get(i, j) - Complex::new(e, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn one_third_phase_modal_outcome() {
    let phase = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let u = ComplexMatrix::new(
        2,
        vec![
            phase,
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
        ],
    )
    .unwrap();
    let est = phase_estimate(
        &u,
        &[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)],
        4,
        0,
        0,
    )
    .unwrap();
    assert_eq!(est.modal_outcome(), 5);
    assert!(est.probabilities[5] >= 0.4, "p = {}", est.probabilities[5]);
    assert!((est.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn diagonal_example_phases() {
    let x = DataMatrix::new(2, 2, vec![2.0, 0.0, 0.0, 1.0]).unwrap();
    let r = qpca_top_k(&x, 2, 4, 0, 0).unwrap();
    assert_eq!(r.phases, vec![13.0 / 16.0, 3.0 / 16.0]);
    assert_eq!(r.components[0], vec![1.0, 0.0]);
    assert!(!r.degenerate_spectrum);
    let top = qpca_top_k(&x, 1, 4, 1000, 9).unwrap();
    assert_eq!(top.phases, vec![13.0 / 16.0]);
    assert!(top.counts[0] > 500);
}

#[test]
fn isotropic_data_is_flagged() {
    let x = DataMatrix::new(3, 3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
    assert!(qpca_top_k(&x, 3, 6, 0, 0).unwrap().degenerate_spectrum);
}

#[test]
fn rank_one_data_wraps_and_is_flagged() {
    // eigenvalue 1 has phase 1 ≡ 0, same as the null direction
    let x = DataMatrix::new(2, 2, vec![1.0, 1.0, 2.0, 2.0]).unwrap();
    let r = qpca_top_k(&x, 2, 5, 0, 0).unwrap();
    assert!(r.degenerate_spectrum);
    assert!(r.phases.iter().all(|&p| p == 0.0));
}

#[test]
fn full_rank_components_are_orthonormal() {
    let x = random_matrix(7, 6, 4);
    let r = qpca_top_k(&x, 4, 6, 0, 0).unwrap();
    for (i, a) in r.components.iter().enumerate() {
        for (j, b) in r.components.iter().enumerate() {
            let dot: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
            assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-8);
        }
    }
}

#[test]
fn json_shape() {
    let x = DataMatrix::new(2, 2, vec![2.0, 0.0, 0.0, 1.0]).unwrap();
    let r = qpca_top_k(&x, 2, 4, 100, 1).unwrap();
    let mut buf = Vec::new();
    r.write_json(&mut buf).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
    for key in ["phases", "counts", "components"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(PcaResult::read_json(buf.as_slice()).unwrap(), r);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn modal_phase_within_resolution(seed in any::<u64>(), rows in 1usize..=8, cols in 1usize..=4) {
        let x = random_matrix(seed, rows, cols);
        let m = 6;
        let r = qpca_top_k(&x, cols, m, 0, seed).unwrap();
        let oracle = oracle_eigenvalues(&x);
        for (phase, lambda) in r.phases.iter().zip(&r.eigenvalues) {
            prop_assert!(circular_distance(*phase, *lambda) <= 1.0 / 64.0 + 1e-12);
            prop_assert!(oracle.iter().any(|o| (o.max(0.0) - lambda).abs() < 1e-10));
        }
    }

    #[test]
    fn near_outcomes_carry_most_mass(seed in any::<u64>(), rows in 1usize..=8, cols in 1usize..=4) {
        let x = random_matrix(seed, rows, cols);
        let eig = normalized_covariance_spectrum(&x).unwrap();
        let u = unitary_from_spectrum(&eig);
        for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
            let v: Vec<Complex<f64>> = v.iter().map(|&a| Complex::new(a, 0.0)).collect();
            let est = phase_estimate(&u, &v, 6, 0, 0).unwrap();
            let near: f64 = est
                .probabilities
                .iter()
                .enumerate()
                .filter(|(j, _)| circular_distance(est.phase(*j), *lambda) <= 1.0 / 64.0)
                .map(|(_, p)| p)
                .sum();
            prop_assert!(near >= 0.8, "lambda {lambda}: {near}");
        }
    }

    #[test]
    fn data_state_is_normalized(seed in any::<u64>(), rows in 1usize..=8, cols in 1usize..=8) {
        let s = prepare_data_state(&random_matrix(seed, rows, cols)).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
