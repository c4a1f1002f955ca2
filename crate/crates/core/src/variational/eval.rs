use rayon::prelude::*;

use super::ansatz::{build, AngleSource, AnsatzSpec, PlanOp};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    ParameterShift,
    CentralDifference,
}

/// Step of the central-difference oracle mode.
pub const CENTRAL_DIFFERENCE_STEP: f64 = 1e-5;

/// One (input, target) pair for the MSE cost.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSample<T: Real> {
    pub x: Vec<T>,
    pub y: T,
}

impl<T: Real> TrainingSample<T> {
    /// Targets must lie in the readout's range `[-1, 1]`.
    pub fn new(x: Vec<T>, y: T) -> Result<Self> {
        if !(y.abs() <= T::one()) {
            return Err(Error::InvalidConfig(format!("target {y} outside [-1, 1]")));
        }
        Ok(Self { x, y })
    }
}

fn readout<T: Real>(
    spec: &AnsatzSpec,
    plan: &[PlanOp],
    params: &[T],
    x: &[T],
    shift: Option<(usize, T)>,
    shots: u64,
    seed: u64,
) -> Result<T> {
    let state = build(spec, plan, params, x, shift)?.run()?;
    if shots == 0 {
        state.expectation_z(0)
    } else {
        state.sampled_expectation_z(0, shots, seed)
    }
}

/// ⟨Z⟩ on qubit 0 of the bound circuit. `shots == 0` is exact; otherwise the
/// sample mean of `(-1)^bit` over `shots` seeded measurements.
pub fn predict<T: Real>(
    spec: &AnsatzSpec,
    params: &[T],
    x: &[T],
    shots: u64,
    seed: u64,
) -> Result<T> {
    spec.check_lengths(params, x)?;
    readout(spec, &spec.plan(), params, x, None, shots, seed)
}

/// Prediction together with its derivatives in the parameters and in the
/// inputs, all by the ±π/2 shift rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Jacobian<T> {
    pub value: T,
    pub d_params: Vec<T>,
    pub d_input: Vec<T>,
    /// Circuits executed to produce this.
    pub evaluations: u64,
}

/// Circuits [`jacobian`] runs for one call on `spec`.
pub fn jacobian_cost(spec: &AnsatzSpec) -> u64 {
    let rotations = spec
        .plan()
        .iter()
        .filter(|p| matches!(p, PlanOp::Rot { .. }))
        .count();
    1 + 2 * rotations as u64
}

pub fn jacobian<T: Real>(
    spec: &AnsatzSpec,
    params: &[T],
    x: &[T],
    shots: u64,
    seed: u64,
) -> Result<Jacobian<T>> {
    spec.check_lengths(params, x)?;
    let plan = spec.plan();
    let value = readout(spec, &plan, params, x, None, shots, derive_seed(seed, &[0]))?;
    let mut d_params = vec![T::zero(); spec.n_params()];
    let mut d_input = vec![T::zero(); x.len()];
    let mut evaluations = 1;
    let half_pi = T::FRAC_PI_2();
    let half = T::lit(0.5);
    for (k, op) in plan.iter().enumerate() {
        let PlanOp::Rot { source, .. } = *op else {
            continue;
        };
        let kk = k as u64 + 1;
        let plus = readout(
            spec,
            &plan,
            params,
            x,
            Some((k, half_pi)),
            shots,
            derive_seed(seed, &[kk, 0]),
        )?;
        let minus = readout(
            spec,
            &plan,
            params,
            x,
            Some((k, -half_pi)),
            shots,
            derive_seed(seed, &[kk, 1]),
        )?;
        evaluations += 2;
        let d_angle = (plus - minus) * half;
        match source {
            AngleSource::Param(s) => d_params[s] += d_angle,
            AngleSource::Input(i) => {
                // d/dx 2·atan(x) = 2 / (1 + x²)
                d_input[i] += d_angle * T::lit(2.0) / (T::one() + x[i] * x[i]);
            }
        }
    }
    Ok(Jacobian {
        value,
        d_params,
        d_input,
        evaluations,
    })
}

fn check_data<T: Real>(data: &[TrainingSample<T>]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    Ok(())
}

/// Mean squared error of the readout against the targets.
pub fn cost_mse<T: Real>(
    spec: &AnsatzSpec,
    params: &[T],
    data: &[TrainingSample<T>],
    shots: u64,
    seed: u64,
) -> Result<T> {
    check_data(data)?;
    let plan = spec.plan();
    let residuals = data
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            spec.check_lengths(params, &s.x)?;
            let p = readout(
                spec,
                &plan,
                params,
                &s.x,
                None,
                shots,
                derive_seed(seed, &[i as u64]),
            )?;
            Ok(p - s.y)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(residuals.iter().map(|r| *r * *r).sum::<T>() / T::lit(data.len() as f64))
}

/// ∂MSE/∂θ_k.
pub fn gradient<T: Real>(
    spec: &AnsatzSpec,
    params: &[T],
    data: &[TrainingSample<T>],
    mode: GradientMode,
    shots: u64,
    seed: u64,
) -> Result<Vec<T>> {
    check_data(data)?;
    let plan = spec.plan();
    let per_sample = data
        .par_iter()
        .enumerate()
        .map(|(i, s)| -> Result<Vec<T>> {
            spec.check_lengths(params, &s.x)?;
            let seed = derive_seed(seed, &[i as u64]);
            let (value, d) = match mode {
                GradientMode::ParameterShift => {
                    let j = jacobian(spec, params, &s.x, shots, seed)?;
                    (j.value, j.d_params)
                }
                GradientMode::CentralDifference => {
                    let h = T::lit(CENTRAL_DIFFERENCE_STEP);
                    let value = readout(
                        spec,
                        &plan,
                        params,
                        &s.x,
                        None,
                        shots,
                        derive_seed(seed, &[0]),
                    )?;
                    let mut theta = params.to_vec();
                    let mut d = Vec::with_capacity(params.len());
                    for k in 0..params.len() {
                        let kk = k as u64 + 1;
                        theta[k] = params[k] + h;
                        let plus = readout(
                            spec,
                            &plan,
                            &theta,
                            &s.x,
                            None,
                            shots,
                            derive_seed(seed, &[kk, 0]),
                        )?;
                        theta[k] = params[k] - h;
                        let minus = readout(
                            spec,
                            &plan,
                            &theta,
                            &s.x,
                            None,
                            shots,
                            derive_seed(seed, &[kk, 1]),
                        )?;
                        theta[k] = params[k];
                        d.push((plus - minus) / (h + h));
                    }
                    (value, d)
                }
            };
            let r = value - s.y;
            Ok(d.into_iter().map(|g| r * g).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = T::lit(2.0) / T::lit(data.len() as f64);
    let mut grad = vec![T::zero(); params.len()];
    for sample in per_sample {
        for (g, v) in grad.iter_mut().zip(sample) {
            *g += v;
        }
    }
    Ok(grad.into_iter().map(|g| g * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::GateKind;
    use crate::variational::{Encoding, Entangler, Layer, Rotation};

    fn single_rx() -> AnsatzSpec {
        AnsatzSpec::new(
            1,
            vec![Layer {
                rotations: vec![Rotation {
                    kind: GateKind::Rx,
                    wire: 0,
                    slot: 0,
                }],
                entangler: Entangler::None,
            }],
            Encoding::None,
        )
        .unwrap()
    }

    #[test]
    fn bare_register_reads_plus_one() {
        let spec = AnsatzSpec::hardware_efficient(2, 0, Encoding::None).unwrap();
        assert_eq!(predict::<f64>(&spec, &[], &[], 0, 0).unwrap(), 1.0);
    }

    #[test]
    fn single_rx_is_cosine() {
        let spec = single_rx();
        for k in 0..20 {
            let theta = -3.0 + 0.3 * k as f64;
            assert!((predict(&spec, &[theta], &[], 0, 0).unwrap() - theta.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn mse_examples() {
        let bare = AnsatzSpec::hardware_efficient(1, 0, Encoding::None).unwrap();
        let one = vec![TrainingSample::new(vec![], 0.0).unwrap()];
        assert_eq!(cost_mse::<f64>(&bare, &[], &one, 0, 0).unwrap(), 1.0);
        // residuals +0.5 and -0.5 around the readout +1
        let two = vec![
            TrainingSample::new(vec![], 0.5).unwrap(),
            TrainingSample::new(vec![], 1.0).unwrap(),
        ];
        let spec = single_rx();
        let theta = 1.4_f64;
        let c = theta.cos();
        let data = vec![
            TrainingSample::new(vec![], c - 0.5).unwrap(),
            TrainingSample::new(vec![], c + 0.5).unwrap(),
        ];
        assert!((cost_mse(&spec, &[theta], &data, 0, 0).unwrap() - 0.25).abs() < 1e-15);
        assert!((cost_mse::<f64>(&bare, &[], &two, 0, 0).unwrap() - 0.125).abs() < 1e-15);
        assert!(matches!(
            cost_mse::<f64>(&bare, &[], &[], 0, 0),
            Err(Error::Empty("dataset"))
        ));
        let exact = predict(&spec, &[theta], &[], 0, 0).unwrap();
        let fit = vec![TrainingSample::new(vec![], exact).unwrap()];
        assert_eq!(cost_mse(&spec, &[theta], &fit, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn target_range_enforced() {
        assert!(TrainingSample::new(vec![0.0], 1.5_f64).is_err());
        assert!(TrainingSample::new(vec![0.0], f64::NAN).is_err());
    }

    #[test]
    fn closed_form_gradients() {
        let spec = single_rx();
        let data = vec![TrainingSample::new(vec![], 0.0).unwrap()];
        for mode in [
            GradientMode::ParameterShift,
            GradientMode::CentralDifference,
        ] {
            let g = gradient(&spec, &[std::f64::consts::FRAC_PI_2], &data, mode, 0, 0).unwrap();
            assert!(g[0].abs() < 1e-9, "{mode:?} {g:?}");
            let g = gradient(&spec, &[0.0], &data, mode, 0, 0).unwrap();
            assert!(g[0].abs() < 1e-12);
            let theta = 0.9_f64;
            let g = gradient(&spec, &[theta], &data, mode, 0, 0).unwrap();
            let expected = 2.0 * theta.cos() * -theta.sin();
            assert!((g[0] - expected).abs() < 1e-9);
        }
        let j = jacobian(&spec, &[std::f64::consts::FRAC_PI_2], &[], 0, 0).unwrap();
        assert!((j.d_params[0] + 1.0).abs() < 1e-14);
        assert_eq!(j.evaluations, jacobian_cost(&spec));
    }

    #[test]
    fn input_derivative_matches_closed_form() {
        // H then Ry(2 atan x) on |0⟩: ⟨Z⟩ = -sin(2 atan x) = -2x / (1 + x²)
        let spec = AnsatzSpec::hardware_efficient(1, 0, Encoding::PerWire).unwrap();
        for x in [-2.0, -0.3, 0.0, 0.7, 1.5_f64] {
            let j = jacobian(&spec, &[], &[x], 0, 0).unwrap();
            let v = -2.0 * x / (1.0 + x * x);
            let dv = -2.0 * (1.0 - x * x) / (1.0 + x * x).powi(2);
            assert!((j.value - v).abs() < 1e-14);
            assert!((j.d_input[0] - dv).abs() < 1e-13);
        }
    }
}
