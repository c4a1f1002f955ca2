//! Parameterized circuits, the MSE cost over Z readouts, shift-rule
//! gradients and a gradient-descent trainer.

mod ansatz;
mod eval;
mod train;

pub use ansatz::{bind, encoding_angle, AnsatzSpec, Encoding, Entangler, Layer, Rotation};
pub use eval::{
    cost_mse, gradient, jacobian, jacobian_cost, predict, GradientMode, Jacobian, TrainingSample,
    CENTRAL_DIFFERENCE_STEP,
};
pub use train::{
    activation_dataset, fit_activation, initial_params, read_samples_csv, train, train_from,
    write_samples_csv, ActivationKind, TrainConfig, TrainReport, STOP_TOLERANCE,
};
