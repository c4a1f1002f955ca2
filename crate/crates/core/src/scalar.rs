//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar the simulator and the models are generic over.
///
/// Implemented for `f32` and `f64`. The crate-root aliases fix `f64`, which
/// is what every stated tolerance assumes.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Tolerance for norm and unitarity checks at this precision.
    const NORM_TOL: f64;

    /// Converts an `f64` literal. Total for every finite input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn norm_tol() -> Self {
        Self::lit(Self::NORM_TOL)
    }
}

impl Real for f64 {
    const NORM_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const NORM_TOL: f64 = 1e-5;
}

/// Logistic function.
#[inline]
pub fn sigmoid<T: Real>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

/// Hyperbolic tangent; a named free function so the LSTM code reads like the math.
#[inline]
pub fn tanh<T: Real>(x: T) -> T {
    x.tanh()
}
