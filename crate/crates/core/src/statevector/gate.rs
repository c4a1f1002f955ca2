use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A 2x2 unitary, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2<T: Real> {
    m: [[Complex<T>; 2]; 2],
}

impl<T: Real> Unitary2<T> {
    pub fn new(m00: Complex<T>, m01: Complex<T>, m10: Complex<T>, m11: Complex<T>) -> Result<Self> {
        let u = Self {
            m: [[m00, m01], [m10, m11]],
        };
        let deviation = u.unitarity_deviation();
        if !(deviation <= T::norm_tol()) {
            return Err(Error::NotUnitary {
                deviation: deviation.to_f64_lossy(),
            });
        }
        Ok(u)
    }

    /// Only for matrices that are unitary by construction.
    pub(crate) fn from_entries(m: [[Complex<T>; 2]; 2]) -> Self {
        Self { m }
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.m[row][col]
    }

    pub fn entries(&self) -> [[Complex<T>; 2]; 2] {
        self.m
    }

    pub fn identity() -> Self {
        let (o, z) = (
            Complex::new(T::one(), T::zero()),
            Complex::new(T::zero(), T::zero()),
        );
        Self::from_entries([[o, z], [z, o]])
    }

    /// diag(1, e^{i angle}).
    pub fn phase(angle: T) -> Self {
        let (o, z) = (
            Complex::new(T::one(), T::zero()),
            Complex::new(T::zero(), T::zero()),
        );
        Self::from_entries([[o, z], [z, Complex::from_polar(T::one(), angle)]])
    }

    pub fn dagger(&self) -> Self {
        let m = self.m;
        Self::from_entries([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        let (a, b) = (self.m, rhs.m);
        let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Self::from_entries(out)
    }

    /// max_{jk} |(U^dagger U - I)_{jk}|
    pub fn unitarity_deviation(&self) -> T {
        let p = self.dagger().matmul(self);
        let mut worst = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                let target = if r == c { T::one() } else { T::zero() };
                let d = (p.m[r][c] - Complex::new(target, T::zero())).norm();
                if !(d <= worst) {
                    worst = d;
                }
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    S,
    T,
    X,
    Z,
    Rx,
    Ry,
    Rz,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
        }
    }
}

/// Builds a catalog gate. Rotations use the half-angle convention
/// `R_a(theta) = exp(-i theta A / 2)`.
pub fn standard_gate<T: Real>(kind: GateKind, angle: Option<T>) -> Result<Unitary2<T>> {
    let c = |re: f64, im: f64| Complex::new(T::lit(re), T::lit(im));
    let name = kind.name();
    let angle = match (kind.is_rotation(), angle) {
        (true, Some(a)) => a,
        (true, None) => {
            return Err(Error::GateAngle {
                gate: name,
                detail: "requires an angle",
            })
        }
        (false, Some(_)) => {
            return Err(Error::GateAngle {
                gate: name,
                detail: "takes no angle",
            })
        }
        (false, None) => T::zero(),
    };
    if !angle.is_finite() {
        return Err(Error::NonFinite("rotation angle"));
    }
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let half = angle / T::lit(2.0);
    let (cos, sin) = (half.cos(), half.sin());
    let m = match kind {
        GateKind::H => {
            let r = T::FRAC_1_SQRT_2();
            let (p, n) = (Complex::new(r, T::zero()), Complex::new(-r, T::zero()));
            [[p, p], [p, n]]
        }
        GateKind::S => [[one, zero], [zero, c(0.0, 1.0)]],
        GateKind::T => [
            [one, zero],
            [zero, Complex::from_polar(T::one(), T::FRAC_PI_4())],
        ],
        GateKind::X => [[zero, one], [one, zero]],
        GateKind::Z => [[one, zero], [zero, c(-1.0, 0.0)]],
        GateKind::Rx => {
            let (cc, ms) = (Complex::new(cos, T::zero()), Complex::new(T::zero(), -sin));
            [[cc, ms], [ms, cc]]
        }
        GateKind::Ry => {
            let (cc, s) = (Complex::new(cos, T::zero()), Complex::new(sin, T::zero()));
            [[cc, -s], [s, cc]]
        }
        GateKind::Rz => [
            [Complex::from_polar(T::one(), -half), zero],
            [zero, Complex::from_polar(T::one(), half)],
        ],
    };
    Unitary2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

/// A (possibly multi-controlled) single-target gate.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp<T: Real> {
    pub gate: Unitary2<T>,
    pub target: usize,
    pub controls: Vec<usize>,
}

impl<T: Real> GateOp<T> {
    pub fn new(gate: Unitary2<T>, target: usize, controls: Vec<usize>) -> Result<Self> {
        let op = Self {
            gate,
            target,
            controls,
        };
        op.check_distinct()?;
        Ok(op)
    }

    pub fn single(gate: Unitary2<T>, target: usize) -> Self {
        Self {
            gate,
            target,
            controls: Vec::new(),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        Self::new(standard_gate(GateKind::X, None)?, target, vec![control])
    }

    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Result<Self> {
        Self::new(standard_gate(GateKind::X, None)?, target, vec![c0, c1])
    }

    fn check_distinct(&self) -> Result<()> {
        for (k, &c) in self.controls.iter().enumerate() {
            if c == self.target || self.controls[..k].contains(&c) {
                return Err(Error::QubitCollision(c));
            }
        }
        Ok(())
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        self.check_distinct()?;
        for &q in std::iter::once(&self.target).chain(&self.controls) {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
            }
        }
        Ok(())
    }

    pub(crate) fn control_mask(&self) -> usize {
        self.controls.iter().fold(0, |m, &c| m | (1 << c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angle_presence_is_checked() {
        assert!(standard_gate::<f64>(GateKind::Rx, None).is_err());
        assert!(standard_gate::<f64>(GateKind::H, Some(1.0)).is_err());
        assert!(standard_gate::<f64>(GateKind::Ry, Some(f64::NAN)).is_err());
    }

    #[test]
    fn zero_rotation_is_identity() {
        for kind in [GateKind::Rx, GateKind::Ry, GateKind::Rz] {
            let u = standard_gate(kind, Some(0.0_f64)).unwrap();
            assert_eq!(u, Unitary2::identity());
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        assert!(matches!(
            Unitary2::new(one, one, zero, one),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn catalog_is_unitary() {
        for kind in [
            GateKind::H,
            GateKind::S,
            GateKind::T,
            GateKind::X,
            GateKind::Z,
        ] {
            assert!(
                standard_gate::<f64>(kind, None)
                    .unwrap()
                    .unitarity_deviation()
                    <= 1e-15
            );
        }
        for k in 0..50 {
            let a = -PI + 0.13 * k as f64;
            for kind in [GateKind::Rx, GateKind::Ry, GateKind::Rz] {
                assert!(standard_gate(kind, Some(a)).unwrap().unitarity_deviation() <= 1e-15);
            }
        }
    }

    #[test]
    fn controls_must_not_hit_target() {
        let x = standard_gate::<f64>(GateKind::X, None).unwrap();
        assert!(matches!(
            GateOp::new(x, 1, vec![1]),
            Err(Error::QubitCollision(1))
        ));
        assert!(matches!(
            GateOp::new(x, 0, vec![2, 2]),
            Err(Error::QubitCollision(2))
        ));
        let op = GateOp::new(x, 0, vec![3]).unwrap();
        assert!(matches!(
            op.validate(3),
            Err(Error::QubitOutOfRange { qubit: 3, .. })
        ));
    }
}
