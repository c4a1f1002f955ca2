use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty("matrix"));
        }
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch {
                what: "matrix entries",
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim + col]
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut entries = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                for j in 0..n {
                    entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Self { dim: n, entries }
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let entries = (0..n * n)
            .map(|idx| self.entries[(idx % n) * n + idx / n].conj())
            .collect();
        Self { dim: n, entries }
    }

    /// `A^(2^k)` by repeated squaring.
    pub fn power_of_two(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |m, _| m.matmul(&m))
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, j| {
                    acc + self.entries[i * n + j] * v[j]
                })
            })
            .collect()
    }

    /// Max elementwise `|A†A − I|`.
    pub fn unitarity_deviation(&self) -> T {
        let p = self.dagger().matmul(self);
        let n = self.dim;
        (0..n * n).fold(T::zero(), |m, idx| {
            let target = if idx / n == idx % n {
                T::one()
            } else {
                T::zero()
            };
            m.max((p.entries[idx] - Complex::new(target, T::zero())).norm())
        })
    }

    /// Block-diagonal `A ⊕ I` of size `dim`.
    pub fn padded(&self, dim: usize) -> Self {
        let n = self.dim;
        let mut out = Self::identity(dim.max(n));
        for i in 0..n {
            for j in 0..n {
                out.entries[i * out.dim + j] = self.entries[i * n + j];
            }
        }
        out
    }
}
