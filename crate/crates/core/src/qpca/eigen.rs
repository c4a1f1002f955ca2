use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricEigen<T> {
    /// Descending.
    pub values: Vec<T>,
    /// `vectors[k]` belongs to `values[k]`; unit norm, largest-magnitude
    /// component positive.
    pub vectors: Vec<Vec<T>>,
}

/// Cyclic Jacobi rotations on a row-major `n x n` symmetric matrix.
pub fn symmetric_eigen<T: Real>(matrix: &[T], n: usize) -> Result<SymmetricEigen<T>> {
    if n == 0 {
        return Err(Error::Empty("matrix"));
    }
    if matrix.len() != n * n {
        return Err(Error::LengthMismatch {
            what: "symmetric matrix entries",
            expected: n * n,
            got: matrix.len(),
        });
    }
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    let mut a = matrix.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let scale = a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let tol = T::epsilon() * scale * T::lit(1e-2);
    for _ in 0..MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |m, (i, j)| m.max(a[i * n + j].abs()));
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= tol {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut pairs: Vec<(T, Vec<T>)> = (0..n)
        .map(|k| {
            let mut col: Vec<T> = (0..n).map(|r| v[r * n + k]).collect();
            let lead = col
                .iter()
                .fold(T::zero(), |m, &x| if x.abs() > m.abs() { x } else { m });
            if lead < T::zero() {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            (a[k * n + k], col)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("finite eigenvalues"));
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(SymmetricEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_is_sorted_descending() {
        let e = symmetric_eigen(&[1.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 2.0], 3).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        assert_eq!(e.vectors[0], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_by_two_by_hand() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1 with vectors (1,1)/√2, (1,-1)/√2
        let e = symmetric_eigen(&[2.0_f64, 1.0, 1.0, 2.0], 2).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.vectors[0][0] - r).abs() < 1e-14 && (e.vectors[0][1] - r).abs() < 1e-14);
        assert!((e.vectors[1][0].abs() - r).abs() < 1e-14);
        assert!((e.vectors[1][0] + e.vectors[1][1]).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(symmetric_eigen::<f64>(&[], 0).is_err());
        assert!(symmetric_eigen(&[1.0, 2.0, 3.0], 2).is_err());
        assert!(symmetric_eigen(&[f64::NAN], 1).is_err());
    }
}
