//! Symmetric-matrix vectorization.
//!
//! Symmetric matrices are stored as `svec` vectors: upper triangle in
//! column-major order with off-diagonal entries scaled by sqrt(2), so that
//! `svec(A) . svec(B) = <A, B>_F`.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Scalar;

/// Length of the svec representation of an `n x n` symmetric matrix.
pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Matrix side for a given svec length. Panics if `len` is not triangular.
pub fn svec_side(len: usize) -> usize {
    let n = ((((8 * len + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    assert_eq!(svec_len(n), len, "svec length {len} is not triangular");
    n
}

/// Pack a symmetric matrix into svec form. Uses the upper triangle only.
pub fn svec<T: Scalar>(m: &DMatrix<T>) -> DVector<T> {
    let n = m.nrows();
    assert_eq!(m.ncols(), n);
    let sqrt2 = T::c(std::f64::consts::SQRT_2);
    let mut out = DVector::zeros(svec_len(n));
    let mut idx = 0;
    for j in 0..n {
        for i in 0..=j {
            out[idx] = if i == j { m[(i, j)] } else { m[(i, j)] * sqrt2 };
            idx += 1;
        }
    }
    out
}

/// Unpack an svec vector into a dense symmetric matrix.
pub fn smat<T: Scalar>(s: &DVector<T>, n: usize) -> DMatrix<T> {
    assert_eq!(s.len(), svec_len(n));
    let inv_sqrt2 = T::c(std::f64::consts::FRAC_1_SQRT_2);
    let mut out = DMatrix::zeros(n, n);
    let mut idx = 0;
    for j in 0..n {
        for i in 0..=j {
            let v = s[idx];
            if i == j {
                out[(i, j)] = v;
            } else {
                let w = v * inv_sqrt2;
                out[(i, j)] = w;
                out[(j, i)] = w;
            }
            idx += 1;
        }
    }
    out
}

/// Map second-order-cone coordinates `(t, x1, x2)` to the svec coordinates of
/// the equivalent 2x2 symmetric block.
///
/// The spin-factor algebra of the 3-dimensional second-order cone is
/// isomorphic to 2x2 real symmetric matrices via
/// `M(t, x) = [[t + x1, x2], [x2, t - x1]] / sqrt(2)`,
/// which preserves inner products and maps the cone onto the PSD cone.
pub fn soc3_to_svec<T: Scalar>(u: &[T]) -> DVector<T> {
    assert_eq!(u.len(), 3);
    let inv_sqrt2 = T::c(std::f64::consts::FRAC_1_SQRT_2);
    DVector::from_vec(vec![
        (u[0] + u[1]) * inv_sqrt2,
        u[2],
        (u[0] - u[1]) * inv_sqrt2,
    ])
}

/// Inverse of [`soc3_to_svec`].
pub fn svec_to_soc3<T: Scalar>(s: &DVector<T>) -> [T; 3] {
    assert_eq!(s.len(), 3);
    let inv_sqrt2 = T::c(std::f64::consts::FRAC_1_SQRT_2);
    [
        (s[0] + s[2]) * inv_sqrt2,
        (s[0] - s[2]) * inv_sqrt2,
        s[1],
    ]
}
