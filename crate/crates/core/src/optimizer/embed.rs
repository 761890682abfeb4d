//! Hermitian-to-real-symmetric embedding for conic solvers that only accept
//! real PSD cones.
//!
//! A Hermitian `A = P + jQ` maps to the symmetric `[[P, -Q], [Q, P]]` of
//! doubled dimension. The embedding preserves definiteness, doubles traces
//! and eigenvalue multiplicities, and carries linear functionals as
//! `Re Tr(B^H A) = 1/2 Tr(embed(B)^T embed(A))`.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::channel::ComplexMatrix;
use crate::error::Result;
use crate::metrics::HermitianMatrix;
use crate::num::Real;

/// Embed a Hermitian matrix as a real symmetric matrix of doubled dimension.
/// Rejects inputs that are not Hermitian within tolerance.
pub fn complex_to_real_embed<T: Real>(a: &ComplexMatrix<T>) -> Result<DMatrix<T>> {
    let a = HermitianMatrix::new(a.clone())?;
    Ok(embed_hermitian(&a))
}

/// Embedding of an already-validated Hermitian matrix.
pub(crate) fn embed_hermitian<T: Real>(a: &HermitianMatrix<T>) -> DMatrix<T> {
    let n = a.dim();
    let m = a.as_matrix();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(n + i, n + j)] = z.re;
            out[(i, n + j)] = -z.im;
            out[(n + i, j)] = z.im;
        }
    }
    out
}

/// Inverse of the embedding for matrices that may have drifted off the
/// embedded subspace (e.g. solver iterates): averages over the subspace
/// symmetry before extracting, which preserves PSD-ness, the trace and every
/// embedded linear functional.
pub fn real_to_complex_extract<T: Real>(b: &DMatrix<T>) -> Result<HermitianMatrix<T>> {
    let side = b.nrows();
    if side % 2 != 0 || b.ncols() != side {
        return Err(crate::error::Error::dim("real embedding", side, b.ncols()));
    }
    let n = side / 2;
    let half = T::of(0.5);
    let quarter = T::of(0.25);
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // symmetrized real part from the two diagonal blocks
            let re = (b[(i, j)] + b[(j, i)] + b[(n + i, n + j)] + b[(n + j, n + i)]) * quarter;
            // antisymmetrized imaginary part from the off-diagonal blocks
            let im = (b[(n + i, j)] - b[(i, n + j)]) * half;
            out[(i, j)] = Complex::new(re, im);
        }
    }
    HermitianMatrix::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix<f64> {
        let raw = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&raw + raw.adjoint()) * Complex::new(0.5, 0.0)
    }

    #[test]
    fn identity_embeds_to_identity() {
        let eye = ComplexMatrix::<f64>::identity(3, 3);
        let e = complex_to_real_embed(&eye).unwrap();
        assert_relative_eq!((e - DMatrix::<f64>::identity(6, 6)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pauli_y_eigenvalues_double() {
        // [[0, -j], [j, 0]] has eigenvalues {1, -1}; the embedding doubles
        // them to {1, 1, -1, -1}.
        let mut a = ComplexMatrix::<f64>::zeros(2, 2);
        a[(0, 1)] = Complex::new(0.0, -1.0);
        a[(1, 0)] = Complex::new(0.0, 1.0);
        let e = complex_to_real_embed(&a).unwrap();
        let mut eigs: Vec<f64> =
            nalgebra::SymmetricEigen::new(e).eigenvalues.iter().cloned().collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let expected = [-1.0, -1.0, 1.0, 1.0];
        for (got, want) in eigs.iter().zip(expected.iter()) {
            assert_relative_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn random_psd_embeds_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let g = random_hermitian(&mut rng, 4);
            let psd = &g * g.adjoint(); // Hermitian PSD
            let e = complex_to_real_embed(&psd).unwrap();
            let min_eig = nalgebra::SymmetricEigen::new(e)
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            assert!(min_eig >= -1e-10, "min eigenvalue {min_eig}");
        }
    }

    #[test]
    fn trace_doubles_and_functionals_halve() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let a = random_hermitian(&mut rng, 5);
        let b = random_hermitian(&mut rng, 5);
        let ea = complex_to_real_embed(&a).unwrap();
        let eb = complex_to_real_embed(&b).unwrap();
        assert_relative_eq!(ea.trace(), 2.0 * a.trace().re, epsilon = 1e-12);
        let functional = (b.adjoint() * &a).trace().re;
        let embedded = 0.5 * (eb.transpose() * &ea).trace();
        assert_relative_eq!(functional, embedded, max_relative = 1e-12);
    }

    #[test]
    fn extract_inverts_embed() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let a = random_hermitian(&mut rng, 4);
        let e = complex_to_real_embed(&a).unwrap();
        let back = real_to_complex_extract(&e).unwrap();
        assert_relative_eq!((back.as_matrix() - &a).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut a = ComplexMatrix::<f64>::zeros(2, 2);
        a[(0, 1)] = Complex::new(1.0, 0.0);
        assert!(complex_to_real_embed(&a).is_err());
    }
}
