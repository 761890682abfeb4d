//! Closed-form rank-one beamformer recovery from the lifted solution.

use num_complex::Complex;
use num_traits::Float;

use crate::channel::ComplexVector;
use crate::error::{Error, Result};
use crate::metrics::HermitianMatrix;
use crate::num::Real;

use super::formulation::DesignProblem;
use super::{BeamformingSolution, RelaxedSolution};

/// Relative floor below which the lifted matrix is considered to carry no
/// power toward the user.
const DEGENERATE_FLOOR: f64 = 1e-12;

/// PSD eigenvalue floor (relative to the Frobenius norm) accepted for the
/// adjusted sensing covariance.
const PSD_FLOOR: f64 = 1e-7;

/// Extract `f = (h^T F h*)^{-1/2} F h*`. The construction guarantees
/// `f f^H <= F` and `|h^T f|^2 = h^T F h*`.
pub fn recover_rank_one<T: Real>(
    f_lifted: &HermitianMatrix<T>,
    h: &ComplexVector<T>,
) -> Result<ComplexVector<T>> {
    let power = f_lifted.quadratic_form(h)?;
    let scale = f_lifted.frobenius_norm() * h.norm_squared();
    if power <= T::of(DEGENERATE_FLOOR) * Float::max(scale, T::of(f64::MIN_POSITIVE)) {
        return Err(Error::DegenerateUser { user: 0 });
    }
    let fh = f_lifted.as_matrix() * h.map(|z| z.conj());
    let inv_sqrt = Complex::new(T::one() / Float::sqrt(power), T::zero());
    Ok(fh * inv_sqrt)
}

/// Adjusted sensing covariance `R~_s = R_s + sum_k (F_k - f_k f_k^H)`,
/// preserving the total transmit covariance. Errors if the result drifts
/// outside the PSD cone beyond the numerical floor.
pub fn residual_sensing_cov<T: Real>(
    sensing: &HermitianMatrix<T>,
    lifted: &[HermitianMatrix<T>],
    beamformers: &[ComplexVector<T>],
) -> Result<HermitianMatrix<T>> {
    if lifted.len() != beamformers.len() {
        return Err(Error::dim("residual sensing covariance", lifted.len(), beamformers.len()));
    }
    let mut adjusted = sensing.clone();
    for (f_mat, f_vec) in lifted.iter().zip(beamformers.iter()) {
        adjusted = adjusted.add(&f_mat.sub(&HermitianMatrix::from_outer(f_vec)));
    }
    let min_eig = adjusted.min_eigenvalue();
    let floor = -T::of(PSD_FLOOR) * Float::max(adjusted.frobenius_norm(), T::one());
    if min_eig < floor {
        return Err(Error::Reconstruction(format!(
            "adjusted sensing covariance indefinite: min eigenvalue {:.3e}",
            min_eig.to_f64()
        )));
    }
    Ok(adjusted)
}

/// Recover a full rank-one solution from the relaxed one. Users whose lifted
/// matrix carries no power (possible only without a rate floor) get a zero
/// beamformer, with the whole matrix folded into the sensing covariance.
pub fn recover_solution<T: Real>(
    relaxed: &RelaxedSolution<T>,
    problem: &DesignProblem<T>,
) -> Result<BeamformingSolution<T>> {
    let n = relaxed.sensing_cov.dim();
    let mut beamformers = Vec::with_capacity(relaxed.lifted.len());
    for (k, f_mat) in relaxed.lifted.iter().enumerate() {
        match recover_rank_one(f_mat, &problem.user_channels[k]) {
            Ok(f) => beamformers.push(f),
            Err(Error::DegenerateUser { .. }) => {
                if problem.rate_floors[k].is_some() {
                    return Err(Error::DegenerateUser { user: k });
                }
                beamformers.push(ComplexVector::zeros(n));
            }
            Err(e) => return Err(e),
        }
    }
    let sensing_cov = residual_sensing_cov(&relaxed.sensing_cov, &relaxed.lifted, &beamformers)?;
    Ok(BeamformingSolution {
        beamformers,
        sensing_cov,
        total: relaxed.total.clone(),
        objective: relaxed.objective,
        status: relaxed.status,
        diagnostics: relaxed.diagnostics.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cvec(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector<f64> {
        ComplexVector::from_fn(n, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> HermitianMatrix<f64> {
        let mut acc = HermitianMatrix::zeros(n);
        for _ in 0..rank {
            acc = acc.add(&HermitianMatrix::from_outer(&random_cvec(rng, n)));
        }
        acc
    }

    fn transpose_inner(h: &ComplexVector<f64>, f: &ComplexVector<f64>) -> Complex<f64> {
        h.iter().zip(f.iter()).map(|(a, b)| a * b).sum()
    }

    #[test]
    fn exact_rank_one_recovers_up_to_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let f = random_cvec(&mut rng, 5);
        let h = random_cvec(&mut rng, 5);
        let lifted = HermitianMatrix::from_outer(&f);
        let rec = recover_rank_one(&lifted, &h).unwrap();
        assert_relative_eq!(
            transpose_inner(&h, &rec).norm(),
            transpose_inner(&h, &f).norm(),
            max_relative = 1e-12
        );
        let diff = HermitianMatrix::from_outer(&rec).sub(&lifted).frobenius_norm();
        assert!(diff < 1e-9 * lifted.frobenius_norm().max(1.0), "residual {diff}");
    }

    #[test]
    fn identity_lifted_basis_channel() {
        let h = ComplexVector::from_vec(vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]);
        let rec = recover_rank_one(&HermitianMatrix::identity(2), &h).unwrap();
        assert_relative_eq!(rec[0].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(rec[0].im, 0.0, epsilon = 1e-12);
        assert_relative_eq!(rec[1].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn random_psd_satisfies_recovery_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..50 {
            let n = 6;
            let f_mat = random_psd(&mut rng, n, 3);
            let h = random_cvec(&mut rng, n);
            let f = recover_rank_one(&f_mat, &h).unwrap();
            // |h^T f|^2 = h^T F h*
            assert_relative_eq!(
                transpose_inner(&h, &f).norm_sqr(),
                f_mat.quadratic_form(&h).unwrap(),
                max_relative = 1e-10
            );
            // f f^H <= F
            let gap = f_mat.sub(&HermitianMatrix::from_outer(&f));
            let floor = -1e-10 * f_mat.frobenius_norm().max(1.0);
            assert!(gap.min_eigenvalue() >= floor, "min eig {}", gap.min_eigenvalue());
        }
    }

    #[test]
    fn degenerate_power_rejected() {
        let h = ComplexVector::from_vec(vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]);
        let mut dark = ComplexVector::zeros(2);
        dark[1] = Complex::new(1.0, 0.0);
        let lifted = HermitianMatrix::from_outer(&dark); // no power toward h
        assert!(matches!(
            recover_rank_one(&lifted, &h),
            Err(Error::DegenerateUser { .. })
        ));
    }

    #[test]
    fn residual_cov_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        // all lifted matrices already rank-one: residual equals R_s
        let f = random_cvec(&mut rng, 4);
        let h = random_cvec(&mut rng, 4);
        let r_s = random_psd(&mut rng, 4, 2);
        let lifted = vec![HermitianMatrix::from_outer(&f)];
        let rec = recover_rank_one(&lifted[0], &h).unwrap();
        let adjusted = residual_sensing_cov(&r_s, &lifted, &[rec]).unwrap();
        assert!(adjusted.sub(&r_s).frobenius_norm() < 1e-9);

        // R_s = 0, F = I, h = e1: residual is I - e1 e1^T
        let e1 = ComplexVector::from_vec(vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]);
        let adjusted = residual_sensing_cov(
            &HermitianMatrix::zeros(2),
            &[HermitianMatrix::identity(2)],
            &[recover_rank_one(&HermitianMatrix::identity(2), &e1).unwrap()],
        )
        .unwrap();
        let expected = HermitianMatrix::identity(2).sub(&HermitianMatrix::from_outer(&e1));
        assert!(adjusted.sub(&expected).frobenius_norm() < 1e-12);
    }

    #[test]
    fn residual_cov_preserves_total_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let n = 5;
        let lifted = vec![random_psd(&mut rng, n, 2), random_psd(&mut rng, n, 3)];
        let hs = vec![random_cvec(&mut rng, n), random_cvec(&mut rng, n)];
        let r_s = random_psd(&mut rng, n, 2);
        let fs: Vec<_> = lifted
            .iter()
            .zip(hs.iter())
            .map(|(fm, h)| recover_rank_one(fm, h).unwrap())
            .collect();
        let adjusted = residual_sensing_cov(&r_s, &lifted, &fs).unwrap();
        let lhs = adjusted.trace() + fs.iter().map(|f| f.norm_squared()).sum::<f64>();
        let rhs = r_s.trace() + lifted.iter().map(|f| f.trace()).sum::<f64>();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
    }
}
