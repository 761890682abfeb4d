//! Communication and sensing figures of merit.
//!
//! Quadratic forms follow the transpose convention used throughout the
//! channel model: scalar forms are `h^T M h*` (conjugation on the right
//! argument), which is real for Hermitian `M`, and cross terms are
//! `h^T M g*`. Powers are linear watts; decibel conversion happens at export
//! boundaries only.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Float;

use crate::channel::{ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};
use crate::num::Real;

/// Absolute floor of the Hermitian deviation check, widened by the matrix
/// magnitude for covariances far from unit scale.
const HERMITIAN_TOL: f64 = 1e-10;

/// A validated Hermitian matrix. Construction projects onto the Hermitian
/// part after checking the deviation is within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T = f64> {
    m: ComplexMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::dim("HermitianMatrix", m.nrows(), m.ncols()));
        }
        let mut deviation = T::zero();
        let mut max_abs = T::zero();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                deviation = Float::max(deviation, (m[(i, j)] - m[(j, i)].conj()).norm());
                max_abs = Float::max(max_abs, m[(i, j)].norm());
            }
        }
        let tol = T::of(HERMITIAN_TOL) * Float::max(T::one(), max_abs);
        if deviation > tol {
            return Err(Error::NotHermitian { deviation: deviation.to_f64() });
        }
        let half = Complex::new(T::of(0.5), T::zero());
        let projected = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
            (m[(i, j)] + m[(j, i)].conj()) * half
        });
        Ok(Self { m: projected })
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: DMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: DMatrix::identity(n, n) }
    }

    /// Rank-one outer product `v v^H`.
    pub fn from_outer(v: &ComplexVector<T>) -> Self {
        let n = v.len();
        Self { m: DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.m
    }

    /// Trace, real by symmetry.
    pub fn trace(&self) -> T {
        self.m.diagonal().iter().map(|z| z.re).fold(T::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        Float::sqrt(self.m.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b))
    }

    /// Smallest eigenvalue (Hermitian eigendecomposition).
    pub fn min_eigenvalue(&self) -> T {
        if self.dim() == 0 {
            return T::zero();
        }
        let eig = nalgebra::SymmetricEigen::new(self.m.clone());
        eig.eigenvalues.iter().copied().fold(T::of(f64::INFINITY), Float::min)
    }

    /// PSD check with the relative eigenvalue floor `-floor * ||A||_F`.
    pub fn is_psd_within(&self, floor: T) -> bool {
        self.min_eigenvalue() >= -floor * Float::max(self.frobenius_norm(), T::one())
    }

    /// Cross term `a^T M b*`.
    pub fn bilinear(&self, a: &ComplexVector<T>, b: &ComplexVector<T>) -> Result<Complex<T>> {
        if a.len() != self.dim() {
            return Err(Error::dim("bilinear left vector", self.dim(), a.len()));
        }
        if b.len() != self.dim() {
            return Err(Error::dim("bilinear right vector", self.dim(), b.len()));
        }
        let mb = &self.m * b.map(|z| z.conj());
        Ok(a.iter().zip(mb.iter()).map(|(x, y)| x * y).sum())
    }

    /// Real quadratic form `h^T M h*`; the imaginary part is numerical dust
    /// for Hermitian `M`.
    pub fn quadratic_form(&self, h: &ComplexVector<T>) -> Result<T> {
        let v = self.bilinear(h, h)?;
        debug_assert!(
            v.im.to_f64().abs() <= 1e-9 * v.re.to_f64().abs().max(1e-30),
            "quadratic form should be real, got imaginary part {:e}",
            v.im.to_f64()
        );
        Ok(v.re)
    }

    pub fn scale(&self, s: T) -> Self {
        Self { m: &self.m * Complex::new(s, T::zero()) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { m: &self.m - &other.m }
    }
}

/// Per-user and sensing-receiver noise powers, watts.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel<T = f64> {
    user_noise: Vec<T>,
    sensing_noise: T,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(user_noise: Vec<T>, sensing_noise: T) -> Result<Self> {
        if user_noise.iter().any(|&v| v <= T::zero()) || sensing_noise <= T::zero() {
            return Err(Error::InvalidArgument("noise powers must be positive".into()));
        }
        Ok(Self { user_noise, sensing_noise })
    }

    pub fn user(&self, k: usize) -> T {
        self.user_noise[k]
    }

    pub fn users(&self) -> &[T] {
        &self.user_noise
    }

    pub fn sensing(&self) -> T {
        self.sensing_noise
    }
}

/// Communication beamformers, either recovered rank-one vectors or lifted
/// PSD matrices.
#[derive(Debug, Clone)]
pub enum Beamformers<T = f64> {
    RankOne(Vec<ComplexVector<T>>),
    Lifted(Vec<HermitianMatrix<T>>),
}

impl<T: Real> Beamformers<T> {
    pub fn num_users(&self) -> usize {
        match self {
            Beamformers::RankOne(v) => v.len(),
            Beamformers::Lifted(v) => v.len(),
        }
    }

    /// Power the k-th beamformer couples into channel `h`: `|h^T f_k|^2` in
    /// rank-one form, `h^T F_k h*` lifted.
    pub fn coupled_power(&self, h: &ComplexVector<T>, k: usize) -> Result<T> {
        match self {
            Beamformers::RankOne(fs) => {
                let f = &fs[k];
                if f.len() != h.len() {
                    return Err(Error::dim("beamformer", h.len(), f.len()));
                }
                let inner: Complex<T> = h.iter().zip(f.iter()).map(|(a, b)| a * b).sum();
                Ok(inner.norm_sqr())
            }
            Beamformers::Lifted(fs) => fs[k].quadratic_form(h),
        }
    }

    /// Covariance contribution `sum_k f_k f_k^H` (or `sum_k F_k`).
    pub fn covariance(&self, n: usize) -> HermitianMatrix<T> {
        match self {
            Beamformers::RankOne(fs) => fs
                .iter()
                .fold(HermitianMatrix::zeros(n), |acc, f| acc.add(&HermitianMatrix::from_outer(f))),
            Beamformers::Lifted(fs) => {
                fs.iter().fold(HermitianMatrix::zeros(n), |acc, f| acc.add(f))
            }
        }
    }
}

/// A transmit covariance split into communication beamformers and a sensing
/// covariance, with the total `R_x` kept consistent.
#[derive(Debug, Clone)]
pub struct CovarianceDecomposition<T = f64> {
    beamformers: Beamformers<T>,
    sensing: HermitianMatrix<T>,
    total: HermitianMatrix<T>,
}

/// Relative Frobenius tolerance on `R_x = sum_k f_k f_k^H + R_s`.
const COVARIANCE_IDENTITY_TOL: f64 = 1e-8;

impl<T: Real> CovarianceDecomposition<T> {
    /// Build with `R_x` derived from the parts.
    pub fn new(beamformers: Beamformers<T>, sensing: HermitianMatrix<T>) -> Self {
        let total = beamformers.covariance(sensing.dim()).add(&sensing);
        Self { beamformers, sensing, total }
    }

    /// Build with an explicit total, validating the covariance identity.
    pub fn with_total(
        beamformers: Beamformers<T>,
        sensing: HermitianMatrix<T>,
        total: HermitianMatrix<T>,
    ) -> Result<Self> {
        let derived = beamformers.covariance(sensing.dim()).add(&sensing);
        let resid = derived.sub(&total).frobenius_norm();
        let tol = T::of(COVARIANCE_IDENTITY_TOL) * Float::max(T::one(), total.frobenius_norm());
        if resid > tol {
            return Err(Error::InvalidArgument(format!(
                "covariance identity violated: residual {:.3e}",
                resid.to_f64()
            )));
        }
        Ok(Self { beamformers, sensing, total })
    }

    pub fn beamformers(&self) -> &Beamformers<T> {
        &self.beamformers
    }

    pub fn sensing(&self) -> &HermitianMatrix<T> {
        &self.sensing
    }

    pub fn total(&self) -> &HermitianMatrix<T> {
        &self.total
    }

    pub fn num_users(&self) -> usize {
        self.beamformers.num_users()
    }
}

/// SINR of user `k`: own beam power over other beams, sensing leakage and
/// noise, all coupled through the user's channel.
pub fn user_sinr<T: Real>(
    h_k: &ComplexVector<T>,
    decomposition: &CovarianceDecomposition<T>,
    noise_power: T,
    k: usize,
) -> Result<T> {
    if noise_power <= T::zero() {
        return Err(Error::InvalidArgument("noise power must be positive".into()));
    }
    if k >= decomposition.num_users() {
        return Err(Error::InvalidArgument(format!(
            "user index {k} out of range ({} users)",
            decomposition.num_users()
        )));
    }
    let signal = decomposition.beamformers.coupled_power(h_k, k)?;
    let mut interference = T::zero();
    for other in 0..decomposition.num_users() {
        if other != k {
            interference += decomposition.beamformers.coupled_power(h_k, other)?;
        }
    }
    let sensing = Float::max(decomposition.sensing.quadratic_form(h_k)?, T::zero());
    Ok(signal / (interference + sensing + noise_power))
}

/// Shannon rate `log2(1 + eta)` in bps/Hz.
pub fn user_rate<T: Real>(eta: T) -> Result<T> {
    if eta < T::zero() {
        return Err(Error::InvalidArgument("SINR must be nonnegative".into()));
    }
    Ok(Float::log2(T::one() + eta))
}

/// Transmit beampattern gain `h^T R_x h*` toward a point.
pub fn beampattern_gain<T: Real>(h: &ComplexVector<T>, r_x: &HermitianMatrix<T>) -> Result<T> {
    r_x.quadratic_form(h)
}

/// Cross-correlation `|h_l^T R_x h_l'*|` between two sensing directions.
pub fn cross_correlation<T: Real>(
    h_l: &ComplexVector<T>,
    h_lp: &ComplexVector<T>,
    r_x: &HermitianMatrix<T>,
) -> Result<T> {
    Ok(r_x.bilinear(h_l, h_lp)?.norm())
}

/// Rate-constraint factor `xi = 2^r / (2^r - 1)`.
pub fn rate_constraint_factor<T: Real>(r_min: T) -> Result<T> {
    if r_min <= T::zero() {
        return Err(Error::InvalidArgument(
            "minimum rate must be positive for the trace-form constraint".into(),
        ));
    }
    let p = Float::exp2(r_min);
    Ok(p / (p - T::one()))
}

/// Trace-form rate-constraint margin
/// `Tr(h* h^T (xi F_k - R_x)) - sigma^2`; nonnegative iff the rate
/// constraint holds.
pub fn rate_constraint_margin<T: Real>(
    h_k: &ComplexVector<T>,
    f_k: &HermitianMatrix<T>,
    r_x: &HermitianMatrix<T>,
    r_min: T,
    noise_power: T,
) -> Result<T> {
    let xi = rate_constraint_factor(r_min)?;
    let own = f_k.quadratic_form(h_k)?;
    let total = r_x.quadratic_form(h_k)?;
    Ok(xi * own - total - noise_power)
}
