//! Spherical-wave (near-field) and planar-wave (far-field) channel models.
//!
//! Channel entries compose an element radiation profile with a free-space
//! path term: entry `n` of a near-field vector is
//! `sqrt(F(d_n, w)) * beta(d_n)` where `d_n` is the displacement between the
//! evaluation point and element `n`, `F` the boresight-gain profile and
//! `beta` the amplitude/phase path factor `lambda / (4 pi r) * e^{-j 2 pi r / lambda}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{angle_between, ArrayGeometry, Vec3};
use crate::num::{Real, SPEED_OF_LIGHT};

/// Complex channel vector; length equals the array's element count.
pub type ComplexVector<T = f64> = DVector<Complex<T>>;

/// Complex channel matrix.
pub type ComplexMatrix<T = f64> = DMatrix<Complex<T>>;

/// Wavelength and element radiation exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModelParams<T = f64> {
    wavelength: T,
    boresight_exponent: T,
}

impl<T: Real> ChannelModelParams<T> {
    /// `b = 2` models dipole elements.
    pub fn new(wavelength: T, boresight_exponent: T) -> Result<Self> {
        if wavelength <= T::zero() || !Float::is_finite(wavelength) {
            return Err(Error::InvalidArgument("wavelength must be positive".into()));
        }
        if boresight_exponent < T::zero() {
            return Err(Error::InvalidArgument("boresight exponent must be nonnegative".into()));
        }
        Ok(Self { wavelength, boresight_exponent })
    }

    /// Derive the wavelength from a carrier frequency in Hz.
    pub fn from_carrier(carrier_hz: T, boresight_exponent: T) -> Result<Self> {
        if carrier_hz <= T::zero() {
            return Err(Error::InvalidArgument("carrier frequency must be positive".into()));
        }
        Self::new(T::of(SPEED_OF_LIGHT) / carrier_hz, boresight_exponent)
    }

    pub fn wavelength(&self) -> T {
        self.wavelength
    }

    pub fn boresight_exponent(&self) -> T {
        self.boresight_exponent
    }
}

/// Which way a channel vector points relative to the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationDirection {
    /// Array radiates toward the point: displacements `point - element`.
    Outgoing,
    /// Point radiates toward the array: displacements `element - point`.
    Incoming,
}

/// Element radiation profile `2 (b + 1) cos^b(psi)` on the forward
/// half-space, zero behind the array plane.
pub fn radiation_profile<T: Real>(p: &Vec3<T>, w: &Vec3<T>, b: T) -> Result<T> {
    let psi = angle_between(p, w)?;
    let cos = Float::cos(psi);
    if cos < T::zero() {
        return Ok(T::zero());
    }
    let two = T::of(2.0);
    Ok(two * (b + T::one()) * Float::powf(Float::max(cos, T::zero()), b))
}

/// Free-space path factor `lambda / (4 pi r) * e^{-j 2 pi r / lambda}`.
pub fn path_gain<T: Real>(p: &Vec3<T>, wavelength: T) -> Result<Complex<T>> {
    let r = p.norm();
    if r <= T::zero() {
        return Err(Error::Singularity("path of zero length (source at element)".into()));
    }
    let four_pi = T::of(4.0) * T::pi();
    let mag = wavelength / (four_pi * r);
    let phase = -T::of(2.0) * T::pi() * r / wavelength;
    Ok(Complex::from_polar(mag, phase))
}

/// Near-field spherical-wave channel between an array and a point.
pub fn nearfield_channel<T: Real>(
    array: &ArrayGeometry<T>,
    point: &Vec3<T>,
    params: &ChannelModelParams<T>,
    direction: PropagationDirection,
) -> Result<ComplexVector<T>> {
    let b = params.boresight_exponent();
    let mut entries = Vec::with_capacity(array.num_elements());
    for element in array.elements() {
        let d = match direction {
            PropagationDirection::Outgoing => point.sub(element),
            PropagationDirection::Incoming => element.sub(point),
        };
        if d.norm() <= T::zero() {
            return Err(Error::Singularity(
                "evaluation point coincides with an array element".into(),
            ));
        }
        let gain = radiation_profile(&d, &array.normal(), b)?;
        let entry = if gain > T::zero() {
            path_gain(&d, params.wavelength())? * Complex::new(Float::sqrt(gain), T::zero())
        } else {
            Complex::new(T::zero(), T::zero())
        };
        entries.push(entry);
    }
    Ok(DVector::from_vec(entries))
}

/// Far-field planar-wave approximation: one common amplitude taken at the
/// array center, per-element phase from the first-order distance expansion
/// `delta_n = r0 - (element - center) . unit(point - center)`.
pub fn farfield_channel<T: Real>(
    array: &ArrayGeometry<T>,
    point: &Vec3<T>,
    params: &ChannelModelParams<T>,
) -> Result<ComplexVector<T>> {
    let d0 = point.sub(&array.center());
    let r0 = d0.norm();
    if r0 <= T::zero() {
        return Err(Error::Singularity("evaluation point at the array center".into()));
    }
    let dir = d0.scale(T::one() / r0);
    let gain = radiation_profile(&d0, &array.normal(), params.boresight_exponent())?;
    let four_pi = T::of(4.0) * T::pi();
    let amp = Float::sqrt(gain) * params.wavelength() / (four_pi * r0);
    let two_pi_over_lambda = T::of(2.0) * T::pi() / params.wavelength();

    let mut entries = Vec::with_capacity(array.num_elements());
    for element in array.elements() {
        let delta = r0 - element.sub(&array.center()).dot(&dir);
        entries.push(Complex::from_polar(amp, -two_pi_over_lambda * delta));
    }
    Ok(DVector::from_vec(entries))
}

/// Round-trip sensing channel of one target: `H = gamma * h_bwd h_fwd^T`
/// (plain transpose, rank at most one).
#[derive(Debug, Clone)]
pub struct RoundTripChannel<T = f64> {
    forward: ComplexVector<T>,
    backward: ComplexVector<T>,
    rcs: Complex<T>,
}

impl<T: Real> RoundTripChannel<T> {
    pub fn forward(&self) -> &ComplexVector<T> {
        &self.forward
    }

    pub fn backward(&self) -> &ComplexVector<T> {
        &self.backward
    }

    pub fn rcs(&self) -> Complex<T> {
        self.rcs
    }

    /// Materialize `gamma * h_bwd h_fwd^T` (N_r x N_t).
    pub fn matrix(&self) -> ComplexMatrix<T> {
        let nr = self.backward.len();
        let nt = self.forward.len();
        DMatrix::from_fn(nr, nt, |i, j| self.rcs * self.backward[i] * self.forward[j])
    }

    /// Apply `H x` without materializing the matrix.
    pub fn apply(&self, x: &ComplexVector<T>) -> ComplexVector<T> {
        let inner: Complex<T> = self
            .forward
            .iter()
            .zip(x.iter())
            .map(|(f, v)| f * v)
            .sum();
        let scale = self.rcs * inner;
        self.backward.map(|b| b * scale)
    }
}

/// Assemble the round-trip channel from forward/backward legs and RCS.
pub fn roundtrip_channel<T: Real>(
    h_fwd: ComplexVector<T>,
    h_bwd: ComplexVector<T>,
    rcs: Complex<T>,
) -> RoundTripChannel<T> {
    RoundTripChannel { forward: h_fwd, backward: h_bwd, rcs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_upa;
    use approx::assert_relative_eq;

    fn params(lambda: f64) -> ChannelModelParams<f64> {
        ChannelModelParams::new(lambda, 2.0).unwrap()
    }

    fn boresight_array(rows: usize, cols: usize, spacing: f64) -> ArrayGeometry<f64> {
        build_upa(
            rows,
            cols,
            spacing,
            Vec3::zero(),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn radiation_profile_examples() {
        let w = Vec3::new(0.0, 0.0, 1.0);
        assert_relative_eq!(
            radiation_profile(&Vec3::new(0.0, 0.0, 2.0), &w, 2.0).unwrap(),
            6.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            radiation_profile(&Vec3::new(1.0, 0.0, 0.0), &w, 2.0).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        // psi = pi/3: 6 * (1/2)^2 = 1.5
        let p = Vec3::new(3.0_f64.sqrt(), 0.0, 1.0);
        assert_relative_eq!(radiation_profile(&p, &w, 2.0).unwrap(), 1.5, epsilon = 1e-12);
        // behind the plane
        assert_eq!(radiation_profile(&Vec3::new(0.0, 0.0, -1.0), &w, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn path_gain_examples() {
        let lambda = 0.01;
        let g = path_gain(&Vec3::new(0.0, 0.0, lambda), lambda).unwrap();
        assert_relative_eq!(g.norm(), 1.0 / (4.0 * std::f64::consts::PI), epsilon = 1e-12);
        // phase -2 pi wraps to zero
        assert_relative_eq!(g.arg(), 0.0, epsilon = 1e-9);

        let half = path_gain(&Vec3::new(0.0, 0.0, lambda / 2.0), lambda).unwrap();
        assert_relative_eq!(half.arg().abs(), std::f64::consts::PI, epsilon = 1e-9);

        let far = path_gain(&Vec3::new(0.0, 0.0, 0.5), lambda).unwrap();
        assert_relative_eq!(far.norm(), 1.5915494309189535e-3, epsilon = 1e-12);

        assert!(path_gain(&Vec3::zero(), lambda).is_err());
    }

    #[test]
    fn nearfield_single_element_composes_profile_and_path() {
        let arr = boresight_array(1, 1, 0.005);
        let lambda = 0.01;
        let h = nearfield_channel(
            &arr,
            &Vec3::new(0.0, 0.0, lambda),
            &params(lambda),
            PropagationDirection::Outgoing,
        )
        .unwrap();
        assert_eq!(h.len(), 1);
        let expected = path_gain(&Vec3::new(0.0, 0.0, lambda), lambda).unwrap() * 6.0_f64.sqrt();
        assert_relative_eq!((h[0] - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn nearfield_point_behind_array_is_dark() {
        let arr = boresight_array(2, 2, 0.005);
        let h = nearfield_channel(
            &arr,
            &Vec3::new(0.0, 0.0, -0.3),
            &params(0.01),
            PropagationDirection::Outgoing,
        )
        .unwrap();
        assert!(h.iter().all(|e| e.norm() == 0.0));
    }

    #[test]
    fn nearfield_equidistant_elements_match() {
        let arr = boresight_array(2, 1, 0.01);
        // on the symmetry axis of the two elements
        let h = nearfield_channel(
            &arr,
            &Vec3::new(0.0, 0.0, 0.25),
            &params(0.01),
            PropagationDirection::Outgoing,
        )
        .unwrap();
        assert_relative_eq!((h[0] - h[1]).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn nearfield_rejects_point_on_element() {
        let arr = boresight_array(2, 1, 0.01);
        let p = arr.elements()[0];
        assert!(nearfield_channel(&arr, &p, &params(0.01), PropagationDirection::Outgoing).is_err());
    }

    #[test]
    fn farfield_center_element_equals_single_element_nearfield() {
        let arr = boresight_array(1, 1, 0.005);
        let p = Vec3::new(0.02, 0.01, 0.5);
        let lambda = 0.01;
        let far = farfield_channel(&arr, &p, &params(lambda)).unwrap();
        let near =
            nearfield_channel(&arr, &p, &params(lambda), PropagationDirection::Outgoing).unwrap();
        assert_relative_eq!((far[0] - near[0]).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn farfield_amplitude_is_constant() {
        let arr = boresight_array(4, 4, 0.005);
        let h = farfield_channel(&arr, &Vec3::new(0.0, 0.3, 0.4), &params(0.01)).unwrap();
        let m0 = h[0].norm();
        for e in h.iter() {
            assert_relative_eq!(e.norm(), m0, max_relative = 1e-15);
        }
    }

    #[test]
    fn farfield_phase_differences_depend_only_on_direction() {
        let arr = boresight_array(4, 4, 0.005);
        let dir = Vec3::new(0.0, 0.6, 0.8);
        let h1 = farfield_channel(&arr, &dir.scale(0.5), &params(0.01)).unwrap();
        let h2 = farfield_channel(&arr, &dir.scale(1.0), &params(0.01)).unwrap();
        // ratios h1[n] * conj(h2[n]) must share one common phase
        let reference = (h1[0] * h2[0].conj()).arg();
        for n in 0..h1.len() {
            let ratio = (h1[n] * h2[n].conj()).arg();
            let mut diff = (ratio - reference).abs();
            if diff > std::f64::consts::PI {
                diff = 2.0 * std::f64::consts::PI - diff;
            }
            assert!(diff < 1e-9, "element {n}: phase difference {diff}");
        }
    }

    #[test]
    fn roundtrip_channel_structure() {
        let zero = Complex::new(0.0, 0.0);
        let one = Complex::new(1.0, 0.0);
        let e1 = ComplexVector::from_vec(vec![one, zero]);
        let e2 = ComplexVector::from_vec(vec![zero, one, zero]);
        let rt = roundtrip_channel(e1.clone(), e2.clone(), one);
        let h = rt.matrix();
        assert_eq!(h.nrows(), 3);
        assert_eq!(h.ncols(), 2);
        for i in 0..3 {
            for j in 0..2 {
                let expect = if i == 1 && j == 0 { 1.0 } else { 0.0 };
                assert_relative_eq!(h[(i, j)].re, expect, epsilon = 1e-15);
            }
        }

        let dark = roundtrip_channel(e1.clone(), e2.clone(), zero);
        assert!(dark.matrix().iter().all(|e| e.norm() == 0.0));

        // apply() agrees with the materialized matrix
        let x = ComplexVector::from_vec(vec![Complex::new(0.3, -0.2), Complex::new(1.0, 0.5)]);
        let direct = rt.matrix() * &x;
        let lazy = rt.apply(&x);
        assert_relative_eq!((direct - lazy).norm(), 0.0, epsilon = 1e-15);
    }
}
