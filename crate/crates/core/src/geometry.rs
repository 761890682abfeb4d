//! Antenna-array geometry: element layouts, apertures, Rayleigh distance.

use crate::error::{Error, Result};
use crate::num::Real;
use num_traits::Float;

/// A point or direction in 3-space, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3<T = f64> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(&self) -> T {
        Float::sqrt(self.dot(self))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }

    pub fn is_finite(&self) -> bool {
        Float::is_finite(self.x) && Float::is_finite(self.y) && Float::is_finite(self.z)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= T::zero() || !Float::is_finite(n) {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        Ok(self.scale(T::one() / n))
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl<T: Real> From<[T; 3]> for Vec3<T> {
    fn from(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// A planar antenna array: element positions, unit radiation normal and the
/// (derived) centroid. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ArrayGeometry<T = f64> {
    elements: Vec<Vec3<T>>,
    normal: Vec3<T>,
    center: Vec3<T>,
}

impl<T: Real> ArrayGeometry<T> {
    /// Build from explicit element positions. The normal is normalized; the
    /// center is the arithmetic mean of the elements.
    pub fn new(elements: Vec<Vec3<T>>, normal: Vec3<T>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Geometry("array needs at least one element".into()));
        }
        if elements.iter().any(|e| !e.is_finite()) {
            return Err(Error::Geometry("non-finite element position".into()));
        }
        let normal = normal
            .normalized()
            .map_err(|_| Error::Geometry("radiation normal must be non-zero".into()))?;
        let inv_n = T::one() / T::from_usize(elements.len()).unwrap();
        let center = elements
            .iter()
            .fold(Vec3::zero(), |acc, e| acc.add(e))
            .scale(inv_n);
        Ok(Self { elements, normal, center })
    }

    pub fn elements(&self) -> &[Vec3<T>] {
        &self.elements
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn normal(&self) -> Vec3<T> {
        self.normal
    }

    pub fn center(&self) -> Vec3<T> {
        self.center
    }

    /// Aperture: the maximum pairwise element distance (array diagonal for a
    /// rectangular grid). Zero for a single-element array.
    pub fn aperture(&self) -> T {
        let mut best = T::zero();
        for (i, a) in self.elements.iter().enumerate() {
            for b in &self.elements[i + 1..] {
                best = Float::max(best, a.sub(b).norm());
            }
        }
        best
    }
}

/// Build a uniform planar array on a regular `rows x cols` grid.
///
/// Rows advance along the unit vector `u` obtained by projecting
/// `in_plane_axis` onto the plane orthogonal to `normal`; columns advance
/// along `v = normal x u`. Element ordering is row-major: index
/// `r * cols + c`, and the grid is centered on `center` so the centroid is
/// exact by construction.
pub fn build_upa<T: Real>(
    rows: usize,
    cols: usize,
    spacing: T,
    center: Vec3<T>,
    normal: Vec3<T>,
    in_plane_axis: Vec3<T>,
) -> Result<ArrayGeometry<T>> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("rows and cols must be at least 1".into()));
    }
    if spacing <= T::zero() {
        return Err(Error::InvalidArgument("element spacing must be positive".into()));
    }
    let n = normal
        .normalized()
        .map_err(|_| Error::Geometry("normal must be non-zero".into()))?;
    let axis = in_plane_axis
        .normalized()
        .map_err(|_| Error::Geometry("in-plane axis must be non-zero".into()))?;
    // project the axis onto the array plane
    let u_raw = axis.sub(&n.scale(axis.dot(&n)));
    let u = u_raw.normalized().map_err(|_| {
        Error::Geometry("in-plane axis is parallel to the normal".into())
    })?;
    let v = n.cross(&u);

    let half = T::of(0.5);
    let row_off = |r: usize| (T::from_usize(r).unwrap() - T::from_usize(rows - 1).unwrap() * half) * spacing;
    let col_off = |c: usize| (T::from_usize(c).unwrap() - T::from_usize(cols - 1).unwrap() * half) * spacing;

    let mut elements = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let p = center.add(&u.scale(row_off(r))).add(&v.scale(col_off(c)));
            elements.push(p);
        }
    }
    ArrayGeometry::new(elements, n)
}

/// Rayleigh distance `2 D^2 / lambda` bounding the radiating near field of an
/// aperture-`D` array.
pub fn rayleigh_distance<T: Real>(aperture: T, wavelength: T) -> Result<T> {
    if wavelength <= T::zero() {
        return Err(Error::InvalidArgument("wavelength must be positive".into()));
    }
    if aperture < T::zero() {
        return Err(Error::InvalidArgument("aperture must be nonnegative".into()));
    }
    Ok(T::of(2.0) * aperture * aperture / wavelength)
}

/// Angle between two non-zero vectors, in `[0, pi]`.
pub fn angle_between<T: Real>(p: &Vec3<T>, w: &Vec3<T>) -> Result<T> {
    let np = p.norm();
    let nw = w.norm();
    if np <= T::zero() || nw <= T::zero() {
        return Err(Error::InvalidArgument("angle of a zero vector is undefined".into()));
    }
    let cos = num_traits::clamp(p.dot(w) / (np * nw), -T::one(), T::one());
    Ok(Float::acos(cos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn upa_10x10_half_wavelength_matches_hand_geometry() {
        let arr = build_upa(
            10,
            10,
            0.005,
            Vec3::zero(),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 0.0),
        )
        .unwrap();
        assert_eq!(arr.num_elements(), 100);
        // per-axis span of 9 spacings = 45 mm, diagonal aperture 45 mm * sqrt(2)
        let max_x = arr.elements().iter().map(|e| e.x.abs()).fold(0.0, f64::max);
        assert_relative_eq!(max_x, 0.0225, epsilon = 1e-12);
        assert_relative_eq!(arr.aperture(), 0.045 * 2.0_f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(arr.center().norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn upa_single_element_has_zero_aperture() {
        let arr = build_upa(
            1,
            1,
            0.01,
            Vec3::new(0.0, 0.06, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 0.0),
        )
        .unwrap();
        assert_eq!(arr.num_elements(), 1);
        assert_eq!(arr.aperture(), 0.0);
        assert_relative_eq!(arr.center().y, 0.06, epsilon = 1e-15);
    }

    #[test]
    fn upa_two_elements_aperture_is_spacing() {
        let arr = build_upa(
            2,
            1,
            0.01,
            Vec3::zero(),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 0.0),
        )
        .unwrap();
        assert_eq!(arr.num_elements(), 2);
        assert_relative_eq!(arr.aperture(), 0.01, epsilon = 1e-15);
    }

    #[test]
    fn upa_ordering_is_row_major() {
        let arr = build_upa(
            2,
            3,
            1.0,
            Vec3::zero(),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 0.0),
        )
        .unwrap();
        // rows along x, cols along z x u = y
        let e = arr.elements();
        assert_relative_eq!(e[0].x, -0.5);
        assert_relative_eq!(e[0].y, -1.0);
        assert_relative_eq!(e[1].y, 0.0); // same row, next column
        assert_relative_eq!(e[3].x, 0.5); // next row
    }

    #[test]
    fn upa_rejects_degenerate_axes() {
        let r = build_upa(
            2,
            2,
            0.01,
            Vec3::zero(),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 2.0),
        );
        assert!(matches!(r, Err(Error::Geometry(_))));
    }

    #[test]
    fn rayleigh_examples() {
        // D = 0.071 m at 10 mm wavelength: the 1 m near-field bound
        assert_relative_eq!(rayleigh_distance(0.071, 0.01).unwrap(), 1.0082, epsilon = 1e-12);
        assert_eq!(rayleigh_distance(0.0, 0.01).unwrap(), 0.0);
        assert_relative_eq!(rayleigh_distance(0.1, 0.01).unwrap(), 2.0, epsilon = 1e-12);
        assert!(rayleigh_distance(0.1, 0.0).is_err());
    }

    #[test]
    fn angle_examples() {
        let z = Vec3::new(0.0, 0.0, 1.0);
        assert_relative_eq!(angle_between(&z, &z).unwrap(), 0.0, epsilon = 1e-12);
        let x = Vec3::new(1.0, 0.0, 0.0);
        assert_relative_eq!(
            angle_between(&x, &z).unwrap(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-12
        );
        let yz = Vec3::new(0.0, 1.0, 1.0);
        assert_relative_eq!(
            angle_between(&yz, &z).unwrap(),
            std::f64::consts::FRAC_PI_4,
            epsilon = 1e-12
        );
        assert!(angle_between(&Vec3::zero(), &z).is_err());
    }

    proptest! {
        #[test]
        fn upa_count_is_rows_times_cols(rows in 1usize..6, cols in 1usize..6) {
            let arr = build_upa(
                rows, cols, 0.01,
                Vec3::zero(), Vec3::new(0.0, 0.0, 1.0), Vec3::new(1.0, 0.0, 0.0),
            ).unwrap();
            prop_assert_eq!(arr.num_elements(), rows * cols);
        }

        #[test]
        fn angle_symmetric_and_scale_invariant(
            px in -10.0..10.0f64, py in -10.0..10.0f64, pz in 0.1..10.0f64,
            wx in -10.0..10.0f64, wy in -10.0..10.0f64, wz in 0.1..10.0f64,
            a in 0.01..100.0f64, b in 0.01..100.0f64,
        ) {
            let p = Vec3::new(px, py, pz);
            let w = Vec3::new(wx, wy, wz);
            let base = angle_between(&p, &w).unwrap();
            prop_assert!((angle_between(&w, &p).unwrap() - base).abs() < 1e-10);
            let scaled = angle_between(&p.scale(a), &w.scale(b)).unwrap();
            prop_assert!((scaled - base).abs() < 1e-8);
        }

        #[test]
        fn rayleigh_monotone(d1 in 0.0..1.0f64, d2 in 0.0..1.0f64, l1 in 0.001..0.1f64, l2 in 0.001..0.1f64) {
            let (dlo, dhi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            let (llo, lhi) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
            prop_assert!(rayleigh_distance(dlo, l1).unwrap() <= rayleigh_distance(dhi, l1).unwrap());
            prop_assert!(rayleigh_distance(d1, lhi).unwrap() <= rayleigh_distance(d1, llo).unwrap());
        }
    }
}
