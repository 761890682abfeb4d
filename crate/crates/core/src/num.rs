//! Scalar abstraction for the numeric core.

use nalgebra::RealField;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the whole library is generic over: f32 or f64.
///
/// All concrete type aliases at the crate root default to `f64`, which is
/// what the solver tolerances are calibrated for.
pub trait Real: nfisac_conic::Scalar + RealField + Float + FloatConst + FromPrimitive + Copy {
    /// Lossy conversion from an `f64` literal.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal conversion")
    }

    /// Lossy conversion to `f64`, for reporting and error messages.
    fn to_f64(self) -> f64;
}

impl Real for f32 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
