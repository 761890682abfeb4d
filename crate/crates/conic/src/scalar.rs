//! Scalar abstraction: the solver is generic over the floating-point type.

use nalgebra::RealField;
use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable by the solver: f32 or f64.
pub trait Scalar: RealField + Float + FromPrimitive + Copy {
    /// Shorthand for lossy conversion from an `f64` literal.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal conversion")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
