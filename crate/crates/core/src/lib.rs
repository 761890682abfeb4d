//! Near-field integrated-sensing-and-communication transmit beamforming.
//!
//! A base station with planar transmit/receive arrays serves downlink users
//! and senses point targets inside the Rayleigh distance, where spherical
//! wavefronts make channels range-dependent. The library builds those
//! channels, designs the transmit covariance by a max-min weighted
//! beampattern program with cross-correlation suppression and per-user rate
//! constraints (solved as an SDP over a real embedding), recovers rank-one
//! beamformers in closed form, and evaluates designs through SINR maps and a
//! normalized Capon spectrum over the yz-plane.
//!
//! The numeric core is generic over the scalar type (f32/f64); the aliases
//! exported at the crate root fix `f64`, which is what the default solver
//! tolerances assume.

pub mod channel;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod num;

pub use channel::{ChannelModelParams, ComplexMatrix, ComplexVector, PropagationDirection};
pub use error::{Error, Result};
pub use geometry::{ArrayGeometry, Vec3};
pub use metrics::{Beamformers, CovarianceDecomposition, HermitianMatrix, NoiseModel};
pub use num::Real;
