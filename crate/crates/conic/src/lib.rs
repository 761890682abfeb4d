//! Interior-point solver for linear conic programs.
//!
//! Supports products of nonnegative, 3-dimensional second-order and dense
//! PSD cones in equality form `min <c,x> s.t. A(x) = b, x in K`, with
//! certificate-based infeasibility detection. Designed for problems with a
//! small number of constraints acting on moderately sized matrix blocks.

pub mod problem;
pub mod scalar;
pub mod solver;
pub mod svec;

pub use problem::{Cone, ConicProblem, Constraint, LinearTerm, ProblemError};
pub use scalar::Scalar;
pub use solver::{solve, Settings, Solution, SolverError, Status};
pub use svec::{smat, soc3_to_svec, svec, svec_len, svec_side, svec_to_soc3};
