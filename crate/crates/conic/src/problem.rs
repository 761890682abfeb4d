//! Conic problem description.
//!
//! The solver handles equality-form problems
//!
//! ```text
//! minimize    <c, x>
//! subject to  <a_j, x> = b_j,   j = 1..m
//!             x in K
//! ```
//!
//! where `K` is a product of nonnegative, second-order (dimension 3) and PSD
//! cones. Coordinates are concatenated per cone: one scalar per nonnegative
//! cone, `(t, x1, x2)` for a second-order cone (`t >= ||(x1, x2)||`), and
//! svec coordinates (see [`crate::svec`]) for a PSD cone.

use nalgebra::DVector;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::svec::svec_len;

/// One cone in the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    /// `x >= 0`, one coordinate.
    NonNeg,
    /// `t >= ||(x1, x2)||`, three coordinates `(t, x1, x2)`.
    Soc3,
    /// `n x n` symmetric PSD block, `n (n + 1) / 2` svec coordinates.
    Psd(usize),
}

impl Cone {
    /// Number of coordinates this cone occupies.
    pub fn dim(&self) -> usize {
        match *self {
            Cone::NonNeg => 1,
            Cone::Soc3 => 3,
            Cone::Psd(n) => svec_len(n),
        }
    }

    /// Side of the symmetric-matrix block this cone maps to internally.
    pub(crate) fn side(&self) -> usize {
        match *self {
            Cone::NonNeg => 1,
            Cone::Soc3 => 2,
            Cone::Psd(n) => n,
        }
    }
}

/// Coefficients on a single cone's coordinates.
#[derive(Debug, Clone)]
pub struct LinearTerm<T: Scalar> {
    /// Index into [`ConicProblem::cones`].
    pub cone: usize,
    /// Coefficient vector, length `cones[cone].dim()`.
    pub coeffs: DVector<T>,
}

impl<T: Scalar> LinearTerm<T> {
    pub fn new(cone: usize, coeffs: DVector<T>) -> Self {
        Self { cone, coeffs }
    }
}

/// One equality constraint `sum_t <term_t, x_t> = rhs`.
#[derive(Debug, Clone)]
pub struct Constraint<T: Scalar> {
    pub terms: Vec<LinearTerm<T>>,
    pub rhs: T,
    /// Optional label surfaced in infeasibility reports.
    pub label: Option<String>,
}

impl<T: Scalar> Constraint<T> {
    pub fn new(terms: Vec<LinearTerm<T>>, rhs: T) -> Self {
        Self { terms, rhs, label: None }
    }

    pub fn labeled(terms: Vec<LinearTerm<T>>, rhs: T, label: impl Into<String>) -> Self {
        Self { terms, rhs, label: Some(label.into()) }
    }
}

/// Full problem data.
#[derive(Debug, Clone)]
pub struct ConicProblem<T: Scalar> {
    pub cones: Vec<Cone>,
    /// Objective terms; cones not mentioned have zero cost.
    pub objective: Vec<LinearTerm<T>>,
    pub constraints: Vec<Constraint<T>>,
}

/// Problem validation failure.
#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("term references cone {cone} but the problem has {count} cones")]
    ConeIndexOutOfRange { cone: usize, count: usize },
    #[error("term on cone {cone} has {got} coefficients, expected {expected}")]
    CoeffLength { cone: usize, got: usize, expected: usize },
    #[error("problem has no constraints")]
    NoConstraints,
    #[error("non-finite coefficient in {place}")]
    NonFinite { place: String },
}

impl<T: Scalar> ConicProblem<T> {
    pub fn validate(&self) -> Result<(), ProblemError> {
        if self.constraints.is_empty() {
            return Err(ProblemError::NoConstraints);
        }
        let check_terms = |terms: &[LinearTerm<T>], place: &str| {
            for t in terms {
                if t.cone >= self.cones.len() {
                    return Err(ProblemError::ConeIndexOutOfRange {
                        cone: t.cone,
                        count: self.cones.len(),
                    });
                }
                let expected = self.cones[t.cone].dim();
                if t.coeffs.len() != expected {
                    return Err(ProblemError::CoeffLength {
                        cone: t.cone,
                        got: t.coeffs.len(),
                        expected,
                    });
                }
                if t.coeffs.iter().any(|v| !Float::is_finite(*v)) {
                    return Err(ProblemError::NonFinite { place: place.to_string() });
                }
            }
            Ok(())
        };
        use num_traits::Float;
        check_terms(&self.objective, "objective")?;
        for (j, c) in self.constraints.iter().enumerate() {
            check_terms(&c.terms, &format!("constraint {j}"))?;
            if !Float::is_finite(c.rhs) {
                return Err(ProblemError::NonFinite { place: format!("rhs of constraint {j}") });
            }
        }
        Ok(())
    }

    /// Total coordinate dimension across all cones.
    pub fn dim(&self) -> usize {
        self.cones.iter().map(Cone::dim).sum()
    }
}
