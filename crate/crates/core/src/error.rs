//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry: {0}")]
    Geometry(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch { context: String, expected: usize, got: usize },

    #[error("matrix not Hermitian: max |A - A^H| entry {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix not positive semidefinite in {context}: min eigenvalue {min_eig:.3e}")]
    NotPsd { context: String, min_eig: f64 },

    #[error("infeasible scenario: {0}")]
    InfeasibleScenario(String),

    #[error("optimization infeasible: {0}")]
    Infeasible(String),

    #[error("solver: {0}")]
    Solver(String),

    #[error("degenerate user {user}: lifted beamformer carries no power toward the user")]
    DegenerateUser { user: usize },

    #[error("reconstruction: {0}")]
    Reconstruction(String),

    #[error("signal generation: {0}")]
    Signal(String),

    #[error("linear algebra: {0}")]
    LinearAlgebra(String),

    #[error("config: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(context: impl Into<String>, expected: usize, got: usize) -> Self {
        Error::DimensionMismatch { context: context.into(), expected, got }
    }
}
