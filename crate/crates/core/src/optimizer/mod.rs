//! Transmit-covariance design: the relaxed max-min beampattern SDP, rank-one
//! recovery, benchmark variants and solution auditing.

mod embed;
mod formulation;
mod recovery;
mod verify;

pub use embed::{complex_to_real_embed, real_to_complex_extract};
pub use formulation::{
    largest_feasible_common_rate, solve_ffbf, solve_nccs, solve_relaxed, DesignProblem,
    SolveDiagnostics, SolveStatus, SolverOptions,
};
pub use recovery::{recover_rank_one, recover_solution, residual_sensing_cov};
pub use verify::{verify_solution, ConstraintFamily, ConstraintReport, FamilyResult, VerifyTolerances};

use crate::channel::ComplexVector;
use crate::error::{Error, Result};
use crate::metrics::{Beamformers, CovarianceDecomposition, HermitianMatrix};
use crate::num::Real;

/// Weights balancing the per-target beampattern and pairwise
/// cross-correlation terms, plus the cross-correlation tolerance.
#[derive(Debug, Clone)]
pub struct SensingWeights<T = f64> {
    per_target: Vec<T>,
    per_pair: Vec<Vec<T>>,
    epsilon: T,
}

impl<T: Real> SensingWeights<T> {
    /// Explicit weights. The pair table must be symmetric with positive
    /// entries for every ordered pair `l != l'`.
    pub fn new(per_target: Vec<T>, per_pair: Vec<Vec<T>>, epsilon: T) -> Result<Self> {
        let l = per_target.len();
        if epsilon <= T::zero() {
            return Err(Error::InvalidArgument("cross-correlation tolerance must be positive".into()));
        }
        if per_target.iter().any(|&w| w <= T::zero()) {
            return Err(Error::InvalidArgument("per-target weights must be positive".into()));
        }
        if per_pair.len() != l || per_pair.iter().any(|row| row.len() != l) {
            return Err(Error::dim("pair weight table", l, per_pair.len()));
        }
        for i in 0..l {
            for j in 0..l {
                if i != j {
                    if per_pair[i][j] <= T::zero() {
                        return Err(Error::InvalidArgument("pair weights must be positive".into()));
                    }
                    if (per_pair[i][j] - per_pair[j][i]).to_f64().abs() > 1e-12 {
                        return Err(Error::InvalidArgument("pair weights must be symmetric".into()));
                    }
                }
            }
        }
        Ok(Self { per_target, per_pair, epsilon })
    }

    pub fn num_targets(&self) -> usize {
        self.per_target.len()
    }

    pub fn target(&self, l: usize) -> T {
        self.per_target[l]
    }

    pub fn pair(&self, l: usize, lp: usize) -> T {
        self.per_pair[l][lp]
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }
}

/// Channel-normalized weights: `w_l = 1 / ||h_l||^2` and
/// `w_ll' = 1 / (||h_l|| ||h_l'||)`, balancing targets regardless of their
/// channel strengths.
pub fn assemble_scenario_weights<T: Real>(
    target_channels: &[ComplexVector<T>],
    epsilon: T,
) -> Result<SensingWeights<T>> {
    let norms: Vec<T> = target_channels.iter().map(|h| h.norm()).collect();
    for (l, &n) in norms.iter().enumerate() {
        if n <= T::zero() {
            return Err(Error::InfeasibleScenario(format!(
                "target {l} has a zero channel (behind the array?)"
            )));
        }
    }
    let per_target = norms.iter().map(|&n| T::one() / (n * n)).collect();
    let l = norms.len();
    let per_pair = (0..l)
        .map(|i| (0..l).map(|j| T::one() / (norms[i] * norms[j])).collect())
        .collect();
    SensingWeights::new(per_target, per_pair, epsilon)
}

/// Output of the relaxed SDP: lifted per-user matrices, sensing covariance,
/// their total, the objective and solver diagnostics.
#[derive(Debug, Clone)]
pub struct RelaxedSolution<T = f64> {
    pub lifted: Vec<HermitianMatrix<T>>,
    pub sensing_cov: HermitianMatrix<T>,
    pub total: HermitianMatrix<T>,
    pub objective: T,
    pub status: SolveStatus,
    pub diagnostics: SolveDiagnostics,
    pub report: ConstraintReport,
}

impl<T: Real> RelaxedSolution<T> {
    pub fn decomposition(&self) -> CovarianceDecomposition<T> {
        CovarianceDecomposition::new(
            Beamformers::Lifted(self.lifted.clone()),
            self.sensing_cov.clone(),
        )
    }
}

/// Rank-one beamformers plus the adjusted sensing covariance; the total
/// transmit covariance is unchanged from the relaxed solution.
#[derive(Debug, Clone)]
pub struct BeamformingSolution<T = f64> {
    pub beamformers: Vec<ComplexVector<T>>,
    pub sensing_cov: HermitianMatrix<T>,
    pub total: HermitianMatrix<T>,
    pub objective: T,
    pub status: SolveStatus,
    pub diagnostics: SolveDiagnostics,
}

impl<T: Real> BeamformingSolution<T> {
    pub fn decomposition(&self) -> CovarianceDecomposition<T> {
        CovarianceDecomposition::new(
            Beamformers::RankOne(self.beamformers.clone()),
            self.sensing_cov.clone(),
        )
    }
}
