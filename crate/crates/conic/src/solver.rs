//! Primal-dual interior-point solver.
//!
//! Implements an infeasible-start Mehrotra predictor-corrector method with
//! the HKM search direction. Every cone is represented internally as a dense
//! symmetric PSD block (nonnegative coordinates as 1x1 blocks, 3-dimensional
//! second-order cones as 2x2 blocks through the spin-factor isomorphism), so
//! a single Jordan-algebra code path serves the whole product cone.
//!
//! The Schur complement is formed over the constraint multipliers, which is
//! the efficient regime for problems with few linear functionals of large
//! matrix variables: each iteration costs a handful of dense factorizations
//! and multiplications per block.

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;

use crate::problem::{Cone, ConicProblem, ProblemError};
use crate::scalar::Scalar;
use crate::svec::{smat, soc3_to_svec, svec, svec_to_soc3};

/// Solver tuning knobs.
#[derive(Debug, Clone)]
pub struct Settings<T: Scalar> {
    /// Relative duality-gap tolerance.
    pub tol_gap: T,
    /// Relative primal/dual feasibility tolerance.
    pub tol_feas: T,
    /// Certificate quality threshold for infeasibility declarations.
    pub tol_infeas: T,
    pub max_iter: usize,
    /// Initial multiple of the identity for the primal starting point.
    pub init_primal: T,
    /// Initial multiple of the identity for the dual starting point.
    pub init_dual: T,
}

impl<T: Scalar> Default for Settings<T> {
    fn default() -> Self {
        Self {
            tol_gap: T::c(1e-8),
            tol_feas: T::c(1e-8),
            tol_infeas: T::c(1e-9),
            max_iter: 200,
            init_primal: T::one(),
            init_dual: T::one(),
        }
    }
}

/// Outcome classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// All tolerances met.
    Optimal,
    /// Converged near, but not within, the requested tolerances.
    Inaccurate,
    /// A Farkas certificate of primal infeasibility was found.
    PrimalInfeasible,
    /// A certificate of dual infeasibility (unbounded primal) was found.
    DualInfeasible,
    /// Iteration limit hit without meeting tolerances.
    IterationLimit,
    /// Step sizes collapsed; returned the best iterate seen.
    Stalled,
}

/// Solver result. `x` and `s` are reported in the per-cone coordinate
/// layouts documented on [`crate::problem::ConicProblem`].
#[derive(Debug, Clone)]
pub struct Solution<T: Scalar> {
    pub status: Status,
    pub x: Vec<DVector<T>>,
    pub y: DVector<T>,
    pub s: Vec<DVector<T>>,
    pub obj_primal: T,
    pub obj_dual: T,
    pub rel_gap: T,
    pub rel_primal: T,
    pub rel_dual: T,
    pub iterations: usize,
    /// Farkas ray (one weight per constraint) when primal infeasible.
    pub certificate: Option<DVector<T>>,
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("invalid problem: {0}")]
    Problem(#[from] ProblemError),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

#[inline]
fn fmax<T: Scalar>(a: T, b: T) -> T {
    num_traits::Float::max(a, b)
}

#[inline]
fn fabs<T: Scalar>(a: T) -> T {
    num_traits::Float::abs(a)
}

#[inline]
fn fsqrt<T: Scalar>(a: T) -> T {
    num_traits::Float::sqrt(a)
}

/// Dense per-block constraint data after cone-to-matrix conversion.
struct BlockData<T: Scalar> {
    sides: Vec<usize>,
    /// `a[j]` holds the (block, matrix) terms of constraint `j`.
    a: Vec<Vec<(usize, DMatrix<T>)>>,
    b: DVector<T>,
    /// Objective matrix per block (dense, possibly zero).
    c: Vec<DMatrix<T>>,
    /// Row scaling applied: original `a_j = a[j] * row_scale[j]`.
    row_scale: Vec<T>,
    norm_b: T,
    norm_c: T,
}

fn coords_to_matrix<T: Scalar>(cone: Cone, coeffs: &DVector<T>) -> DMatrix<T> {
    match cone {
        Cone::NonNeg => DMatrix::from_element(1, 1, coeffs[0]),
        Cone::Soc3 => smat(&soc3_to_svec(coeffs.as_slice()), 2),
        Cone::Psd(n) => smat(coeffs, n),
    }
}

fn matrix_to_coords<T: Scalar>(cone: Cone, m: &DMatrix<T>) -> DVector<T> {
    match cone {
        Cone::NonNeg => DVector::from_element(1, m[(0, 0)]),
        Cone::Soc3 => {
            let u = svec_to_soc3(&svec(m));
            DVector::from_vec(u.to_vec())
        }
        Cone::Psd(_) => svec(m),
    }
}

fn build_blocks<T: Scalar>(p: &ConicProblem<T>) -> BlockData<T> {
    let sides: Vec<usize> = p.cones.iter().map(Cone::side).collect();
    let nb = sides.len();

    let mut c: Vec<DMatrix<T>> = sides.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    for term in &p.objective {
        c[term.cone] += coords_to_matrix(p.cones[term.cone], &term.coeffs);
    }

    let m = p.constraints.len();
    let mut a = Vec::with_capacity(m);
    let mut b = DVector::zeros(m);
    let mut row_scale = vec![T::one(); m];
    for (j, con) in p.constraints.iter().enumerate() {
        let mut terms: Vec<(usize, DMatrix<T>)> = Vec::with_capacity(con.terms.len());
        for t in &con.terms {
            let mat = coords_to_matrix(p.cones[t.cone], &t.coeffs);
            match terms.iter_mut().find(|(idx, _)| *idx == t.cone) {
                Some((_, existing)) => *existing += mat,
                None => terms.push((t.cone, mat)),
            }
        }
        let norm: T = fsqrt(
            terms
                .iter()
                .fold(T::zero(), |acc, (_, m)| acc + m.iter().fold(T::zero(), |a, &v| a + v * v)),
        );
        let scale = fmax(T::c(1e-12), norm);
        for (_, m) in terms.iter_mut() {
            *m /= scale;
        }
        row_scale[j] = scale;
        b[j] = con.rhs / scale;
        a.push(terms);
        let _ = nb;
    }

    let norm_b = b.norm();
    let norm_c = fsqrt(c.iter().fold(T::zero(), |acc, m| {
        acc + m.iter().fold(T::zero(), |a, &v| a + v * v)
    }));

    BlockData { sides, a, b, c, row_scale, norm_b, norm_c }
}

fn frob_dot<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn symmetrize<T: Scalar>(m: &mut DMatrix<T>) {
    let half = T::c(0.5);
    let t = m.transpose();
    *m += t;
    *m *= half;
}

/// Largest step `alpha <= 1` keeping every `x + alpha dx` positive definite,
/// located by bisection on Cholesky feasibility (the feasible set along a
/// line through an interior point is an interval).
fn max_step<T: Scalar>(xs: &[DMatrix<T>], dxs: &[DMatrix<T>], fraction: T) -> T {
    let feasible = |alpha: T| -> bool {
        xs.par_iter()
            .zip(dxs.par_iter())
            .all(|(x, dx)| Cholesky::new(x + dx * alpha).is_some())
    };
    let one = T::one();
    if feasible(one / fraction) {
        return one;
    }
    let mut lo = T::zero();
    let mut hi = one / fraction;
    for _ in 0..25 {
        let mid = (lo + hi) * T::c(0.5);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo * fraction
}

#[derive(Clone, Copy)]
struct Metrics<T: Scalar> {
    rel_p: T,
    rel_d: T,
    rel_gap: T,
    obj_p: T,
    obj_d: T,
}

impl<T: Scalar> Metrics<T> {
    fn merit(&self) -> T {
        fmax(self.rel_p, fmax(self.rel_d, self.rel_gap))
    }
}

/// Solve a conic problem. See the module docs for the algorithm outline.
pub fn solve<T: Scalar>(
    problem: &ConicProblem<T>,
    settings: &Settings<T>,
) -> Result<Solution<T>, SolverError> {
    problem.validate()?;
    let data = build_blocks(problem);
    let nb = data.sides.len();
    let m = data.b.len();
    let nu: T = T::from_usize(data.sides.iter().sum::<usize>()).unwrap();

    let mut x: Vec<DMatrix<T>> = data
        .sides
        .iter()
        .map(|&n| DMatrix::identity(n, n) * settings.init_primal)
        .collect();
    let mut s: Vec<DMatrix<T>> = data
        .sides
        .iter()
        .map(|&n| DMatrix::identity(n, n) * settings.init_dual)
        .collect();
    let mut y: DVector<T> = DVector::zeros(m);

    let mut best: Option<(T, Vec<DMatrix<T>>, Vec<DMatrix<T>>, DVector<T>, Metrics<T>)> = None;
    let mut stall_count = 0usize;
    let mut iterations = 0usize;
    let mut last_improvement = 0usize;

    // Weighted feasibility projection: corrections of the form
    // dX = sum_j delta_j X A_j X shrink automatically along directions where
    // X is close to the cone boundary, so near-exact primal feasibility can
    // be restored without leaving the cone. The interior-point steps alone
    // leave the primal residual at the accuracy floor of the Schur solve;
    // this removes that floor.
    let project_primal = |x: &mut Vec<DMatrix<T>>, r_p: &DVector<T>| -> bool {
        let weighted: Vec<Vec<(usize, DMatrix<T>)>> = data
            .a
            .par_iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|(t, mat)| (*t, &(&x[*t] * mat) * &x[*t]))
                    .collect()
            })
            .collect();
        let mut gram = DMatrix::<T>::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                let mut acc = T::zero();
                for (ti, mi) in &data.a[i] {
                    if let Some((_, wj)) = weighted[j].iter().find(|(tj, _)| tj == ti) {
                        acc += frob_dot(mi, wj);
                    }
                }
                gram[(i, j)] = acc;
            }
        }
        symmetrize(&mut gram);
        let Some(chol) = Cholesky::new(gram) else { return false };
        let mut theta = T::one();
        for _ in 0..3 {
            let delta = chol.solve(r_p) * theta;
            let mut trial = x.clone();
            for (j, terms) in weighted.iter().enumerate() {
                for (t, mat) in terms {
                    let mut corr = mat * delta[j];
                    symmetrize(&mut corr);
                    trial[*t] += corr;
                }
            }
            if trial.par_iter().all(|b| Cholesky::new(b.clone()).is_some()) {
                *x = trial;
                return true;
            }
            theta *= T::c(0.25);
        }
        false
    };

    let finish = |status: Status,
                  x: &[DMatrix<T>],
                  s: &[DMatrix<T>],
                  y: &DVector<T>,
                  met: &Metrics<T>,
                  iterations: usize,
                  certificate: Option<DVector<T>>| {
        let xs = problem
            .cones
            .iter()
            .zip(x.iter())
            .map(|(&c, m)| matrix_to_coords(c, m))
            .collect();
        let ss = problem
            .cones
            .iter()
            .zip(s.iter())
            .map(|(&c, m)| matrix_to_coords(c, m))
            .collect();
        let y_unscaled =
            DVector::from_iterator(m, y.iter().zip(&data.row_scale).map(|(&v, &sc)| v / sc));
        Solution {
            status,
            x: xs,
            s: ss,
            y: y_unscaled,
            obj_primal: met.obj_p,
            obj_dual: met.obj_d,
            rel_gap: met.rel_gap,
            rel_primal: met.rel_p,
            rel_dual: met.rel_d,
            iterations,
            certificate,
        }
    };

    for iter in 0..settings.max_iter {
        iterations = iter;
        // Residuals and metrics.
        let compute_ax = |x: &[DMatrix<T>]| -> DVector<T> {
            DVector::from_iterator(
                m,
                data.a.iter().map(|terms| {
                    terms.iter().fold(T::zero(), |acc, (t, mat)| acc + frob_dot(mat, &x[*t]))
                }),
            )
        };
        let mut ax = compute_ax(&x);
        let mut r_p = &data.b - &ax;
        {
            let rel = r_p.norm() / (T::one() + data.norm_b);
            if rel > T::zero() && rel < T::c(1e-5) {
                let ok = project_primal(&mut x, &r_p);
                log::debug!("projection attempt: rel {:.2e} ok {}", rel.to_subset().unwrap_or(f64::NAN), ok);
                if ok {
                    ax = compute_ax(&x);
                    r_p = &data.b - &ax;
                }
            }
        }
        let mut r_d: Vec<DMatrix<T>> = (0..nb).map(|t| &data.c[t] - &s[t]).collect();
        for (j, terms) in data.a.iter().enumerate() {
            for (t, mat) in terms {
                r_d[*t] -= mat * y[j];
            }
        }
        let mu = x
            .iter()
            .zip(s.iter())
            .fold(T::zero(), |acc, (xt, st)| acc + frob_dot(xt, st))
            / nu;

        let obj_p = x
            .iter()
            .zip(data.c.iter())
            .fold(T::zero(), |acc, (xt, ct)| acc + frob_dot(xt, ct));
        let obj_d = data.b.dot(&y);
        // With near-feasible iterates the duality gap and the complementarity
        // <X, S> agree; when large multipliers meet a small primal residual
        // the objective difference overstates suboptimality, so take the
        // tighter of the two measures.
        let gap_scale = T::one() + fabs(obj_p) + fabs(obj_d);
        let met = Metrics {
            rel_p: r_p.norm() / (T::one() + data.norm_b),
            rel_d: fsqrt(r_d.iter().fold(T::zero(), |acc, rd| acc + frob_dot(rd, rd)))
                / (T::one() + data.norm_c),
            rel_gap: num_traits::Float::min(fabs(obj_p - obj_d), mu * nu) / gap_scale,
            obj_p,
            obj_d,
        };
        log::debug!(
            "iter {iter:3}  mu {:9.2e}  rp {:9.2e}  rd {:9.2e}  gap {:9.2e}  obj {:12.6e}",
            mu.to_subset().unwrap_or(f64::NAN),
            met.rel_p.to_subset().unwrap_or(f64::NAN),
            met.rel_d.to_subset().unwrap_or(f64::NAN),
            met.rel_gap.to_subset().unwrap_or(f64::NAN),
            obj_p.to_subset().unwrap_or(f64::NAN),
        );

        if met.rel_p <= settings.tol_feas
            && met.rel_d <= settings.tol_feas
            && met.rel_gap <= settings.tol_gap
        {
            return Ok(finish(Status::Optimal, &x, &s, &y, &met, iter, None));
        }

        if best.as_ref().map_or(true, |(merit, ..)| met.merit() < *merit) {
            if best.as_ref().map_or(true, |(merit, ..)| met.merit() < T::c(0.8) * *merit) {
                last_improvement = iter;
            }
            best = Some((met.merit(), x.clone(), s.clone(), y.clone(), met));
        }
        if iter.saturating_sub(last_improvement) > 15 {
            let (_, bx, bs, by, bmet) = best.take().unwrap();
            let status = if bmet.merit() <= T::c(1e2) * settings.tol_gap {
                Status::Inaccurate
            } else {
                Status::Stalled
            };
            return Ok(finish(status, &bx, &bs, &by, &bmet, iter, None));
        }

        // Primal infeasibility: a Farkas ray y with A^T(y) <= 0 and b'y > 0.
        if obj_d > T::c(1e-4) * (T::one() + y.norm()) && met.rel_p > settings.tol_feas {
            let yn: DVector<T> = &y / obj_d;
            let mut aty: Vec<DMatrix<T>> =
                data.sides.iter().map(|&n| DMatrix::<T>::zeros(n, n)).collect();
            for (j, terms) in data.a.iter().enumerate() {
                for (t, mat) in terms {
                    aty[*t] += mat * yn[j];
                }
            }
            let scale = fmax(
                T::one(),
                aty.iter().fold(T::zero(), |acc, m| {
                    fmax(acc, m.iter().fold(T::zero(), |a, &v| fmax(a, fabs(v))))
                }),
            );
            let worst = aty
                .iter()
                .map(|p| {
                    let eig = nalgebra::SymmetricEigen::new(-p.clone());
                    eig.eigenvalues.iter().fold(T::c(f64::INFINITY), |a, &v| {
                        num_traits::Float::min(a, v)
                    })
                })
                .fold(T::c(f64::INFINITY), num_traits::Float::min);
            if worst >= -settings.tol_infeas * scale {
                let ray = DVector::from_iterator(
                    m,
                    yn.iter().zip(&data.row_scale).map(|(&v, &sc)| v / sc),
                );
                let met_inf = Metrics { obj_p, obj_d, ..met };
                return Ok(finish(
                    Status::PrimalInfeasible,
                    &x,
                    &s,
                    &y,
                    &met_inf,
                    iter,
                    Some(ray),
                ));
            }
        }

        // Dual infeasibility: an improving ray x >= 0 with A(x) = 0, <c,x> < 0.
        if obj_p < -T::c(1e7) * (T::one() + fabs(obj_d)) {
            let xnorm = fsqrt(x.iter().fold(T::zero(), |acc, b| acc + frob_dot(b, b)));
            let axn = ax.norm() / xnorm;
            let cxn = obj_p / xnorm;
            if axn <= settings.tol_infeas * T::c(1e3) && cxn < -settings.tol_infeas {
                return Ok(finish(Status::DualInfeasible, &x, &s, &y, &met, iter, None));
            }
        }

        // Factorizations.
        let s_chol: Vec<Cholesky<T, nalgebra::Dyn>> = {
            let mut out = Vec::with_capacity(nb);
            for st in &s {
                match Cholesky::new(st.clone()) {
                    Some(c) => out.push(c),
                    None => {
                        return Err(SolverError::Numerical(
                            "dual block left the cone".to_string(),
                        ))
                    }
                }
            }
            out
        };
        let s_inv: Vec<DMatrix<T>> = s_chol.par_iter().map(|c| c.inverse()).collect();

        // Schur complement M_ij = <A_i, X A_j S^{-1}>, built blockwise.
        let mut mm = DMatrix::<T>::zeros(m, m);
        for t in 0..nb {
            let touching: Vec<usize> = (0..m)
                .filter(|&j| data.a[j].iter().any(|(bt, _)| *bt == t))
                .collect();
            if touching.is_empty() {
                continue;
            }
            let term_of = |j: usize| -> &DMatrix<T> {
                &data.a[j].iter().find(|(bt, _)| *bt == t).unwrap().1
            };
            let us: Vec<(usize, DMatrix<T>)> = touching
                .par_iter()
                .map(|&j| (j, &(&x[t] * term_of(j)) * &s_inv[t]))
                .collect();
            for (j, u) in &us {
                for &i in &touching {
                    mm[(i, *j)] += frob_dot(term_of(i), u);
                }
            }
        }
        symmetrize(&mut mm);

        // Near the central path's end the boundary may be approached more
        // aggressively; a fixed fraction caps the asymptotic rate.
        let step_fraction = if mu > T::c(1e-4) {
            T::c(0.99)
        } else if mu > T::c(1e-7) {
            T::c(0.999)
        } else {
            T::c(0.9999)
        };

        let mut reg = T::c(1e-14) * fmax(T::one(), mm.diagonal().amax());
        let m_chol = loop {
            let mut trial = mm.clone();
            for i in 0..m {
                trial[(i, i)] += reg;
            }
            match Cholesky::new(trial) {
                Some(c) => break c,
                None => {
                    reg *= T::c(1e3);
                    if reg > T::c(1e-2) {
                        return Err(SolverError::Numerical(
                            "Schur complement not positive definite".to_string(),
                        ));
                    }
                }
            }
        };
        let solve_schur = |rhs: &DVector<T>| -> DVector<T> {
            let mut sol = m_chol.solve(rhs);
            for _ in 0..3 {
                let resid = rhs - &mm * &sol;
                sol += m_chol.solve(&resid);
            }
            sol
        };

        // Shared rhs piece: A(X R_d S^{-1}).
        let v_mats: Vec<DMatrix<T>> = (0..nb)
            .into_par_iter()
            .map(|t| &(&x[t] * &r_d[t]) * &s_inv[t])
            .collect();
        let a_dot = |mats: &[DMatrix<T>]| -> DVector<T> {
            DVector::from_iterator(
                m,
                data.a.iter().map(|terms| {
                    terms
                        .iter()
                        .fold(T::zero(), |acc, (t, mat)| acc + frob_dot(mat, &mats[*t]))
                }),
            )
        };
        let av = a_dot(&v_mats);

        // Direction from W = Rc S^{-1}.
        let direction = |w_mats: &[DMatrix<T>]| -> (DVector<T>, Vec<DMatrix<T>>, Vec<DMatrix<T>>) {
            let aw = a_dot(w_mats);
            let rhs = &r_p - &aw + &av;
            let dy = solve_schur(&rhs);
            let mut ds: Vec<DMatrix<T>> = r_d.clone();
            for (j, terms) in data.a.iter().enumerate() {
                for (t, mat) in terms {
                    ds[*t] -= mat * dy[j];
                }
            }
            let dx: Vec<DMatrix<T>> = (0..nb)
                .into_par_iter()
                .map(|t| {
                    let mut dxt = &w_mats[t] - &(&(&x[t] * &ds[t]) * &s_inv[t]);
                    symmetrize(&mut dxt);
                    dxt
                })
                .collect();
            (dy, ds, dx)
        };

        // Predictor: Rc = -X S, so W = -X.
        let w_aff: Vec<DMatrix<T>> = x.iter().map(|xt| -xt).collect();
        let (_dy_aff, ds_aff, dx_aff) = direction(&w_aff);
        let ap_aff = max_step(&x, &dx_aff, step_fraction);
        let ad_aff = max_step(&s, &ds_aff, step_fraction);

        let mu_aff = {
            let mut acc = T::zero();
            for t in 0..nb {
                let xt = &x[t] + &dx_aff[t] * ap_aff;
                let st = &s[t] + &ds_aff[t] * ad_aff;
                acc += frob_dot(&xt, &st);
            }
            acc / nu
        };
        let ratio = num_traits::Float::max(T::zero(), mu_aff / mu);
        let sigma = num_traits::Float::min(T::c(0.9999), ratio * ratio * ratio);

        // Corrector: Rc = sigma mu I - X S - dX_aff dS_aff.
        let w_corr: Vec<DMatrix<T>> = (0..nb)
            .into_par_iter()
            .map(|t| {
                &s_inv[t] * (sigma * mu) - &x[t] - &(&(&dx_aff[t] * &ds_aff[t]) * &s_inv[t])
            })
            .collect();
        let (dy, ds, dx) = direction(&w_corr);
        let alpha_p = max_step(&x, &dx, step_fraction);
        let alpha_d = max_step(&s, &ds, step_fraction);

        log::debug!("  step: alpha_p {:.3e} alpha_d {:.3e} sigma {:.3e}",
            alpha_p.to_subset().unwrap_or(f64::NAN),
            alpha_d.to_subset().unwrap_or(f64::NAN),
            sigma.to_subset().unwrap_or(f64::NAN));
        for t in 0..nb {
            x[t] += &dx[t] * alpha_p;
            s[t] += &ds[t] * alpha_d;
        }
        y += &dy * alpha_d;

        if num_traits::Float::min(alpha_p, alpha_d) < T::c(1e-8) {
            stall_count += 1;
            if stall_count >= 4 {
                let (_, bx, bs, by, bmet) = best.take().unwrap();
                let status = if bmet.merit() <= T::c(1e2) * settings.tol_gap {
                    Status::Inaccurate
                } else {
                    Status::Stalled
                };
                return Ok(finish(status, &bx, &bs, &by, &bmet, iter, None));
            }
        } else {
            stall_count = 0;
        }
    }

    let (_, bx, bs, by, bmet) = best.take().expect("at least one iterate");
    let status = if bmet.merit() <= T::c(1e2) * settings.tol_gap {
        Status::Inaccurate
    } else {
        Status::IterationLimit
    };
    Ok(finish(status, &bx, &bs, &by, &bmet, iterations, None))
}
