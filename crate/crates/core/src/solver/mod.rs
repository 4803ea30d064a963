//! Weighted ℓ1 recovery
//!
//! ```text
//! min Σ wᵢ|xᵢ|  s.t.  ‖y − A x‖₂ ≤ ε
//! ```
//!
//! solved with a Chambolle–Pock primal–dual iteration on the saddle problem
//! `min_x max_z ‖x‖_{1,w} + ⟨Ax, z⟩ − ⟨y, z⟩ − ε‖z‖₂`. Convergence is
//! declared only once a dual-feasible point certifies the relative duality
//! gap; iterates are periodically polished on their active set, which makes
//! the certified solutions exact to rounding on well-posed instances.

mod format;
pub mod l0;
pub mod lp;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::matrix::SensingMatrix;
use crate::support::IndexSet;

pub use l0::solve_l0_oracle;

/// One instance of the weighted recovery program.
#[derive(Debug, Clone)]
pub struct RecoveryProblem {
    pub a: SensingMatrix,
    pub y: DVector<f64>,
    /// Noise-ball radius; zero means `A x = y`.
    pub epsilon: f64,
    pub weights: Vec<f64>,
}

impl RecoveryProblem {
    pub fn new(a: SensingMatrix, y: DVector<f64>, epsilon: f64, weights: Vec<f64>) -> Result<Self> {
        if y.len() != a.rows() {
            return invalid(format!("y has length {}, A has {} rows", y.len(), a.rows()));
        }
        if weights.len() != a.cols() {
            return invalid(format!(
                "{} weights for {} columns",
                weights.len(),
                a.cols()
            ));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return invalid(format!("epsilon = {epsilon} must be finite and nonnegative"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return invalid("weights must be finite and nonnegative");
        }
        if y.iter().any(|v| !v.is_finite()) {
            return invalid("y has non-finite entries");
        }
        Ok(RecoveryProblem {
            a,
            y,
            epsilon,
            weights,
        })
    }

    /// Weight `w` on `prior`, 1 elsewhere.
    pub fn with_prior(
        a: SensingMatrix,
        y: DVector<f64>,
        epsilon: f64,
        prior: &IndexSet,
        w: f64,
    ) -> Result<Self> {
        let n = a.cols();
        if prior.bound() > n {
            return invalid(format!("prior index {} exceeds n = {n}", prior.bound()));
        }
        RecoveryProblem::new(a, y, epsilon, prior_weights(n, prior, w))
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        weighted_l1(&self.weights, x)
    }

    /// `max(‖y − A x‖₂ − ε, 0)`.
    pub fn feasibility_residual(&self, x: &DVector<f64>) -> f64 {
        ((&self.y - self.a.apply(x)).norm() - self.epsilon).max(0.0)
    }
}

/// Weight vector with `w` on `prior` and 1 on its complement.
pub fn prior_weights(n: usize, prior: &IndexSet, w: f64) -> Vec<f64> {
    (0..n).map(|i| if prior.contains(i) { w } else { 1.0 }).collect()
}

fn weighted_l1(w: &[f64], x: &DVector<f64>) -> f64 {
    x.iter().zip(w).map(|(v, wi)| wi * v.abs()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative duality gap, `gap / (1 + objective)`.
    pub opt_tol: f64,
    /// Absolute excess of `‖y − Ax‖₂` over `ε`.
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Iterations between certification attempts.
    pub check_every: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            opt_tol: 1e-8,
            feas_tol: 1e-9,
            max_iter: 200_000,
            check_every: 25,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x_star: DVector<f64>,
    /// `Σ wᵢ|xᵢ*|`.
    pub objective: f64,
    /// `max(‖y − A x*‖₂ − ε, 0)`.
    pub feasibility_residual: f64,
    /// Relative duality gap certified for `x_star` (infinite if none found).
    pub duality_gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Dual objective `⟨y, ν⟩ − ε‖ν‖₂` of the best multiple of `direction` that
/// is dual feasible (`|aᵢᵀν| ≤ wᵢ`). Components along zero-weight columns
/// are projected out first. Never below 0 (the point `ν = 0`).
fn scaled_dual_bound(p: &RecoveryProblem, direction: &DVector<f64>, zero_cols: &DMatrix<f64>) -> f64 {
    let nu = linalg::project_out(zero_cols, direction);
    let value = p.y.dot(&nu) - p.epsilon * nu.norm();
    if !(value > 0.0) {
        return 0.0;
    }
    let corr = p.a.apply_transpose(&nu);
    let mut scale = f64::INFINITY;
    for (c, &w) in corr.iter().zip(&p.weights) {
        if w > 0.0 && c.abs() > 0.0 {
            scale = scale.min(w / c.abs());
        }
    }
    if !scale.is_finite() {
        // Direction orthogonal to every weighted column: the dual is unbounded
        // unless the primal is infeasible, so treat it as no information.
        return 0.0;
    }
    scale * value
}

fn zero_weight_columns(p: &RecoveryProblem) -> DMatrix<f64> {
    let zeros: Vec<usize> = (0..p.a.cols()).filter(|&i| p.weights[i] == 0.0).collect();
    p.a.select_columns(&zeros)
}

/// Polished candidate on a fixed support with the multiplier direction that
/// certifies it.
struct Polished {
    x: DVector<f64>,
    dual_direction: DVector<f64>,
}

/// Solves the KKT system restricted to `support` with the sign pattern of
/// `reference`.
fn polish(p: &RecoveryProblem, support: &[usize], reference: &DVector<f64>, dual_hint: &DVector<f64>) -> Option<Polished> {
    let n = p.a.cols();
    let m = p.a.rows();
    if support.len() > m {
        return None;
    }
    let a_s = p.a.select_columns(support);
    if linalg::rank(&a_s) < support.len() {
        return None;
    }
    let ls = linalg::least_squares(&a_s, &p.y);
    let ws = DVector::from_iterator(
        support.len(),
        support.iter().map(|&i| p.weights[i] * reference[i].signum()),
    );
    let mut x = DVector::zeros(n);
    if p.epsilon == 0.0 {
        if ls.residual > 1e-10 * (1.0 + p.y.norm()) {
            return None;
        }
        for (c, &i) in support.iter().enumerate() {
            x[i] = ls.x[c];
        }
        // Multiplier: closest point to the hint with A_Sᵀν = w_S∘sign(x_S).
        let signs = DVector::from_iterator(
            support.len(),
            support.iter().map(|&i| p.weights[i] * x[i].signum()),
        );
        let rhs = &signs - a_s.tr_mul(dual_hint);
        let correction = linalg::least_squares(&a_s.transpose(), &rhs);
        return Some(Polished {
            x,
            dual_direction: dual_hint + correction.x,
        });
    }

    let gram = a_s.tr_mul(&a_s);
    let chol = gram.cholesky()?;
    let push = chol.solve(&ws);
    let q = ws.dot(&push);
    let r2 = ls.residual * ls.residual;
    let eps2 = p.epsilon * p.epsilon;
    let xs = if q <= 1e-300 {
        ls.x.clone()
    } else {
        if r2 >= eps2 {
            return None;
        }
        let step = ((eps2 - r2) / q).sqrt();
        let xs = &ls.x - push * step;
        for (c, &i) in support.iter().enumerate() {
            if p.weights[i] > 0.0 && xs[c].signum() != reference[i].signum() {
                return None;
            }
        }
        xs
    };
    for (c, &i) in support.iter().enumerate() {
        x[i] = xs[c];
    }
    let residual = &p.y - p.a.apply(&x);
    Some(Polished {
        x,
        dual_direction: residual,
    })
}

struct Certified {
    x: DVector<f64>,
    gap: f64,
    feas: f64,
}

fn certify(
    p: &RecoveryProblem,
    x: &DVector<f64>,
    z: &DVector<f64>,
    zero_cols: &DMatrix<f64>,
) -> Option<Certified> {
    let nu_hint = -z;
    let largest = x.amax();
    let mut best: Option<Certified> = None;
    let mut consider = |cand: DVector<f64>, bound: f64| {
        let f = p.objective(&cand);
        let feas = p.feasibility_residual(&cand);
        let gap = ((f - bound) / (1.0 + f.abs())).max(0.0);
        let better = match &best {
            None => true,
            Some(b) => gap.max(feas) < b.gap.max(b.feas),
        };
        if better {
            best = Some(Certified { x: cand, gap, feas });
        }
    };

    if largest > 0.0 {
        for rel in [1e-3, 1e-6, 1e-9] {
            let support: Vec<usize> = (0..x.len()).filter(|&i| x[i].abs() > rel * largest).collect();
            if let Some(pol) = polish(p, &support, x, &nu_hint) {
                let bound = scaled_dual_bound(p, &pol.dual_direction, zero_cols);
                consider(pol.x, bound);
            }
        }
    }
    let residual = &p.y - p.a.apply(x);
    let bound = scaled_dual_bound(p, &residual, zero_cols).max(scaled_dual_bound(p, &nu_hint, zero_cols));
    consider(x.clone(), bound);
    best
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Solves the weighted ℓ1 program.
///
/// All-one weights give plain ℓ1 minimization; zero weights on a prior
/// support give the modified-CS program. Hitting the iteration cap is
/// reported through `converged = false`, not an error.
pub fn solve_weighted_l1(p: &RecoveryProblem, tol: &Tolerances) -> Result<SolveReport> {
    let n = p.a.cols();
    let a = p.a.entries();

    if p.epsilon == 0.0 {
        let ls = linalg::least_squares(a, &p.y);
        if ls.residual > 1e-9 * (1.0 + p.y.norm()) {
            return Err(Error::Infeasible(format!(
                "y is not in the range of A (residual {:e})",
                ls.residual
            )));
        }
    }
    if p.y.norm() <= p.epsilon {
        return Ok(SolveReport {
            x_star: DVector::zeros(n),
            objective: 0.0,
            feasibility_residual: 0.0,
            duality_gap: 0.0,
            iterations: 0,
            converged: true,
        });
    }

    let zero_cols = zero_weight_columns(p);
    let norm = linalg::operator_norm(a, 1e-10);
    let tau = 0.99 / norm;
    let sigma = 0.99 / norm;

    let mut x = DVector::zeros(n);
    let mut z = DVector::zeros(p.a.rows());
    let mut ax_bar = DVector::zeros(p.a.rows());
    let mut at_z = DVector::zeros(n);
    let mut x_prev = x.clone();
    let mut best: Option<Certified> = None;

    for iter in 1..=tol.max_iter {
        // Dual step: z ← prox_{σ g*}(z + σ A x̄), g the indicator of the ε-ball
        // around y; Moreau: v − σ proj_ball(v / σ).
        let v = &z + &ax_bar * sigma;
        let center = &v / sigma - &p.y;
        let cn = center.norm();
        let proj = if cn > p.epsilon {
            &p.y + center * (p.epsilon / cn)
        } else {
            &v / sigma
        };
        z = v - proj * sigma;

        at_z.gemv_tr(1.0, a, &z, 0.0);
        x_prev.copy_from(&x);
        for i in 0..n {
            x[i] = soft_threshold(x[i] - tau * at_z[i], tau * p.weights[i]);
        }
        let x_bar = &x * 2.0 - &x_prev;
        ax_bar.gemv(1.0, a, &x_bar, 0.0);

        if iter % tol.check_every == 0 || iter == tol.max_iter {
            if let Some(c) = certify(p, &x, &z, &zero_cols) {
                let done = c.gap <= tol.opt_tol && c.feas <= tol.feas_tol;
                let improves = best
                    .as_ref()
                    .map_or(true, |b| c.gap.max(c.feas) < b.gap.max(b.feas));
                if done {
                    return Ok(report(p, c, iter, true));
                }
                if improves {
                    best = Some(c);
                }
            }
        }
    }
    let fallback = best.unwrap_or_else(|| Certified {
        feas: p.feasibility_residual(&x),
        x,
        gap: f64::INFINITY,
    });
    Ok(report(p, fallback, tol.max_iter, false))
}

fn report(p: &RecoveryProblem, c: Certified, iterations: usize, converged: bool) -> SolveReport {
    SolveReport {
        objective: p.objective(&c.x),
        feasibility_residual: c.feas,
        duality_gap: c.gap,
        x_star: c.x,
        iterations,
        converged,
    }
}

/// First-order optimality residual of `x`.
///
/// Returns `max(feasibility excess, relative duality gap)` where the gap is
/// measured against a dual-feasible certificate built from `x` alone: for
/// `ε > 0` the multiplier direction is the residual `y − A x`; for `ε = 0`
/// the exact optimum from the simplex reference is used. The value is zero
/// at an optimal vertex and bounds the relative suboptimality of a feasible
/// `x` from above.
pub fn kkt_check(p: &RecoveryProblem, x: &DVector<f64>) -> f64 {
    if x.len() != p.a.cols() || x.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let f = p.objective(x);
    let feas = p.feasibility_residual(x);
    let bound = if p.epsilon == 0.0 {
        match lp::solve_equality_weighted_l1(p.a.entries(), &p.y, &p.weights) {
            Ok(sol) => sol.objective,
            Err(_) => return f64::INFINITY,
        }
    } else {
        let residual = &p.y - p.a.apply(x);
        scaled_dual_bound(p, &residual, &zero_weight_columns(p))
    };
    let gap = ((f - bound) / (1.0 + f.abs())).max(0.0);
    gap.max(feas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{generate_matrix, MatrixKind};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn three_columns() -> SensingMatrix {
        SensingMatrix::new(DMatrix::from_column_slice(
            2,
            3,
            &[1.0, 0.0, 0.0, 1.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        ))
        .unwrap()
    }

    #[test]
    fn identity_system() {
        let a = SensingMatrix::new(DMatrix::identity(4, 4)).unwrap();
        let y = DVector::from_vec(vec![0.0, 2.0, 0.0, 0.0]);
        let p = RecoveryProblem::new(a, y.clone(), 0.0, vec![1.0; 4]).unwrap();
        let r = solve_weighted_l1(&p, &Tolerances::default()).unwrap();
        assert!(r.converged);
        assert!((&r.x_star - &y).amax() < 1e-12);
        assert!(kkt_check(&p, &y) < 1e-14);
    }

    #[test]
    fn single_column_beats_two_spikes() {
        let a = three_columns();
        let y = a.entries().column(2).into_owned();
        let p = RecoveryProblem::new(a.clone(), y.clone(), 0.0, vec![1.0; 3]).unwrap();
        let r = solve_weighted_l1(&p, &Tolerances::default()).unwrap();
        assert!(r.converged);
        assert!((r.x_star.clone() - DVector::from_vec(vec![0.0, 0.0, 1.0])).amax() < 1e-9);

        let p = RecoveryProblem::new(a, y, 0.0, vec![1.0, 1.0, 10.0]).unwrap();
        let r = solve_weighted_l1(&p, &Tolerances::default()).unwrap();
        assert!(r.converged);
        let expected = DVector::from_vec(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
        assert!((r.x_star - expected).amax() < 1e-9);
    }

    #[test]
    fn kkt_detects_objective_increase() {
        let a = three_columns();
        let y = a.entries().column(2).into_owned();
        let p = RecoveryProblem::new(a, y, 0.0, vec![1.0; 3]).unwrap();
        let opt = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        assert!(kkt_check(&p, &opt) <= 1e-12);
        // Null-space direction of A: (1, 1, −√2)/2 keeps A x = y.
        let d = DVector::from_vec(vec![0.5, 0.5, -FRAC_1_SQRT_2]);
        let moved = &opt + d * 1e-2;
        assert!(p.feasibility_residual(&moved) < 1e-15);
        assert!(p.objective(&moved) > p.objective(&opt));
        assert!(kkt_check(&p, &moved) > 1e-4);
    }

    #[test]
    fn infeasible_equality_constraint() {
        let a = SensingMatrix::new(DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 1.0, 0.0])).unwrap();
        let p = RecoveryProblem::new(a, DVector::from_vec(vec![1.0, 1.0]), 0.0, vec![1.0; 2]).unwrap();
        assert!(matches!(solve_weighted_l1(&p, &Tolerances::default()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn zero_measurement_gives_zero() {
        let a = generate_matrix(&MatrixKind::GaussianNormalized, 4, 8, 1).unwrap();
        let p = RecoveryProblem::new(a, DVector::zeros(4), 0.0, vec![1.0; 8]).unwrap();
        let r = solve_weighted_l1(&p, &Tolerances::default()).unwrap();
        assert!(r.converged && r.x_star.amax() == 0.0);
    }

    #[test]
    fn noisy_solve_is_certified() {
        let a = generate_matrix(&MatrixKind::GaussianNormalized, 10, 20, 7).unwrap();
        let mut x = DVector::zeros(20);
        x[3] = 1.5;
        x[11] = -0.8;
        let y = a.apply(&x) + DVector::from_element(10, 0.01);
        let prior = IndexSet::new(vec![3, 5]);
        let p = RecoveryProblem::with_prior(a, y, 0.05, &prior, 0.3).unwrap();
        let r = solve_weighted_l1(&p, &Tolerances::default()).unwrap();
        assert!(r.converged, "gap {} feas {}", r.duality_gap, r.feasibility_residual);
        assert!(r.feasibility_residual <= 1e-9);
        assert!(kkt_check(&p, &r.x_star) <= 1e-8);
    }

    #[test]
    fn zero_weights_on_prior() {
        let a = generate_matrix(&MatrixKind::GaussianNormalized, 8, 16, 3).unwrap();
        let mut x = DVector::zeros(16);
        x[1] = 1.0;
        x[9] = -2.0;
        x[12] = 0.5;
        let y = a.apply(&x);
        let prior = IndexSet::new(vec![1, 9]);
        for eps in [0.0, 0.02] {
            let p = RecoveryProblem::with_prior(a.clone(), y.clone(), eps, &prior, 0.0).unwrap();
            let r = solve_weighted_l1(&p, &Tolerances::default()).unwrap();
            assert!(r.converged, "eps {eps}: gap {}", r.duality_gap);
            assert!(kkt_check(&p, &r.x_star) <= 1e-8);
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let a = generate_matrix(&MatrixKind::GaussianNormalized, 8, 16, 3).unwrap();
        let mut x = DVector::zeros(16);
        x[2] = 1.0;
        x[5] = 1.0;
        let p = RecoveryProblem::new(a.clone(), a.apply(&x), 0.0, vec![1.0; 16]).unwrap();
        let tol = Tolerances {
            max_iter: 3,
            check_every: 1000,
            ..Tolerances::default()
        };
        let r = solve_weighted_l1(&p, &tol).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
