use itertools::Itertools;
use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg;

use super::RecoveryProblem;

/// Largest `n` accepted by the exhaustive ℓ0 oracle.
pub const L0_MAX_COLS: usize = 14;
/// Largest support size it will enumerate.
pub const L0_MAX_SPARSITY: usize = 5;

/// Sparsest `x` with `‖y − A x‖₂ ≤ ε`, found by enumerating supports of size
/// `0, 1, …, k_max`.
///
/// Among feasible supports of the smallest size the one with the least
/// residual wins, ties going to the lexicographically first support. Returns
/// the minimizer and its sparsity.
pub fn solve_l0_oracle(p: &RecoveryProblem, k_max: usize) -> Result<(DVector<f64>, usize)> {
    let n = p.a.cols();
    if n > L0_MAX_COLS || k_max > L0_MAX_SPARSITY {
        return Err(Error::BudgetExceeded(format!(
            "l0 enumeration limited to n <= {L0_MAX_COLS} and k <= {L0_MAX_SPARSITY} (got n = {n}, k = {k_max})"
        )));
    }
    let slack = 1e-12 * (1.0 + p.y.norm());
    if p.y.norm() <= p.epsilon + slack {
        return Ok((DVector::zeros(n), 0));
    }
    for k in 1..=k_max.min(n) {
        let mut best: Option<(f64, Vec<usize>, DVector<f64>)> = None;
        for support in (0..n).combinations(k) {
            let ls = linalg::least_squares(&p.a.select_columns(&support), &p.y);
            if ls.residual > p.epsilon + slack {
                continue;
            }
            if best.as_ref().map_or(true, |(r, _, _)| ls.residual < *r - slack) {
                best = Some((ls.residual, support, ls.x));
            }
        }
        if let Some((_, support, coeffs)) = best {
            let mut x = DVector::zeros(n);
            for (c, &i) in support.iter().enumerate() {
                x[i] = coeffs[c];
            }
            return Ok((x, k));
        }
    }
    Err(Error::NoSolution { k_max })
}
