//! Dense two-phase simplex for the equality-constrained weighted ℓ1 program
//!
//! ```text
//! min Σ wᵢ|xᵢ|  s.t.  A x = y
//! ```
//!
//! posed as `min wᵀ(u + v)` over `A(u − v) = y`, `u, v ≥ 0`. Used as an
//! exact reference for the first-order solver; sizes are desk scale only.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: DVector<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Tableau {
    /// `rows × (cols + 1)`, last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.t[r][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = line[col];
            if f != 0.0 {
                for (v, pv) in line.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                line[col] = 0.0;
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Minimizes `cost` over the current basis with Bland's rule, restricted
    /// to columns `allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<()> {
        let scale = cost.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        loop {
            let rows = self.t.len();
            // Reduced costs c_j − c_Bᵀ B⁻¹ a_j.
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut rc = cost[j];
                for r in 0..rows {
                    rc -= cost[self.basis[r]] * self.t[r][j];
                }
                rc < -PIVOT_TOL * scale
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..rows {
                let a = self.t[r][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < best - 1e-14
                                || (ratio <= best + 1e-14 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::InvalidInput("linear program is unbounded".into()));
            };
            self.pivot(row, col);
            if self.pivots > 1_000_000 {
                return Err(Error::InvalidInput("simplex pivot limit reached".into()));
            }
        }
    }
}

/// Solves `min Σ wᵢ|xᵢ|` subject to `A x = y` exactly (up to rounding).
pub fn solve_equality_weighted_l1(a: &DMatrix<f64>, y: &DVector<f64>, w: &[f64]) -> Result<LpSolution> {
    let (m, n) = a.shape();
    let structural = 2 * n;
    let cols = structural + m;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if y[i] < 0.0 { -1.0 } else { 1.0 };
        let mut line = vec![0.0; cols + 1];
        for j in 0..n {
            line[j] = sign * a[(i, j)];
            line[n + j] = -sign * a[(i, j)];
        }
        line[structural + i] = 1.0;
        line[cols] = sign * y[i];
        t.push(line);
    }
    let mut tab = Tableau {
        t,
        basis: (structural..cols).collect(),
        cols,
        pivots: 0,
    };

    let mut phase1 = vec![0.0; cols];
    phase1[structural..].iter_mut().for_each(|c| *c = 1.0);
    tab.optimize(&phase1, cols)?;
    let infeasibility: f64 = (0..tab.t.len())
        .filter(|&r| tab.basis[r] >= structural)
        .map(|r| tab.rhs(r))
        .sum();
    if infeasibility > 1e-9 * (1.0 + y.amax()) {
        return Err(Error::Infeasible(format!(
            "y is not in the range of A (phase-one residual {infeasibility:e})"
        )));
    }

    // Drive artificials out of the basis; rows where that is impossible are
    // linearly dependent and dropped.
    let mut r = 0;
    while r < tab.t.len() {
        if tab.basis[r] >= structural {
            match (0..structural).find(|&j| tab.t[r][j].abs() > PIVOT_TOL) {
                Some(j) => tab.pivot(r, j),
                None => {
                    tab.t.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    let mut cost = vec![0.0; cols];
    for j in 0..n {
        cost[j] = w[j];
        cost[n + j] = w[j];
    }
    tab.optimize(&cost, structural)?;

    // Recompute the basic solution from the original data.
    let basic: Vec<usize> = tab.basis.clone();
    let b = DMatrix::from_fn(m, basic.len(), |i, c| {
        let j = basic[c];
        if j < n {
            a[(i, j)]
        } else {
            -a[(i, j - n)]
        }
    });
    let ls = linalg::least_squares(&b, y);
    let mut x = DVector::<f64>::zeros(n);
    for (c, &j) in basic.iter().enumerate() {
        let v = ls.x[c];
        if j < n {
            x[j] += v;
        } else {
            x[j - n] -= v;
        }
    }
    let objective = x.iter().zip(w).map(|(v, wi)| wi * v.abs()).sum::<f64>();
    Ok(LpSolution {
        x,
        objective,
        pivots: tab.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn identity_system() {
        let a = DMatrix::identity(4, 4);
        let y = DVector::from_vec(vec![0.0, 2.0, 0.0, 0.0]);
        let sol = solve_equality_weighted_l1(&a, &y, &[1.0; 4]).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-12);
        assert!((sol.x - y).amax() < 1e-12);
    }

    #[test]
    fn vertex_comparison_with_weights() {
        let a = DMatrix::from_column_slice(2, 3, &[1.0, 0.0, 0.0, 1.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let y = DVector::from_vec(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let sol = solve_equality_weighted_l1(&a, &y, &[1.0; 3]).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-12);
        assert!((sol.x[2] - 1.0).abs() < 1e-12);
        let sol = solve_equality_weighted_l1(&a, &y, &[1.0, 1.0, 10.0]).unwrap();
        assert!((sol.objective - 2f64.sqrt()).abs() < 1e-12);
        assert!(sol.x[2].abs() < 1e-12);
    }

    #[test]
    fn infeasible_right_hand_side() {
        let a = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        let y = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(
            solve_equality_weighted_l1(&a, &y, &[1.0, 1.0]),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 2.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, -3.0]);
        let sol = solve_equality_weighted_l1(&a, &y, &[1.0, 1.0, 1.0]).unwrap();
        assert!((sol.objective - 4.0).abs() < 1e-12);
        assert!((&a * &sol.x - &y).amax() < 1e-12);
    }
}
