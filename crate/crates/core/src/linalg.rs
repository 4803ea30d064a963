//! Small dense helpers shared by the analysis and solver modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Result of a dense least-squares solve.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub x: DVector<f64>,
    /// `‖b − A x‖₂`.
    pub residual: f64,
    pub rank: usize,
}

/// Householder QR with column pivoting by remaining column norm.
///
/// Stores the factorization compactly: `qr` holds R above the diagonal and
/// the Householder vectors below it, `perm[j]` is the original column placed
/// at position `j`.
struct PivotedQr {
    qr: DMatrix<f64>,
    diag: Vec<f64>,
    betas: Vec<f64>,
    perm: Vec<usize>,
}

impl PivotedQr {
    fn new(mut a: DMatrix<f64>) -> Self {
        let (m, n) = a.shape();
        let steps = m.min(n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut diag = vec![0.0; steps];
        let mut betas = vec![0.0; steps];
        let mut norms: Vec<f64> = (0..n).map(|j| a.column(j).norm_squared()).collect();

        for i in 0..steps {
            let mut best = i;
            for j in i + 1..n {
                if norms[j] > norms[best] {
                    best = j;
                }
            }
            if best != i {
                a.swap_columns(i, best);
                norms.swap(i, best);
                perm.swap(i, best);
            }

            let alpha = a.view((i, i), (m - i, 1)).norm();
            if alpha == 0.0 {
                diag[i] = 0.0;
                betas[i] = 0.0;
                continue;
            }
            let sign = if a[(i, i)] >= 0.0 { 1.0 } else { -1.0 };
            let r_ii = -sign * alpha;
            // v = x − r_ii e₁, stored in place with v₀ = a_ii − r_ii.
            a[(i, i)] -= r_ii;
            let v_norm2 = a.view((i, i), (m - i, 1)).norm_squared();
            let beta = 2.0 / v_norm2;
            for j in i + 1..n {
                let mut dot = 0.0;
                for r in i..m {
                    dot += a[(r, i)] * a[(r, j)];
                }
                let s = beta * dot;
                for r in i..m {
                    let vi = a[(r, i)];
                    a[(r, j)] -= s * vi;
                }
            }
            diag[i] = r_ii;
            betas[i] = beta;
            for j in i + 1..n {
                let top = a[(i, j)];
                norms[j] = (norms[j] - top * top).max(0.0);
            }
        }
        PivotedQr {
            qr: a,
            diag,
            betas,
            perm,
        }
    }

    fn rank(&self, rel_tol: f64) -> usize {
        let largest = self.diag.first().map(|d| d.abs()).unwrap_or(0.0);
        if largest == 0.0 {
            return 0;
        }
        self.diag
            .iter()
            .take_while(|d| d.abs() > rel_tol * largest)
            .count()
    }

    fn apply_qt(&self, b: &mut DVector<f64>) {
        let m = self.qr.nrows();
        for (i, &beta) in self.betas.iter().enumerate() {
            if beta == 0.0 {
                continue;
            }
            let mut dot = 0.0;
            for r in i..m {
                dot += self.qr[(r, i)] * b[r];
            }
            let s = beta * dot;
            for r in i..m {
                b[r] -= s * self.qr[(r, i)];
            }
        }
    }
}

const RANK_TOL: f64 = 1e-10;

/// Minimum-residual solution of `A x ≈ b`.
///
/// Full column rank goes through pivoted QR; rank-deficient systems return
/// the minimal-norm least-squares solution.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> LeastSquares {
    let (m, n) = a.shape();
    assert_eq!(m, b.len(), "least_squares: dimension mismatch");
    if n == 0 {
        return LeastSquares {
            x: DVector::zeros(0),
            residual: b.norm(),
            rank: 0,
        };
    }
    let qr = PivotedQr::new(a.clone());
    let rank = qr.rank(RANK_TOL);
    let x = if rank == n {
        let mut qtb = b.clone();
        qr.apply_qt(&mut qtb);
        let mut z = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = qtb[i];
            for j in i + 1..n {
                s -= qr.qr[(i, j)] * z[j];
            }
            z[i] = s / qr.diag[i];
        }
        let mut x = DVector::zeros(n);
        for (j, &col) in qr.perm.iter().enumerate() {
            x[col] = z[j];
        }
        x
    } else {
        min_norm_solve(a, b)
    };
    let residual = (b - a * &x).norm();
    LeastSquares { x, residual, rank }
}

fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = RANK_TOL * smax.max(f64::MIN_POSITIVE);
    svd.solve(b, eps)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

/// Numerical rank of `a` from pivoted QR.
pub fn rank(a: &DMatrix<f64>) -> usize {
    PivotedQr::new(a.clone()).rank(RANK_TOL)
}

/// Orthogonal projection of `v` onto the orthogonal complement of `range(b)`.
pub fn project_out(b: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    if b.ncols() == 0 {
        return v.clone();
    }
    let ls = least_squares(b, v);
    v - b * ls.x
}

/// Largest singular value of `a` by power iteration on `AᵀA`.
///
/// Stops when successive estimates differ by less than `rel_tol` relative.
pub fn operator_norm(a: &DMatrix<f64>, rel_tol: f64) -> f64 {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return 0.0;
    }
    // Deterministic, non-degenerate starting vector.
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_75).fract());
    v /= v.norm();
    let mut estimate = 0.0;
    for _ in 0..10_000 {
        let av = a * &v;
        let w = a.tr_mul(&av);
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm.sqrt();
        v = w / norm;
        if (next - estimate).abs() <= rel_tol * next {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn symmetric_extremes(g: &DMatrix<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(g.clone());
    (eig.eigenvalues.min(), eig.eigenvalues.max())
}

/// Largest singular value of a (small) dense matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Sylvester Hadamard matrix of order `m` scaled to be orthonormal.
///
/// Returns `None` unless `m` is a power of two.
pub fn normalized_hadamard(m: usize) -> Option<DMatrix<f64>> {
    if m == 0 || !m.is_power_of_two() {
        return None;
    }
    let scale = 1.0 / (m as f64).sqrt();
    Some(DMatrix::from_fn(m, m, |i, j| {
        if (i & j).count_ones() % 2 == 0 {
            scale
        } else {
            -scale
        }
    }))
}
