//! Sensing matrices, mutual coherence and exhaustive RIC/ROC oracles.

use std::fmt::Write as _;
use std::sync::OnceLock;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::linalg;

/// Largest `n` for which [`ric_exact`] and [`roc_exact`] enumerate supports.
pub const ORACLE_MAX_COLS: usize = 16;
/// Largest support size the exhaustive oracles accept.
pub const ORACLE_MAX_SPARSITY: usize = 6;

/// Real `m × n` measurement matrix with unit-norm columns.
///
/// Columns are renormalized on construction; the norms of the columns as
/// supplied are kept in `column_norms`.
#[derive(Debug, Clone)]
pub struct SensingMatrix {
    entries: DMatrix<f64>,
    column_norms: Vec<f64>,
    coherence: OnceLock<f64>,
}

impl PartialEq for SensingMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries && self.column_norms == other.column_norms
    }
}

impl SensingMatrix {
    pub fn new(mut entries: DMatrix<f64>) -> Result<Self> {
        let (m, n) = entries.shape();
        if m == 0 || n == 0 {
            return invalid(format!("matrix must be non-empty, got {m}x{n}"));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return invalid("matrix has non-finite entries");
        }
        let mut column_norms = Vec::with_capacity(n);
        for j in 0..n {
            let norm = entries.column(j).norm();
            if norm <= 0.0 {
                return invalid(format!("column {} has zero norm", j + 1));
            }
            if norm != 1.0 {
                entries.column_mut(j).scale_mut(1.0 / norm);
            }
            column_norms.push(norm);
        }
        Ok(SensingMatrix {
            entries,
            column_norms,
            coherence: OnceLock::new(),
        })
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Norms of the columns before normalization.
    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    /// Columns `support` as a dense `m × |support|` matrix.
    pub fn select_columns(&self, support: &[usize]) -> DMatrix<f64> {
        self.entries.select_columns(support)
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.entries * x
    }

    pub fn apply_transpose(&self, y: &DVector<f64>) -> DVector<f64> {
        self.entries.tr_mul(y)
    }

    /// Mutual coherence, computed once and cached.
    pub fn coherence(&self) -> Result<f64> {
        if let Some(mu) = self.coherence.get() {
            return Ok(*mu);
        }
        let mu = coherence_of(&self.entries)?;
        Ok(*self.coherence.get_or_init(|| mu))
    }
}

/// Mutual coherence of an arbitrary (not necessarily normalized) matrix:
/// `max_{i≠j} |aᵢᵀaⱼ| / (‖aᵢ‖‖aⱼ‖)`.
pub fn coherence_of(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.ncols();
    if n < 2 {
        return invalid(format!("coherence needs at least 2 columns, got {n}"));
    }
    let norms: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    if let Some(j) = norms.iter().position(|&v| v <= 0.0) {
        return invalid(format!("column {} has zero norm", j + 1));
    }
    let gram = a.tr_mul(a);
    let mut mu: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let c = (gram[(i, j)] / (norms[i] * norms[j])).abs();
            mu = mu.max(c);
        }
    }
    Ok(mu.min(1.0))
}

/// Mutual coherence of a sensing matrix.
pub fn coherence(a: &SensingMatrix) -> Result<f64> {
    a.coherence()
}

fn check_oracle_budget(n: usize, sizes: &[usize]) -> Result<()> {
    if n > ORACLE_MAX_COLS {
        return Err(Error::BudgetExceeded(format!(
            "n = {n} exceeds {ORACLE_MAX_COLS} columns"
        )));
    }
    if let Some(s) = sizes.iter().find(|&&s| s > ORACLE_MAX_SPARSITY) {
        return Err(Error::BudgetExceeded(format!(
            "support size {s} exceeds {ORACLE_MAX_SPARSITY}"
        )));
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn max_over<T, F>(items: Vec<T>, f: F) -> f64
where
    T: Send,
    F: Fn(T) -> f64 + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).reduce(|| 0.0, f64::max)
}

#[cfg(not(feature = "parallel"))]
fn max_over<T, F>(items: Vec<T>, f: F) -> f64
where
    F: Fn(T) -> f64,
{
    items.into_iter().map(f).fold(0.0, f64::max)
}

/// Exact restricted isometry constant `δ_k` by enumerating every support of
/// size `k`.
pub fn ric_exact(a: &SensingMatrix, k: usize) -> Result<f64> {
    let n = a.cols();
    check_oracle_budget(n, &[k])?;
    if k == 0 || k > n {
        return invalid(format!("k = {k} must lie in 1..={n}"));
    }
    let supports: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    Ok(max_over(supports, |s| {
        let sub = a.select_columns(&s);
        let (lo, hi) = linalg::symmetric_extremes(&sub.tr_mul(&sub));
        (hi - 1.0).max(1.0 - lo)
    }))
}

/// Exact restricted orthogonality constant `θ_{s,s̃}`.
///
/// Sub-blocks of `A_TᵀA_T̃` have smaller spectral norm, so only supports of
/// full sizes `s` and `s̃` are enumerated.
pub fn roc_exact(a: &SensingMatrix, s: usize, s_tilde: usize) -> Result<f64> {
    let n = a.cols();
    check_oracle_budget(n, &[s, s_tilde])?;
    if s + s_tilde > n {
        return invalid(format!("s + s_tilde = {} exceeds n = {n}", s + s_tilde));
    }
    if s == 0 || s_tilde == 0 {
        return Ok(0.0);
    }
    let firsts: Vec<Vec<usize>> = (0..n).combinations(s).collect();
    Ok(max_over(firsts, |t| {
        let a_t = a.select_columns(&t);
        let rest: Vec<usize> = (0..n).filter(|i| !t.contains(i)).collect();
        rest.into_iter()
            .combinations(s_tilde)
            .map(|u| linalg::spectral_norm(&a_t.tr_mul(&a.select_columns(&u))))
            .fold(0.0, f64::max)
    }))
}

/// RIC information at one sparsity level.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryReport {
    pub k: usize,
    /// Exhaustive `δ_k`, present only within the oracle budget.
    pub delta_exact: Option<f64>,
    /// `(k − 1) μ`.
    pub delta_coherence_bound: f64,
    /// Exhaustive `θ_{k,k}`, present only within the oracle budget.
    pub theta_exact: Option<f64>,
}

pub fn isometry_report(a: &SensingMatrix, k: usize) -> Result<IsometryReport> {
    let mu = a.coherence()?;
    let n = a.cols();
    let within = n <= ORACLE_MAX_COLS && k <= ORACLE_MAX_SPARSITY && k >= 1 && k <= n;
    let delta_exact = if within { Some(ric_exact(a, k)?) } else { None };
    let theta_exact = if within && 2 * k <= n {
        Some(roc_exact(a, k, k)?)
    } else {
        None
    };
    Ok(IsometryReport {
        k,
        delta_exact,
        delta_coherence_bound: (k as f64 - 1.0) * mu,
        theta_exact,
    })
}

/// Families of generated matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixKind {
    /// i.i.d. standard normal entries, columns normalized.
    GaussianNormalized,
    /// `[Iₘ | H]` with `H` the orthonormal Sylvester–Hadamard basis, `n = 2m`.
    IdentityPlusOrthobasis,
    /// A user-supplied matrix.
    Explicit(DMatrix<f64>),
}

impl MatrixKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "gaussian" | "gaussian-normalized" => Ok(MatrixKind::GaussianNormalized),
            "identity-plus-orthobasis" | "ipo" => Ok(MatrixKind::IdentityPlusOrthobasis),
            other => invalid(format!("unknown matrix kind '{other}'")),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MatrixKind::GaussianNormalized => "gaussian-normalized",
            MatrixKind::IdentityPlusOrthobasis => "identity-plus-orthobasis",
            MatrixKind::Explicit(_) => "explicit",
        }
    }
}

pub fn generate_matrix(kind: &MatrixKind, m: usize, n: usize, seed: u64) -> Result<SensingMatrix> {
    if m == 0 || n == 0 {
        return invalid(format!("matrix dimensions must be positive, got {m}x{n}"));
    }
    match kind {
        MatrixKind::GaussianNormalized => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let entries = DMatrix::from_fn(m, n, |_, _| StandardNormal.sample(&mut rng));
            SensingMatrix::new(entries)
        }
        MatrixKind::IdentityPlusOrthobasis => {
            if n != 2 * m {
                return invalid(format!("identity-plus-orthobasis needs n = 2m, got m={m}, n={n}"));
            }
            let h = linalg::normalized_hadamard(m).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "identity-plus-orthobasis needs m to be a power of two, got {m}"
                ))
            })?;
            let mut entries = DMatrix::zeros(m, n);
            entries.view_mut((0, 0), (m, m)).fill_with_identity();
            entries.view_mut((0, m), (m, m)).copy_from(&h);
            SensingMatrix::new(entries)
        }
        MatrixKind::Explicit(entries) => {
            if entries.shape() != (m, n) {
                return invalid(format!(
                    "explicit matrix is {}x{}, expected {m}x{n}",
                    entries.nrows(),
                    entries.ncols()
                ));
            }
            SensingMatrix::new(entries.clone())
        }
    }
}

/// Serializes a matrix as `"m n"` followed by `m` rows of `n` reals.
///
/// Reals use the shortest representation that parses back to the same bits.
pub fn format_matrix(a: &DMatrix<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        let row = (0..a.ncols()).map(|j| format!("{:?}", a[(i, j)])).join(" ");
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Parses the format written by [`format_matrix`].
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut tokens = text.split_whitespace();
    parse_matrix_tokens(&mut tokens)
}

pub(crate) fn parse_matrix_tokens<'a>(
    tokens: &mut impl Iterator<Item = &'a str>,
) -> Result<DMatrix<f64>> {
    let mut dim = |what: &str| -> Result<usize> {
        let tok = tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))?;
        tok.parse()
            .map_err(|_| Error::Parse(format!("bad {what} '{tok}'")))
    };
    let m = dim("row count")?;
    let n = dim("column count")?;
    let mut values = Vec::with_capacity(m * n);
    for idx in 0..m * n {
        let tok = tokens.next().ok_or_else(|| {
            Error::Parse(format!("matrix ended after {idx} of {} entries", m * n))
        })?;
        values.push(parse_real(tok)?);
    }
    Ok(DMatrix::from_row_slice(m, n, &values))
}

pub(crate) fn parse_real(tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad real '{tok}'")))
}
