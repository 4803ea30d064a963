//! Support-set arithmetic: best k-term approximations, the `(ρ, α)` geometry
//! of a prior support, and the error multipliers of the recovery bounds.

use std::fmt;

use crate::error::{invalid, Error, Result};

/// Sorted set of distinct 0-based indices.
///
/// Text form is 1-based and comma-separated, e.g. `1,4,7`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        IndexSet(indices)
    }

    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn intersection_len(&self, other: &IndexSet) -> usize {
        self.iter().filter(|&i| other.contains(i)).count()
    }

    /// Largest index + 1, or 0 when empty.
    pub fn bound(&self) -> usize {
        self.0.last().map_or(0, |&i| i + 1)
    }

    /// Parses 1-based comma-separated indices; the empty string is the empty set.
    pub fn parse_one_based(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(IndexSet::empty());
        }
        let mut out = Vec::new();
        for tok in text.split(',') {
            let tok = tok.trim();
            let i: usize = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad index '{tok}'")))?;
            if i == 0 {
                return Err(Error::Parse("indices are 1-based".into()));
            }
            out.push(i - 1);
        }
        Ok(IndexSet::new(out))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, i) in self.0.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        IndexSet::new(iter.into_iter().collect())
    }
}

/// Indices of `x` ordered by decreasing magnitude, ties by lowest index.
pub fn magnitude_order(x: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
    order
}

/// Best k-term approximation: keeps the `k` largest-magnitude entries.
///
/// Returns `x_k` and `T₀ = supp(x_k)`; `T₀` can be smaller than `k` when `x`
/// has fewer than `k` nonzeros.
pub fn best_k_term(x: &[f64], k: usize) -> Result<(Vec<f64>, IndexSet)> {
    let n = x.len();
    if k < 1 || k > n {
        return invalid(format!("k = {k} must lie in 1..={n}"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return invalid("signal has non-finite entries");
    }
    let mut xk = vec![0.0; n];
    let mut top = Vec::with_capacity(k);
    for i in magnitude_order(x).into_iter().take(k) {
        if x[i] != 0.0 {
            xk[i] = x[i];
            top.push(i);
        }
    }
    Ok((xk, IndexSet::new(top)))
}

/// Prior-support geometry `(k, T, T₀, ρ, α, w)` consumed by every bound.
///
/// `ρ` and `α` are derived from the integer counts `|T|` and `|T ∩ T₀|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportModel {
    pub n: usize,
    pub k: usize,
    pub prior: IndexSet,
    pub top: IndexSet,
    pub w: f64,
}

impl SupportModel {
    pub fn prior_len(&self) -> usize {
        self.prior.len()
    }

    pub fn overlap(&self) -> usize {
        self.prior.intersection_len(&self.top)
    }

    /// `ρ = |T| / k`.
    pub fn rho(&self) -> f64 {
        self.prior_len() as f64 / self.k as f64
    }

    /// `α = |T ∩ T₀| / |T|`, zero for an empty prior.
    pub fn alpha(&self) -> f64 {
        if self.prior.is_empty() {
            0.0
        } else {
            self.overlap() as f64 / self.prior_len() as f64
        }
    }
}

fn check_weight(w: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&w) {
        return invalid(format!("weight w = {w} must lie in [0, 1]"));
    }
    Ok(())
}

pub fn support_model(x: &[f64], prior: &IndexSet, k: usize, w: f64) -> Result<SupportModel> {
    check_weight(w)?;
    let n = x.len();
    if prior.bound() > n {
        return invalid(format!("prior support index {} exceeds n = {n}", prior.bound()));
    }
    let (_, top) = best_k_term(x, k)?;
    Ok(SupportModel {
        n,
        k,
        prior: prior.clone(),
        top,
        w,
    })
}

/// The ℓ1 quantities entering the error multiplier `e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTerms {
    /// `‖x − x_k‖₁`.
    pub tail_k: f64,
    /// `‖x_{Tᶜ∩T₀ᶜ}‖₁`.
    pub off_prior_off_top: f64,
    /// `‖x_{Tᶜ∩T₀}‖₁`.
    pub missed_top: f64,
    /// Multiplier of the local bound: `w·tail_k + (1−w)·off_prior_off_top + missed_top`.
    pub e_local: f64,
    /// Multiplier shared by the global bounds: `w·tail_k + (1−w)·off_prior_off_top`.
    pub e_global: f64,
    /// Same multiplier in the form `w‖x_{T∩T₀ᶜ}‖₁ + ‖x_{Tᶜ}‖₁`.
    pub e_proof: f64,
}

pub fn error_terms(x: &[f64], model: &SupportModel) -> Result<ErrorTerms> {
    if x.len() != model.n {
        return invalid(format!(
            "signal has length {}, model expects {}",
            x.len(),
            model.n
        ));
    }
    let mut tail_k = 0.0;
    let mut off_prior_off_top = 0.0;
    let mut missed_top = 0.0;
    let mut prior_off_top = 0.0;
    let mut off_prior = 0.0;
    for (i, v) in x.iter().map(|v| v.abs()).enumerate() {
        let in_prior = model.prior.contains(i);
        let in_top = model.top.contains(i);
        if !in_top {
            tail_k += v;
        }
        match (in_prior, in_top) {
            (false, false) => off_prior_off_top += v,
            (false, true) => missed_top += v,
            (true, false) => prior_off_top += v,
            (true, true) => {}
        }
        if !in_prior {
            off_prior += v;
        }
    }
    let w = model.w;
    let e_global = w * tail_k + (1.0 - w) * off_prior_off_top;
    Ok(ErrorTerms {
        tail_k,
        off_prior_off_top,
        missed_top,
        e_local: e_global + missed_top,
        e_global,
        e_proof: w * prior_off_top + off_prior,
    })
}

/// Converts a target `(ρ, α)` at sparsity `k` into the integer counts
/// `(|T|, |T ∩ T₀|)`, rejecting non-integral combinations.
pub fn prior_counts(rho: f64, alpha: f64, k: usize) -> Result<(usize, usize)> {
    const TOL: f64 = 1e-9;
    if !(rho >= 0.0) || !(0.0..=1.0).contains(&alpha) {
        return invalid(format!("need rho >= 0 and alpha in [0,1], got rho={rho}, alpha={alpha}"));
    }
    let len = rho * k as f64;
    let len_int = len.round();
    if (len - len_int).abs() > TOL {
        return invalid(format!("rho*k = {len} is not an integer (rho={rho}, k={k})"));
    }
    let overlap = alpha * len_int;
    if (overlap - overlap.round()).abs() > TOL {
        return invalid(format!(
            "alpha*rho*k = {overlap} is not an integer (alpha={alpha}, rho={rho}, k={k})"
        ));
    }
    let overlap_int = overlap.round();
    Ok((len_int as usize, overlap_int as usize))
}

/// Builds a prior support with exactly `overlap` indices from `T₀` (largest
/// magnitudes first) and `len − overlap` indices outside `T₀` (lowest first).
pub fn prior_with_overlap(x: &[f64], k: usize, len: usize, overlap: usize) -> Result<IndexSet> {
    let (_, top) = best_k_term(x, k)?;
    if overlap > len {
        return invalid(format!("overlap {overlap} exceeds prior size {len}"));
    }
    if overlap > top.len() {
        return invalid(format!(
            "overlap {overlap} exceeds the {} indices of the best {k}-term support",
            top.len()
        ));
    }
    let outside = x.len() - top.len();
    if len - overlap > outside {
        return invalid(format!(
            "need {} indices outside the top support, only {outside} available",
            len - overlap
        ));
    }
    let mut chosen: Vec<usize> = magnitude_order(x)
        .into_iter()
        .filter(|&i| top.contains(i))
        .take(overlap)
        .collect();
    chosen.extend((0..x.len()).filter(|&i| !top.contains(i)).take(len - overlap));
    Ok(IndexSet::new(chosen))
}
