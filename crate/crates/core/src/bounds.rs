//! Closed-form recovery guarantees for weighted ℓ1 minimization.
//!
//! Every calculator returns a [`GuaranteeResult`]: the noise coefficient `C₀`,
//! the error-multiplier coefficient `C₁`, the largest admissible sparsity and
//! a validity flag. Parameter points outside a theorem's premises are not
//! errors, they come back with `valid = false` and a reason so sweeps can
//! trace validity boundaries.
//!
//! The RIC/ROC based theorems take their isometry constants explicitly; the
//! `*_coherence` wrappers substitute the coherence upper bounds
//! `δ_s ≤ (s − 1)μ` and `θ_{k,k} ≤ δ_{2k}`.

use std::fmt;

use crate::error::{invalid, Error, Result};

/// Parameter point shared by all calculators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuaranteeParams {
    /// Mutual coherence, in `(0, 1]`.
    pub mu: f64,
    /// Sparsity level.
    pub k: usize,
    /// `|T| / k`.
    pub rho: f64,
    /// `|T ∩ T₀| / |T|`.
    pub alpha: f64,
    /// Weight on the prior support, in `[0, 1]`.
    pub w: f64,
    /// Friedlander's `a` or Chen's `a`.
    pub a: Option<f64>,
    /// Chen's `b`.
    pub b: Option<f64>,
    /// Ge's `t`.
    pub t: Option<f64>,
    /// Noise level.
    pub epsilon: f64,
}

impl GuaranteeParams {
    pub fn new(mu: f64, k: usize, rho: f64, alpha: f64, w: f64) -> Self {
        GuaranteeParams {
            mu,
            k,
            rho,
            alpha,
            w,
            a: None,
            b: None,
            t: None,
            epsilon: 0.0,
        }
    }

    fn domain_error(&self) -> Option<String> {
        let finite = [self.mu, self.rho, self.alpha, self.w, self.epsilon]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Some("parameters must be finite".into());
        }
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Some(format!("mu = {} must lie in (0, 1]", self.mu));
        }
        if self.k < 1 {
            return Some("k must be at least 1".into());
        }
        if self.rho < 0.0 {
            return Some(format!("rho = {} must be nonnegative", self.rho));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Some(format!("alpha = {} must lie in [0, 1]", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.w) {
            return Some(format!("w = {} must lie in [0, 1]", self.w));
        }
        if self.epsilon < 0.0 {
            return Some(format!("epsilon = {} must be nonnegative", self.epsilon));
        }
        if self.mismatch() < 0.0 {
            return Some(format!(
                "1 + rho - 2 alpha rho = {} is negative (overlap exceeds the top-k support)",
                self.mismatch()
            ));
        }
        None
    }

    fn check(&self) -> Result<()> {
        match self.domain_error() {
            Some(msg) => invalid(msg),
            None => Ok(()),
        }
    }

    fn kf(&self) -> f64 {
        self.k as f64
    }

    /// `1 + ρ − 2αρ`, the relative size of the mismatch `T ∪ T₀ \ (T ∩ T₀)`
    /// measured in units of `k`.
    pub fn mismatch(&self) -> f64 {
        1.0 + self.rho - 2.0 * self.alpha * self.rho
    }

    /// `w + (1 − w)√(1 + ρ − 2αρ)`; Friedlander's `β` and Ge's `Υ`.
    pub fn beta(&self) -> f64 {
        self.w + (1.0 - self.w) * self.mismatch().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    Local,
    Cai,
    Friedlander,
    Haixiao,
    Chen,
    Ge,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::Local,
        Theorem::Cai,
        Theorem::Friedlander,
        Theorem::Haixiao,
        Theorem::Chen,
        Theorem::Ge,
    ];

    /// The four weighted global bounds the local bound is compared with.
    pub const GLOBAL_WEIGHTED: [Theorem; 4] = [
        Theorem::Friedlander,
        Theorem::Haixiao,
        Theorem::Chen,
        Theorem::Ge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Local => "local",
            Theorem::Cai => "cai",
            Theorem::Friedlander => "friedlander",
            Theorem::Haixiao => "haixiao",
            Theorem::Chen => "chen",
            Theorem::Ge => "ge",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown theorem '{name}'")))
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coefficients and validity of one guarantee at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct GuaranteeResult {
    pub theorem: Theorem,
    pub c0: f64,
    pub c1: f64,
    /// Supremum of admissible `k`; `+∞` when the theorem has no such condition.
    pub k_max: f64,
    pub valid: bool,
    /// Why the point is invalid; empty when valid.
    pub reason: String,
    /// Ge only: `C₁` evaluated exactly as typeset (see [`ge_bound`]).
    pub c1_printed: Option<f64>,
}

impl GuaranteeResult {
    fn new(theorem: Theorem, c0: f64, c1: f64, k_max: f64) -> Self {
        GuaranteeResult {
            theorem,
            c0,
            c1,
            k_max,
            valid: true,
            reason: String::new(),
            c1_printed: None,
        }
    }

    fn rejected(theorem: Theorem, reason: impl Into<String>) -> Self {
        GuaranteeResult {
            theorem,
            c0: f64::NAN,
            c1: f64::NAN,
            k_max: f64::NAN,
            valid: false,
            reason: reason.into(),
            c1_printed: None,
        }
    }

    /// Marks the result invalid unless `ok`; the first failing reason wins.
    fn require(&mut self, ok: bool, reason: impl FnOnce() -> String) {
        if self.valid && !ok {
            self.valid = false;
            self.reason = reason();
        }
    }

    fn require_positive_coefficients(&mut self) {
        let (c0, c1) = (self.c0, self.c1);
        self.require(
            c0.is_finite() && c1.is_finite() && c0 > 0.0 && c1 > 0.0,
            || format!("coefficients not positive and finite (c0={c0}, c1={c1})"),
        );
    }
}

/// Largest admissible sparsity for the local bound.
///
/// For `w = 0` this is `(1 + 1/μ)/ρ`; for `w ∈ (0, 1]` it is
/// `((w + √(w² + 4(2w√α + 1)(1 + 1/μ))) / (2√ρ(2w√α + 1)))²`.
/// An empty prior (`ρ = 0`) imposes no condition.
pub fn local_k_max(mu: f64, rho: f64, alpha: f64, w: f64) -> f64 {
    if rho == 0.0 {
        return f64::INFINITY;
    }
    let inv = 1.0 + 1.0 / mu;
    if w == 0.0 {
        return inv / rho;
    }
    let g = 2.0 * w * alpha.sqrt() + 1.0;
    let root = (w * w + 4.0 * g * inv).sqrt();
    let base = (w + root) / (2.0 * rho.sqrt() * g);
    base * base
}

/// Shared denominator of the local coefficients:
/// `1 + μ + wμ√(ρk) − μρk(2w√α + 1)`.
pub fn local_denominator(p: &GuaranteeParams) -> f64 {
    let rk = p.rho * p.kf();
    1.0 + p.mu + p.w * p.mu * rk.sqrt() - p.mu * rk * (2.0 * p.w * p.alpha.sqrt() + 1.0)
}

/// The local guarantee on `‖x*_T − x_T‖₂`:
///
/// `C₀ = 2√(1 + (ρk − 1)μ) / D`, `C₁ = 2μ√(ρk) / D`.
///
/// Both the sparsity condition and `D > 0` are enforced.
pub fn local_bound(p: &GuaranteeParams) -> GuaranteeResult {
    if let Some(msg) = p.domain_error() {
        return GuaranteeResult::rejected(Theorem::Local, msg);
    }
    if p.rho == 0.0 {
        return GuaranteeResult::rejected(
            Theorem::Local,
            "empty prior support (rho = 0): nothing to bound",
        );
    }
    let rk = p.rho * p.kf();
    let d = local_denominator(p);
    let c0 = 2.0 * (1.0 + (rk - 1.0) * p.mu).sqrt() / d;
    let c1 = 2.0 * p.mu * rk.sqrt() / d;
    let k_max = local_k_max(p.mu, p.rho, p.alpha, p.w);
    let mut r = GuaranteeResult::new(Theorem::Local, c0, c1, k_max);
    r.require(p.kf() < k_max, || format!("sparsity condition k < {k_max} violated"));
    r.require(d > 0.0, || format!("denominator {d} is not positive"));
    r.require_positive_coefficients();
    r
}

/// Standard ℓ1 guarantee in terms of coherence, valid for `k < (1 + 1/μ)/2`.
pub fn cai_bound(p: &GuaranteeParams) -> GuaranteeResult {
    if let Some(msg) = p.domain_error() {
        return GuaranteeResult::rejected(Theorem::Cai, msg);
    }
    let (mu, k) = (p.mu, p.kf());
    let gap = 1.0 + mu - 2.0 * mu * k;
    let c0 = 2.0 * (gap + 2.0 * (mu * k * (1.0 + (k - 1.0) * mu)).sqrt())
        / (gap * (1.0 + mu).sqrt());
    let c1 = 2.0 * (1.0 + mu) * mu.sqrt() / (gap * (1.0 + mu).sqrt());
    let k_max = 0.5 * (1.0 + 1.0 / mu);
    let mut r = GuaranteeResult::new(Theorem::Cai, c0, c1, k_max);
    r.require(k < k_max, || {
        format!("sparsity condition k < (1 + 1/mu)/2 = {k_max} violated")
    });
    r.require(gap > 0.0, || format!("1 + mu - 2 mu k = {gap} is not positive"));
    r.require_positive_coefficients();
    r
}

/// `Q = (1 − w)²(1 + ρ − 2αρ)/(1 + w)` and `L = (Q + 2 − √(Q(Q + 4)))/(1 + w)`.
pub fn haixiao_q_l(p: &GuaranteeParams) -> (f64, f64) {
    let w = p.w;
    let q = (1.0 - w).powi(2) * p.mismatch() / (1.0 + w);
    let l = (q + 2.0 - (q * (q + 4.0)).sqrt()) / (1.0 + w);
    (q, l)
}

/// Weighted ℓ1 guarantee in terms of coherence, valid for `k < (L/2)(1 + 1/μ)`.
pub fn haixiao_bound(p: &GuaranteeParams) -> GuaranteeResult {
    if let Some(msg) = p.domain_error() {
        return GuaranteeResult::rejected(Theorem::Haixiao, msg);
    }
    let (mu, k, w) = (p.mu, p.kf(), p.w);
    let (_, l) = haixiao_q_l(p);
    let k_max = 0.5 * l * (1.0 + 1.0 / mu);
    let head = 1.0 - (k - 1.0) * mu - mu * k * w;
    let den = head * (1.0 + mu).sqrt()
        - mu.sqrt() * (1.0 + mu) * (1.0 - w) * (mu * k * p.mismatch()).sqrt();
    let c0 = 2.0 * (head + (1.0 + w) * (mu * k * (1.0 + (k - 1.0) * mu)).sqrt()) / den;
    let c1 = 2.0 * (1.0 + mu) * mu.sqrt() / den;
    let mut r = GuaranteeResult::new(Theorem::Haixiao, c0, c1, k_max);
    r.require(k < k_max, || {
        format!("sparsity condition k < (L/2)(1 + 1/mu) = {k_max} violated")
    });
    r.require(den > 0.0, || format!("denominator {den} is not positive"));
    r.require_positive_coefficients();
    r
}

/// Default Friedlander constant `a`.
pub const FRIEDLANDER_DEFAULT_A: f64 = 2.0;

fn friedlander_a(p: &GuaranteeParams) -> Result<f64> {
    let a = p.a.unwrap_or(FRIEDLANDER_DEFAULT_A);
    if !(a > 1.0) {
        return invalid(format!("Friedlander needs a > 1, got {a}"));
    }
    if a < (1.0 - p.alpha) * p.rho {
        return invalid(format!(
            "Friedlander needs a >= (1 - alpha) rho = {}, got {a}",
            (1.0 - p.alpha) * p.rho
        ));
    }
    let ak = a * p.kf();
    if (ak - ak.round()).abs() > 1e-9 {
        return invalid(format!("Friedlander needs a k integral, got a k = {ak}"));
    }
    Ok(a)
}

/// RIP-based weighted ℓ1 guarantee with constant `a` (default 2).
///
/// The typeset `C₀` numerator reads `2(1 + (w + (1 − w√(1+ρ−2αρ)))/√a)`; the
/// closing parenthesis is misplaced and the numerator is evaluated as
/// `2(1 + β/√a)` with the same `β = w + (1 − w)√(1 + ρ − 2αρ)` as the
/// denominator and the RIP premise.
///
/// The premise `δ_{ak} + (a/β²)δ_{(a+1)k} < a/β² − 1` is checked after
/// multiplying through by `β² ≥ 0`, i.e. `β²(1 + δ_{ak}) + aδ_{(a+1)k} < a`,
/// which stays defined at `β = 0`.
pub fn friedlander_bound(
    p: &GuaranteeParams,
    delta_ak: f64,
    delta_a1k: f64,
) -> Result<GuaranteeResult> {
    p.check()?;
    let a = friedlander_a(p)?;
    for (name, d) in [("delta_ak", delta_ak), ("delta_(a+1)k", delta_a1k)] {
        if !(0.0..1.0).contains(&d) {
            return invalid(format!("{name} = {d} must lie in [0, 1)"));
        }
    }
    Ok(friedlander_eval(p, a, delta_ak, delta_a1k))
}

fn friedlander_eval(p: &GuaranteeParams, a: f64, delta_ak: f64, delta_a1k: f64) -> GuaranteeResult {
    let beta = p.beta();
    let sa = a.sqrt();
    let den = (1.0 - delta_a1k).sqrt() - beta / sa * (1.0 + delta_ak).sqrt();
    let c0 = 2.0 * (1.0 + beta / sa) / den;
    let c1 = 2.0 / (a * p.kf()).sqrt() * ((1.0 - delta_a1k).sqrt() + (1.0 + delta_ak).sqrt()) / den;
    let mut r = GuaranteeResult::new(Theorem::Friedlander, c0, c1, f64::INFINITY);
    let lhs = beta * beta * (1.0 + delta_ak) + a * delta_a1k;
    r.require(lhs < a, || {
        format!("RIP premise fails: beta^2 (1 + delta_ak) + a delta_(a+1)k = {lhs} >= a = {a}")
    });
    r.require(den > 0.0, || format!("denominator {den} is not positive"));
    r.require_positive_coefficients();
    r
}

/// [`friedlander_bound`] with `δ_{ak} ← (ak − 1)μ`, `δ_{(a+1)k} ← ((a+1)k − 1)μ`.
pub fn friedlander_coherence(p: &GuaranteeParams) -> Result<GuaranteeResult> {
    p.check()?;
    let a = friedlander_a(p)?;
    let k = p.kf();
    let delta_ak = (a * k - 1.0) * p.mu;
    let delta_a1k = ((a + 1.0) * k - 1.0) * p.mu;
    if delta_ak >= 1.0 || delta_a1k >= 1.0 {
        return Ok(GuaranteeResult::rejected(
            Theorem::Friedlander,
            format!("coherence bound on the RIC reaches 1 (delta_ak <= {delta_ak}, delta_(a+1)k <= {delta_a1k})"),
        ));
    }
    Ok(friedlander_eval(p, a, delta_ak, delta_a1k))
}

fn positive_integer(v: f64) -> bool {
    v >= 1.0 && (v - v.round()).abs() < 1e-9
}

/// `(a, b)` for Chen's bound; both default to `k`.
fn chen_ab(p: &GuaranteeParams) -> Result<(f64, f64)> {
    let a = p.a.unwrap_or(p.kf());
    let b = p.b.unwrap_or(p.kf());
    if !positive_integer(a) || a > p.kf() {
        return invalid(format!("Chen needs an integer a in [1, k], got {a}"));
    }
    if !positive_integer(b) {
        return invalid(format!("Chen needs an integer b >= 1, got {b}"));
    }
    Ok((a.round(), b.round()))
}

/// Chen's `s = k − a + wk + (1 − w)√((1+ρ−2αρ)k)·max{√((1+ρ−2αρ)k), √a}`.
pub fn chen_s(p: &GuaranteeParams, a: f64) -> f64 {
    let k = p.kf();
    let mk = (p.mismatch() * k).sqrt();
    k - a + p.w * k + (1.0 - p.w) * mk * mk.max(a.sqrt())
}

/// RIC/ROC-based weighted ℓ1 guarantee with integer constants `a ≤ k`, `b`
/// (both default to `k`).
pub fn chen_bound(p: &GuaranteeParams, delta_a: f64, theta_ab: f64) -> Result<GuaranteeResult> {
    p.check()?;
    let (a, b) = chen_ab(p)?;
    if !(delta_a >= 0.0) || !(theta_ab >= 0.0) {
        return invalid(format!(
            "delta_a = {delta_a} and theta_ab = {theta_ab} must be nonnegative"
        ));
    }
    Ok(chen_eval(p, a, b, delta_a, theta_ab))
}

fn chen_eval(p: &GuaranteeParams, a: f64, b: f64, delta_a: f64, theta_ab: f64) -> GuaranteeResult {
    let k = p.kf();
    let s = chen_s(p, a);
    if s <= 0.0 {
        return GuaranteeResult::rejected(
            Theorem::Chen,
            format!("s = {s}: C1 divides by s and is undefined"),
        );
    }
    let big_c = (s / (a * b).sqrt()).max((s / a).sqrt());
    let d = if p.w == 1.0 { k } else { k.max(p.mismatch() * k) };
    let gap = 1.0 - delta_a - big_c * theta_ab;
    let c0 = 2.0 * (2.0 * (1.0 + delta_a) * d / a).sqrt() / gap;
    let c1 = 2.0 * (2.0 * d).sqrt() * big_c * theta_ab / (gap * s) + 2.0 / d.sqrt();
    let mut r = GuaranteeResult::new(Theorem::Chen, c0, c1, f64::INFINITY);
    r.require(gap > 0.0, || {
        format!(
            "premise delta_a + C theta_ab < 1 fails ({} >= 1)",
            delta_a + big_c * theta_ab
        )
    });
    r.require_positive_coefficients();
    r
}

/// [`chen_bound`] with `a = b = k`, `δ_k ← (k − 1)μ` and
/// `θ_{k,k} ← δ_{2k} ← (2k − 1)μ`.
pub fn chen_coherence(p: &GuaranteeParams) -> Result<GuaranteeResult> {
    let mut q = *p;
    q.a = Some(p.kf());
    q.b = Some(p.kf());
    q.check()?;
    let k = p.kf();
    let delta = (k - 1.0) * p.mu;
    let theta = (2.0 * k - 1.0) * p.mu;
    Ok(chen_eval(&q, k, k, delta, theta))
}

/// Default Ge constant `t`.
pub const GE_DEFAULT_T: f64 = 2.0;

/// Ge's `d`: 1 for `w = 1`; otherwise 1 when `α ≥ 1/2`, else `1 + ρ − 2αρ`.
pub fn ge_d(p: &GuaranteeParams) -> f64 {
    if p.w == 1.0 || p.alpha >= 0.5 {
        1.0
    } else {
        p.mismatch()
    }
}

/// Ge's `C₁`, single-estimate reduction, in two readings.
///
/// As typeset:
///
/// ```text
/// C1 = 2/√k · ( (√2 δ Υ + √((t−d+Υ²)((t−d)/(t−d+Υ²) − δ) δ))
///               / ((t−d+Υ²)(√((t−d+Υ²)(t−d)/(t−d+Υ²)) − δ))  +  1/√d )
/// ```
///
/// The typeset form drops the square root on `(t−d)/(t−d+Υ²)` inside the
/// numerator and the denominator no longer matches `C₀`. The interpreted
/// reading restores the structure shared with `C₀`:
///
/// ```text
/// C1 = 2/√k · ( (√2 δ Υ + √((t−d+Υ²)(√((t−d)/(t−d+Υ²)) − δ) δ))
///               / ((t−d+Υ²)(√((t−d)/(t−d+Υ²)) − δ))  +  1/√d )
/// ```
///
/// Returns `(interpreted, printed)`; the printed value is NaN when its square
/// root argument is negative.
pub fn ge_c1_readings(k: f64, upsilon: f64, d: f64, t: f64, delta: f64) -> (f64, f64) {
    let u = t - d;
    let v = t - d + upsilon * upsilon;
    let head = 2.0_f64.sqrt() * delta * upsilon;
    let shared = (u / v).sqrt() - delta;
    let interpreted = 2.0 / k.sqrt()
        * ((head + (v * shared * delta).sqrt()) / (v * shared) + 1.0 / d.sqrt());
    let printed = 2.0 / k.sqrt()
        * ((head + (v * (u / v - delta) * delta).sqrt()) / (v * ((v * u / v).sqrt() - delta))
            + 1.0 / d.sqrt());
    (interpreted, printed)
}

fn ge_t(p: &GuaranteeParams) -> Result<f64> {
    let t = p.t.unwrap_or(GE_DEFAULT_T);
    let d = ge_d(p);
    if !(t > d) {
        return invalid(format!("Ge needs t > d = {d}, got t = {t}"));
    }
    Ok(t)
}

/// Block-RIP guarantee reduced to a single prior estimate with unit blocks.
///
/// `C₀ = 2√(2(t−d)(t−d+Υ²)(1+δ)) / ((t−d+Υ²)(√((t−d)/(t−d+Υ²)) − δ))`
/// with `δ = δ_{tk}`; `C₁` uses the interpreted reading of
/// [`ge_c1_readings`] and the typeset reading is kept in `c1_printed`.
pub fn ge_bound(p: &GuaranteeParams, delta_tk: f64) -> Result<GuaranteeResult> {
    p.check()?;
    let t = ge_t(p)?;
    if !(0.0..1.0).contains(&delta_tk) {
        return invalid(format!("delta_tk = {delta_tk} must lie in [0, 1)"));
    }
    Ok(ge_eval(p, t, delta_tk))
}

fn ge_eval(p: &GuaranteeParams, t: f64, delta: f64) -> GuaranteeResult {
    let upsilon = p.beta();
    let d = ge_d(p);
    let u = t - d;
    let v = t - d + upsilon * upsilon;
    let threshold = (u / v).sqrt();
    let c0 = 2.0 * (2.0 * u * v * (1.0 + delta)).sqrt() / (v * (threshold - delta));
    let (c1, c1_printed) = ge_c1_readings(p.kf(), upsilon, d, t, delta);
    let mut r = GuaranteeResult::new(Theorem::Ge, c0, c1, f64::INFINITY);
    r.c1_printed = Some(c1_printed);
    r.require(delta < threshold, || {
        format!("RIP premise delta_tk < sqrt((t-d)/(t-d+Y^2)) = {threshold} fails (delta_tk = {delta})")
    });
    r.require_positive_coefficients();
    r
}

/// [`ge_bound`] with `t = 2` (unless set) and `δ_{tk} ← (tk − 1)μ`.
pub fn ge_coherence(p: &GuaranteeParams) -> Result<GuaranteeResult> {
    p.check()?;
    let t = ge_t(p)?;
    let tk = t * p.kf();
    let delta = (tk - 1.0) * p.mu;
    if delta >= 1.0 {
        return Ok(GuaranteeResult::rejected(
            Theorem::Ge,
            format!("coherence bound on the RIC reaches 1 (delta_tk <= {delta})"),
        ));
    }
    Ok(ge_eval(p, t, delta))
}

/// Evaluates one theorem, using the coherence substitutions for the RIC/ROC
/// based bounds.
pub fn evaluate(theorem: Theorem, p: &GuaranteeParams) -> Result<GuaranteeResult> {
    match theorem {
        Theorem::Local => Ok(local_bound(p)),
        Theorem::Cai => Ok(cai_bound(p)),
        Theorem::Haixiao => Ok(haixiao_bound(p)),
        Theorem::Friedlander => friedlander_coherence(p),
        Theorem::Chen => chen_coherence(p),
        Theorem::Ge => ge_coherence(p),
    }
}

/// Baseline sparsity condition for [`k_ratio`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    /// `(1 + 1/μ)/2`.
    Standard,
    /// `(L/2)(1 + 1/μ)`.
    Weighted,
}

/// Local sparsity bound divided by a baseline sparsity bound.
pub fn k_ratio(p: &GuaranteeParams, baseline: Baseline) -> Result<f64> {
    p.check()?;
    let base = match baseline {
        Baseline::Standard => 0.5 * (1.0 + 1.0 / p.mu),
        Baseline::Weighted => 0.5 * haixiao_q_l(p).1 * (1.0 + 1.0 / p.mu),
    };
    if !(base.is_finite() && base > 0.0) {
        return invalid(format!("baseline sparsity bound {base} is not positive"));
    }
    Ok(local_k_max(p.mu, p.rho, p.alpha, p.w) / base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(mu: f64, k: usize, rho: f64, alpha: f64, w: f64) -> GuaranteeParams {
        GuaranteeParams::new(mu, k, rho, alpha, w)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn local_reference_points() {
        let r = local_bound(&params(0.1, 4, 0.5, 0.0, 0.0));
        assert!(r.valid);
        assert!(close(local_denominator(&params(0.1, 4, 0.5, 0.0, 0.0)), 0.9, 1e-12));
        assert!(close(r.c0, 2.3306863292670035, 1e-12));
        assert!(close(r.c1, 0.31426968052735447, 1e-12));
        assert!(close(r.k_max, 22.0, 1e-12));

        let r = local_bound(&params(0.1, 4, 0.5, 0.0, 1.0));
        assert!(close(r.c0, 2.0141873255980332, 1e-12));
        assert!(close(r.c1, 0.2715929635786799, 1e-12));
        assert!(close(r.k_max, 29.708203932499368, 1e-9));

        let p = params(0.1, 4, 0.5, 1.0, 1.0);
        let r = local_bound(&p);
        assert!(close(local_denominator(&p), 0.64142135623730948, 1e-12));
        assert!(close(r.c0, 3.2702648203753263, 1e-12));
        assert!(close(r.c1, 0.44096241842308484, 1e-12));
    }

    #[test]
    fn local_invalid_states() {
        let r = local_bound(&params(0.1, 30, 0.5, 0.0, 0.0));
        assert!(!r.valid && r.reason.contains("sparsity"));
        let r = local_bound(&params(0.1, 4, 0.0, 0.0, 0.5));
        assert!(!r.valid && !r.reason.is_empty());
        let r = local_bound(&params(0.1, 4, 0.5, 0.0, 1.5));
        assert!(!r.valid);
    }

    #[test]
    fn local_k_max_is_continuous_at_zero_weight() {
        for &(mu, rho, alpha) in &[(0.1, 0.5, 0.0), (0.05, 1.0, 0.5), (0.2, 0.75, 1.0)] {
            let at_zero = local_k_max(mu, rho, alpha, 0.0);
            let near = local_k_max(mu, rho, alpha, 1e-12);
            assert!(close(at_zero, near, 1e-9), "{at_zero} vs {near}");
        }
    }

    #[test]
    fn cai_reference_points() {
        let r = cai_bound(&params(0.1, 2, 0.0, 0.0, 1.0));
        assert!(r.valid);
        assert!(close(r.c0, 4.4624314384909444, 1e-12));
        assert!(close(r.c1, 0.94760708295868572, 1e-12));
        assert!(close(r.k_max, 5.5, 1e-12));

        let r = cai_bound(&params(0.1, 6, 0.0, 0.0, 1.0));
        assert!(!r.valid && r.reason.contains("(1 + 1/mu)/2"));

        let r = cai_bound(&params(1e-6, 2, 0.0, 0.0, 1.0));
        assert!(close(r.k_max, 500000.5, 1e-6));
    }

    #[test]
    fn haixiao_reduces_to_cai_at_unit_weight() {
        let p = params(0.1, 2, 1.0, 1.0, 1.0);
        let (q, l) = haixiao_q_l(&p);
        assert_eq!((q, l), (0.0, 1.0));
        let h = haixiao_bound(&p);
        let c = cai_bound(&p);
        assert!(close(h.c0, c.c0, 1e-12) && close(h.c1, c.c1, 1e-12));
        assert!(close(h.k_max, c.k_max, 1e-12));
    }

    #[test]
    fn haixiao_degenerate_q_and_regression() {
        let p = params(0.1, 2, 1.0, 1.0, 0.0);
        let (q, l) = haixiao_q_l(&p);
        assert_eq!(q, 0.0);
        assert!(close(l, 2.0, 1e-15));
        let r = haixiao_bound(&p);
        assert!(r.valid && close(r.c0, 2.9007331684910912, 1e-12));

        let r = haixiao_bound(&params(0.1, 2, 1.0, 1.0, 0.5));
        assert!(r.valid);
        assert!(close(r.c0, 3.583976161616027, 1e-12));
        assert!(close(r.c1, 0.82915619758885, 1e-12));
        assert!(close(r.k_max, 7.333333333333333, 1e-12));
    }

    #[test]
    fn friedlander_reference_points() {
        let mut p = params(0.1, 2, 1.0, 1.0, 1.0);
        p.a = Some(2.0);
        let r = friedlander_coherence(&p).unwrap();
        assert!(!r.valid);
        // Denominator √0.5 − √1.3/√2 ≈ −0.099119.
        assert!(close(r.c0, -34.445603580879611, 1e-9));

        let r = friedlander_bound(&p, 0.0, 0.0).unwrap();
        let sa = 2f64.sqrt();
        assert!(close(r.c0, 2.0 * (1.0 + 1.0 / sa) / (1.0 - 1.0 / sa), 1e-12));
        assert!(close(r.c1, 4.0 / ((2.0 * 2.0f64).sqrt() * (1.0 - 1.0 / sa)), 1e-12));

        let mut p = params(0.1, 2, 0.5, 1.0, 0.0);
        p.a = Some(2.0);
        assert!(close(p.beta(), 0.5f64.sqrt(), 1e-15));
        let r = friedlander_coherence(&p).unwrap();
        assert!(r.valid);
        assert!(close(r.c0, 21.894762749762001, 1e-10));
        assert!(close(r.c1, 13.48193521282733, 1e-10));
    }

    #[test]
    fn friedlander_preconditions() {
        let mut p = params(0.1, 2, 1.0, 1.0, 1.0);
        p.a = Some(1.0);
        assert!(friedlander_bound(&p, 0.1, 0.1).is_err());
        p.a = Some(1.25);
        assert!(friedlander_bound(&p, 0.1, 0.1).is_err());
        p.a = Some(2.0);
        assert!(friedlander_bound(&p, 1.0, 0.1).is_err());
        let mut p = params(0.1, 2, 3.0, 0.0, 1.0);
        p.a = Some(2.0);
        assert!(friedlander_bound(&p, 0.1, 0.1).is_err());
    }

    #[test]
    fn chen_reference_points() {
        let p = params(0.1, 2, 1.0, 1.0, 1.0);
        assert_eq!(chen_s(&p, 2.0), 2.0);
        let r = chen_coherence(&p).unwrap();
        assert!(r.valid);
        assert!(close(r.c0, 4.9441323247304422, 1e-12));
        assert!(close(r.c1, 2.4142135623730951, 1e-12));

        let r = chen_coherence(&params(0.1, 2, 1.0, 1.0, 0.0)).unwrap();
        assert!(!r.valid && r.reason.contains("s = 0"));

        let r = chen_bound(&p, 0.0, 0.0).unwrap();
        let (d, a) = (2.0f64, 2.0f64);
        assert!(close(r.c0, 2.0 * (2.0 * d / a).sqrt(), 1e-12));
        assert!(close(r.c1, 2.0 / d.sqrt(), 1e-12));
    }

    #[test]
    fn chen_preconditions() {
        let mut p = params(0.1, 2, 1.0, 1.0, 1.0);
        p.a = Some(3.0);
        assert!(chen_bound(&p, 0.1, 0.1).is_err());
        p.a = Some(1.5);
        assert!(chen_bound(&p, 0.1, 0.1).is_err());
        p.a = Some(1.0);
        p.b = Some(0.0);
        assert!(chen_bound(&p, 0.1, 0.1).is_err());
        p.b = Some(1.0);
        assert!(chen_bound(&p, -0.1, 0.1).is_err());
    }

    #[test]
    fn ge_reference_points() {
        let p = params(0.1, 2, 1.0, 1.0, 1.0);
        let r = ge_coherence(&p).unwrap();
        assert!(r.valid);
        assert!(close(r.c0, 5.6013580602907142, 1e-12));
        assert!(close(r.c1, 3.0095540712166429, 1e-12));
        assert!(close(r.c1_printed.unwrap(), 2.1927120970564062, 1e-12));

        let r = ge_bound(&p, 0.0).unwrap();
        assert!(close(r.c0, 2.0 * 2.0f64.sqrt(), 1e-12));

        let p = params(0.1, 2, 1.0, 1.0, 0.0);
        assert_eq!((ge_d(&p), p.beta()), (1.0, 0.0));
        let r = ge_bound(&p, 0.5).unwrap();
        assert!(r.valid, "premise reduces to delta < 1: {}", r.reason);
    }

    #[test]
    fn ge_requires_t_above_d() {
        // alpha < 1/2, w < 1: d = 1 + rho = 2.
        let mut p = params(0.1, 2, 1.0, 0.0, 0.5);
        assert!(ge_bound(&p, 0.1).is_err());
        p.t = Some(3.0);
        assert!(ge_bound(&p, 0.1).is_ok());
    }

    #[test]
    fn k_ratio_examples() {
        let p = params(0.1, 4, 0.5, 0.0, 0.0);
        assert!(close(k_ratio(&p, Baseline::Standard).unwrap(), 4.0, 1e-12));
        let p = params(0.1, 4, 0.5, 0.5, 1.0);
        let expected = local_k_max(0.1, 0.5, 0.5, 1.0) / 5.5;
        assert!(close(k_ratio(&p, Baseline::Weighted).unwrap(), expected, 1e-12));
        assert!(k_ratio(&params(0.0, 4, 0.5, 0.5, 1.0), Baseline::Standard).is_err());
    }

    #[test]
    fn evaluate_dispatches_every_theorem() {
        let p = params(0.1, 2, 1.0, 1.0, 0.5);
        for t in Theorem::ALL {
            let r = evaluate(t, &p).unwrap();
            assert_eq!(r.theorem, t);
            assert_eq!(Theorem::parse(t.name()).unwrap(), t);
            if r.valid {
                assert!(r.c0 > 0.0 && r.c1 > 0.0 && r.reason.is_empty());
            } else {
                assert!(!r.reason.is_empty());
            }
        }
        assert!(Theorem::parse("bogus").is_err());
    }
}
