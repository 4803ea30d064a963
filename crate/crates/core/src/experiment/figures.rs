//! Deterministic coefficient sweeps (figures 1, 3, 4) and the seeded
//! error-term sweep (figure 2).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::{admissible_alphas, uniform_grid, AlphaSpec, ExperimentConfig};
use super::{Check, ExperimentOutput, Plot, PlotSpec, SweepTable, DEFAULT_SEED};
use crate::bounds::{self, Baseline, GuaranteeParams, GuaranteeResult, Theorem};
use crate::error::{Error, Result};
use crate::support;

fn config_error(e: Error) -> Error {
    match e {
        Error::InvalidConfig(_) => e,
        other => Error::InvalidConfig(other.to_string()),
    }
}

/// α values for one ρ: all admissible ones, or the configured list checked
/// against the integer constraint `αρk ∈ ℤ`.
fn alphas_for(spec: &AlphaSpec, rho: f64, k: usize) -> Result<Vec<f64>> {
    match spec {
        AlphaSpec::Admissible => admissible_alphas(rho, k),
        AlphaSpec::List(list) => {
            if list.is_empty() {
                return Err(Error::InvalidConfig("alpha list is empty".into()));
            }
            for &a in list {
                support::prior_counts(rho, a, k).map_err(config_error)?;
            }
            Ok(list.clone())
        }
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

fn fmt_points(points: &[String]) -> String {
    if points.is_empty() {
        return "ok".into();
    }
    let shown: Vec<&str> = points.iter().take(5).map(String::as_str).collect();
    let more = if points.len() > 5 {
        format!(" (+{} more)", points.len() - 5)
    } else {
        String::new()
    };
    format!("{}{more}", shown.join("; "))
}

fn plot_for_rho(table: &SweepTable, rho: f64, stem: &str, title: &str, y: &[&str]) -> Plot {
    let rows = table.filter(|t, i| t.get(i, "rho").and_then(|c| c.as_f64()) == Some(rho));
    Plot {
        stem: stem.to_string(),
        table: rows,
        spec: PlotSpec::new(title, "w", y).grouped_by("alpha"),
    }
}

/// Local `C₀`, `C₁` over the w grid for each `(ρ, α)`.
///
/// Defaults: `μ = 0.1`, `k = 4`, `ρ ∈ {0.5, 1}`, all admissible `α`, w step
/// 0.05.
pub fn run_fig1(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mu = cfg.mu_or(0.1)?;
    let k = cfg.k_or(4)?;
    let rhos = cfg.rho_list(&[0.5, 1.0])?;
    let ws = cfg.w_grid(0.05)?;
    let alpha_spec = cfg.alpha.clone().unwrap_or(AlphaSpec::Admissible);

    let mut table = SweepTable::new(["rho", "alpha", "w", "c0", "c1", "k_max", "valid"]);
    let mut panels: Vec<(f64, f64, Vec<(f64, GuaranteeResult)>)> = Vec::new();
    for &rho in &rhos {
        for alpha in alphas_for(&alpha_spec, rho, k)? {
            let mut curve = Vec::new();
            for &w in &ws {
                let r = bounds::local_bound(&GuaranteeParams::new(mu, k, rho, alpha, w));
                table.push(vec![
                    rho.into(),
                    alpha.into(),
                    w.into(),
                    r.c0.into(),
                    r.c1.into(),
                    r.k_max.into(),
                    r.valid.into(),
                ])?;
                curve.push((w, r));
            }
            panels.push((rho, alpha, curve));
        }
    }

    let mut bad_monotone = Vec::new();
    for (rho, alpha, curve) in &panels {
        let increasing = *alpha > 0.0;
        for pair in curve.windows(2) {
            let (w0, r0) = &pair[0];
            let (w1, r1) = &pair[1];
            let ok = r0.valid
                && r1.valid
                && if increasing {
                    r1.c0 > r0.c0 && r1.c1 > r0.c1
                } else {
                    r1.c0 < r0.c0 && r1.c1 < r0.c1
                };
            if !ok {
                bad_monotone.push(format!("rho={rho} alpha={alpha} w={w0}..{w1}"));
            }
        }
    }

    let w_max = ws.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut minimum_detail = Vec::new();
    let mut minimum_ok = true;
    for coef in ["c0", "c1"] {
        let values = table.column_f64(coef)?;
        let mut best: Option<usize> = None;
        for (i, v) in values.iter().enumerate() {
            if v.is_finite() && best.map_or(true, |b| *v < values[b]) {
                best = Some(i);
            }
        }
        if let Some(b) = best {
            let alpha = table.get(b, "alpha").and_then(|c| c.as_f64()).unwrap_or(f64::NAN);
            let w = table.get(b, "w").and_then(|c| c.as_f64()).unwrap_or(f64::NAN);
            minimum_ok &= same(alpha, 0.0) && same(w, w_max);
            minimum_detail.push(format!("min {coef} at alpha={alpha} w={w}"));
        } else {
            minimum_ok = false;
        }
    }

    let mut bad_order = Vec::new();
    let mut sorted = rhos.clone();
    sorted.sort_by(f64::total_cmp);
    for pair in sorted.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        for (r_lo, a_lo, c_lo) in panels.iter().filter(|p| same(p.0, lo)) {
            let Some((_, _, c_hi)) = panels.iter().find(|p| same(p.0, hi) && same(p.1, *a_lo)) else {
                continue;
            };
            for ((w, a), (_, b)) in c_lo.iter().zip(c_hi) {
                if !(a.valid && b.valid && a.c0 < b.c0 && a.c1 < b.c1) {
                    bad_order.push(format!("alpha={a_lo} w={w}: rho={r_lo} not below rho={hi}"));
                }
            }
        }
    }

    let checks = vec![
        Check::new(
            "C0 and C1 strictly decrease in w for alpha = 0 and strictly increase for alpha > 0",
            bad_monotone.is_empty(),
            fmt_points(&bad_monotone),
        ),
        Check::new(
            "global minimum of C0 and C1 at alpha = 0, w = 1",
            minimum_ok,
            minimum_detail.join("; "),
        ),
        Check::new(
            "smaller rho gives pointwise smaller C0 and C1",
            bad_order.is_empty(),
            fmt_points(&bad_order),
        ),
    ];

    let plots = rhos
        .iter()
        .flat_map(|&rho| {
            [
                plot_for_rho(&table, rho, &format!("fig1_c0_rho{rho}"), &format!("C0, rho = {rho}"), &["c0"]),
                plot_for_rho(&table, rho, &format!("fig1_c1_rho{rho}"), &format!("C1, rho = {rho}"), &["c1"]),
            ]
        })
        .collect();
    Ok(ExperimentOutput {
        name: "fig1".into(),
        table,
        summary: None,
        plots,
        checks,
    })
}

/// Seeded unit-norm Gaussian signal of length `n`.
pub(crate) fn gaussian_signal(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.into_iter().map(|v| v / norm).collect()
}

/// Error multiplier `e` and `C₁·e` for a fixed seeded signal, over `α` and
/// `w`, with the prior support built to hit each overlap exactly.
///
/// Defaults: `μ = 0.1`, `k = 4`, `ρ = 1`, signal length 16.
pub fn run_fig2(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mu = cfg.mu_or(0.1)?;
    let k = cfg.k_or(4)?;
    let rhos = cfg.rho_list(&[1.0])?;
    let ws = cfg.w_grid(0.05)?;
    let n = cfg.signal_n.unwrap_or(16);
    let seed = cfg.seed_or(DEFAULT_SEED);
    let alpha_spec = cfg.alpha.clone().unwrap_or(AlphaSpec::Admissible);
    if n < k {
        return Err(Error::InvalidConfig(format!("signal_n = {n} is smaller than k = {k}")));
    }
    let x = gaussian_signal(n, seed);

    let mut table = SweepTable::new([
        "rho", "alpha", "w", "prior", "missed_top", "e_local", "c1", "c1_e", "valid",
    ]);
    let mut checks = Vec::new();
    for &rho in &rhos {
        let mut best: Option<(f64, f64, f64)> = None;
        for alpha in alphas_for(&alpha_spec, rho, k)? {
            let (len, overlap) = support::prior_counts(rho, alpha, k).map_err(config_error)?;
            let prior = support::prior_with_overlap(&x, k, len, overlap).map_err(config_error)?;
            for &w in &ws {
                let model = support::support_model(&x, &prior, k, w)?;
                let terms = support::error_terms(&x, &model)?;
                let r = bounds::local_bound(&GuaranteeParams::new(mu, k, rho, alpha, w));
                let c1e = r.c1 * terms.e_local;
                if r.valid && best.map_or(true, |(v, _, _)| c1e < v) {
                    best = Some((c1e, alpha, w));
                }
                table.push(vec![
                    rho.into(),
                    alpha.into(),
                    w.into(),
                    prior.to_string().into(),
                    terms.missed_top.into(),
                    terms.e_local.into(),
                    r.c1.into(),
                    c1e.into(),
                    r.valid.into(),
                ])?;
            }
        }
        let (passed, detail) = match best {
            Some((v, a, w)) => (same(a, 1.0) && same(w, 0.0), format!("min C1*e = {v:.6} at alpha={a} w={w}")),
            None => (false, "no valid point".to_string()),
        };
        checks.push(Check::new(
            &format!("rho = {rho}: C1*e smallest at alpha = 1, w = 0"),
            passed,
            detail,
        ));
    }
    let plots = rhos
        .iter()
        .flat_map(|&rho| {
            [
                plot_for_rho(&table, rho, &format!("fig2_e_rho{rho}"), &format!("e, rho = {rho}"), &["e_local"]),
                plot_for_rho(&table, rho, &format!("fig2_c1e_rho{rho}"), &format!("C1 e, rho = {rho}"), &["c1_e"]),
            ]
        })
        .collect();
    Ok(ExperimentOutput {
        name: "fig2".into(),
        table,
        summary: None,
        plots,
        checks,
    })
}

/// Local sparsity bound over the standard and weighted baselines.
///
/// Defaults: `μ = 0.1`, `ρ ∈ {0.5, 0.75}`, `α` and `w` on 0.05 grids.
pub fn run_fig3(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mu = cfg.mu_or(0.1)?;
    let rhos = cfg.rho_list(&[0.5, 0.75])?;
    let ws = cfg.w_grid(0.05)?;
    let alphas = match &cfg.alpha {
        None => uniform_grid(0.05)?,
        Some(AlphaSpec::List(l)) if l.is_empty() => {
            return Err(Error::InvalidConfig("alpha list is empty".into()))
        }
        Some(AlphaSpec::List(l)) => l.clone(),
        Some(AlphaSpec::Admissible) => {
            return Err(Error::InvalidConfig(
                "fig3 needs an explicit alpha list (k does not enter the ratios)".into(),
            ))
        }
    };
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::InvalidConfig(format!("alpha = {a} outside [0, 1]")));
    }

    let mut table = SweepTable::new(["rho", "alpha", "w", "k_max", "ratio_standard", "ratio_weighted"]);
    let mut bad = Vec::new();
    for &rho in &rhos {
        for &alpha in &alphas {
            for &w in &ws {
                // k only enters through domain checks here.
                let p = GuaranteeParams::new(mu, 1, rho, alpha, w);
                let std = bounds::k_ratio(&p, Baseline::Standard).map_err(config_error)?;
                let wtd = bounds::k_ratio(&p, Baseline::Weighted).map_err(config_error)?;
                if !(std > 1.0 && wtd > 1.0) {
                    bad.push(format!("rho={rho} alpha={alpha} w={w}: {std:.4}, {wtd:.4}"));
                }
                table.push(vec![
                    rho.into(),
                    alpha.into(),
                    w.into(),
                    bounds::local_k_max(mu, rho, alpha, w).into(),
                    std.into(),
                    wtd.into(),
                ])?;
            }
        }
    }
    let checks = vec![Check::new(
        "both k-ratios exceed 1 at every grid point",
        bad.is_empty(),
        fmt_points(&bad),
    )];
    // One panel per ρ at the α grid's endpoints and midpoint keeps the plot legible.
    let shown: Vec<f64> = {
        let mut s = vec![alphas[0], alphas[alphas.len() / 2], alphas[alphas.len() - 1]];
        s.dedup();
        s
    };
    let plots = rhos
        .iter()
        .map(|&rho| {
            let rows = table.filter(|t, i| {
                let r = t.get(i, "rho").and_then(|c| c.as_f64());
                let a = t.get(i, "alpha").and_then(|c| c.as_f64()).unwrap_or(f64::NAN);
                r == Some(rho) && shown.iter().any(|s| same(*s, a))
            });
            Plot {
                stem: format!("fig3_rho{rho}"),
                table: rows,
                spec: PlotSpec::new(&format!("k-ratios, rho = {rho}"), "w", &["ratio_standard", "ratio_weighted"])
                    .grouped_by("alpha")
                    .y_label("k-ratio"),
            }
        })
        .collect();
    Ok(ExperimentOutput {
        name: "fig3".into(),
        table,
        summary: None,
        plots,
        checks,
    })
}

const FIG4_THEOREMS: [Theorem; 5] = [
    Theorem::Local,
    Theorem::Friedlander,
    Theorem::Haixiao,
    Theorem::Chen,
    Theorem::Ge,
];

/// Smallest `w` in `[0, 1]` beyond which Friedlander's coefficients are no
/// longer valid, by bisection; `None` if validity does not change.
fn friedlander_crossing(base: &GuaranteeParams) -> Option<f64> {
    let valid = |w: f64| {
        bounds::friedlander_coherence(&GuaranteeParams { w, ..*base })
            .map(|r| r.valid)
            .unwrap_or(false)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if !valid(lo) || valid(hi) {
        return None;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if valid(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Local and global coefficients for `T = T₀` over the w grid, with the RIC
/// and ROC terms replaced by their coherence upper bounds.
///
/// Defaults: `μ = 0.1`, `k = 2`, `a = 2` (Friedlander), `a = b = k` (Chen),
/// `t = 2` (Ge).
pub fn run_fig4(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mu = cfg.mu_or(0.1)?;
    let k = cfg.k_or(2)?;
    let ws = cfg.w_grid(0.05)?;
    let mut base = GuaranteeParams::new(mu, k, 1.0, 1.0, 0.0);
    base.a = cfg.a;
    base.b = cfg.b;
    base.t = cfg.t;

    let mut columns = vec!["w".to_string()];
    for th in FIG4_THEOREMS {
        for field in ["c0", "c1", "valid"] {
            columns.push(format!("{field}_{}", th.name()));
        }
    }
    columns.push("c1_ge_printed".into());
    let mut table = SweepTable::new(columns);

    let mut c0_bad = Vec::new();
    let mut c1_bad = Vec::new();
    let mut friedlander_bad = Vec::new();
    let mut chen_zero: Option<bool> = None;
    for &w in &ws {
        let p = GuaranteeParams { w, ..base };
        let results: Vec<GuaranteeResult> = FIG4_THEOREMS
            .iter()
            .map(|&th| bounds::evaluate(th, &p).map_err(config_error))
            .collect::<Result<_>>()?;
        let mut row = vec![w.into()];
        for r in &results {
            row.extend([r.c0.into(), r.c1.into(), r.valid.into()]);
        }
        row.push(results[4].c1_printed.unwrap_or(f64::NAN).into());
        table.push(row)?;

        let local = &results[0];
        for g in &results[1..] {
            if !g.valid {
                continue;
            }
            if !(local.valid && local.c0 < g.c0) {
                c0_bad.push(format!("w={w} {}: {:.4} vs {:.4}", g.theorem, local.c0, g.c0));
            }
            if !(local.valid && local.c1 < g.c1) {
                c1_bad.push(format!("w={w} {}: {:.4} vs {:.4}", g.theorem, local.c1, g.c1));
            }
        }
        let friedlander = &results[1];
        if friedlander.valid == (w > 0.8) {
            friedlander_bad.push(format!(
                "w={w}: {}",
                if friedlander.valid { "valid" } else { "invalid" }
            ));
        }
        if w == 0.0 {
            chen_zero = Some(!results[3].valid);
        }
    }

    let crossing = match friedlander_crossing(&base) {
        Some(wc) => format!("validity ends at w = {wc:.6}"),
        None => "validity does not change on [0, 1]".into(),
    };
    let friedlander_detail = if friedlander_bad.is_empty() {
        crossing
    } else {
        format!("{}; {crossing}", fmt_points(&friedlander_bad))
    };
    let mut checks = vec![
        Check::new(
            "local C0 below every valid global C0",
            c0_bad.is_empty(),
            fmt_points(&c0_bad),
        ),
        Check::new(
            "local C1 below every valid global C1",
            c1_bad.is_empty(),
            fmt_points(&c1_bad),
        ),
        Check::new(
            "friedlander invalid exactly where w > 0.8",
            friedlander_bad.is_empty(),
            friedlander_detail,
        ),
    ];
    if let Some(ok) = chen_zero {
        checks.push(Check::new(
            "chen invalid at w = 0",
            ok,
            if ok { "ok" } else { "chen reported valid at w = 0" },
        ));
    }

    let c0_cols: Vec<String> = FIG4_THEOREMS.iter().map(|t| format!("c0_{}", t.name())).collect();
    let c1_cols: Vec<String> = FIG4_THEOREMS.iter().map(|t| format!("c1_{}", t.name())).collect();
    let plot = |stem: &str, title: &str, cols: Vec<String>, label: &str| Plot {
        stem: stem.into(),
        table: masked_invalid(&table),
        spec: PlotSpec {
            title: title.into(),
            x: "w".into(),
            y: cols,
            group: None,
            y_label: label.into(),
        },
    };
    let plots = vec![
        plot("fig4_c0", "C0 comparison", c0_cols, "C0"),
        plot("fig4_c1", "C1 comparison", c1_cols, "C1"),
    ];
    Ok(ExperimentOutput {
        name: "fig4".into(),
        table,
        summary: None,
        plots,
        checks,
    })
}

/// Copy of a fig4 table with coefficients of invalid points blanked so the
/// plot does not draw them.
fn masked_invalid(table: &SweepTable) -> SweepTable {
    let mut out = SweepTable::new(table.columns().to_vec());
    for (r, row) in table.rows().iter().enumerate() {
        let mut row = row.clone();
        for th in FIG4_THEOREMS {
            let valid = table
                .get(r, &format!("valid_{}", th.name()))
                .and_then(|c| c.as_bool())
                .unwrap_or(false);
            if !valid {
                for field in ["c0", "c1"] {
                    let c = table.column_index(&format!("{field}_{}", th.name())).expect("column");
                    row[c] = f64::NAN.into();
                }
            }
        }
        out.push(row).expect("same shape");
    }
    out
}
