//! Monte-Carlo check of the local error bound on planted sparse signals.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::{admissible_alphas, ExperimentConfig};
use super::{map_indexed, Check, ExperimentOutput, Plot, PlotSpec, SweepTable, DEFAULT_SEED};
use crate::bounds::{self, GuaranteeParams};
use crate::error::{Error, Result};
use crate::matrix::{generate_matrix, MatrixKind, SensingMatrix};
use crate::solver::{solve_weighted_l1, RecoveryProblem, Tolerances};
use crate::support::{self, IndexSet};

/// `lhs` may exceed `rhs` by this much relative to `1 + ‖x‖₂` before a trial
/// counts as a violation; covers the solver's certified accuracy.
pub const VIOLATION_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy)]
struct Combo {
    rho: f64,
    alpha: f64,
    w: f64,
    len: usize,
    overlap: usize,
}

struct Trial {
    combo: Combo,
    prior: IndexSet,
    lhs: f64,
    rhs: f64,
    k_max: f64,
    premises: bool,
    converged: bool,
    violation: bool,
}

struct Setup {
    a: SensingMatrix,
    mu: f64,
    k: usize,
    epsilon: f64,
    noise_fraction: f64,
    tail_scale: f64,
    seed: u64,
    tol: Tolerances,
}

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn run_trial(s: &Setup, index: usize, combo: Combo) -> Result<Trial> {
    let n = s.a.cols();
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    rng.set_stream(index as u64);

    let mut x = DVector::zeros(n);
    for i in rand::seq::index::sample(&mut rng, n, s.k) {
        x[i] = rng.sample::<f64, _>(StandardNormal);
    }
    if s.tail_scale > 0.0 {
        let tail = gaussian_vector(&mut rng, n);
        for i in 0..n {
            if x[i] == 0.0 {
                x[i] = s.tail_scale * tail[i] / n as f64;
            }
        }
    }
    let direction = gaussian_vector(&mut rng, s.a.rows());
    let noise = if s.epsilon > 0.0 && direction.norm() > 0.0 {
        direction.normalize() * (s.noise_fraction * s.epsilon)
    } else {
        DVector::zeros(s.a.rows())
    };
    let y = s.a.apply(&x) + noise;

    let xs = x.as_slice();
    let prior = support::prior_with_overlap(xs, s.k, combo.len, combo.overlap)?;
    let model = support::support_model(xs, &prior, s.k, combo.w)?;
    let terms = support::error_terms(xs, &model)?;
    let bound = bounds::local_bound(&GuaranteeParams::new(
        s.mu,
        s.k,
        model.rho(),
        model.alpha(),
        combo.w,
    ));

    let problem = RecoveryProblem::with_prior(s.a.clone(), y, s.epsilon, &prior, combo.w)?;
    let report = solve_weighted_l1(&problem, &s.tol)?;
    let lhs = prior
        .iter()
        .map(|i| (report.x_star[i] - x[i]).powi(2))
        .sum::<f64>()
        .sqrt();
    let rhs = bound.c0 * s.epsilon + bound.c1 * terms.e_local;
    let violation =
        bound.valid && report.converged && lhs > rhs + VIOLATION_TOL * (1.0 + x.norm());
    Ok(Trial {
        combo,
        prior,
        lhs,
        rhs,
        k_max: bound.k_max,
        premises: bound.valid,
        converged: report.converged,
        violation,
    })
}

/// Solves seeded recovery problems and compares `‖x*_T − x_T‖₂` against
/// `C₀ε + C₁e`.
///
/// Trials cycle through every configured `(ρ, α, w)`. Defaults: `m = 64`,
/// `n = 128` identity-plus-Hadamard matrix, `k = 2`, 500 trials,
/// `ε = 0.05` with noise on the ball boundary, `ρ ∈ {0.5, 1}`, all
/// admissible `α`, `w ∈ {0, 0.5, 1}`.
pub fn run_verify_local(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let kind = cfg.matrix.clone().unwrap_or(MatrixKind::IdentityPlusOrthobasis);
    let m = cfg.m.unwrap_or(64);
    let n = cfg.n.unwrap_or(128);
    let seed = cfg.seed_or(DEFAULT_SEED);
    let k = cfg.k_or(2)?;
    let trials = cfg.trials.unwrap_or(500);
    let epsilon = cfg.epsilon.unwrap_or(0.05);
    let noise_fraction = cfg.noise_fraction.unwrap_or(1.0);
    let tail_scale = cfg.tail_scale.unwrap_or(0.0);
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon = {epsilon} must be nonnegative")));
    }
    if !(0.0..=1.0).contains(&noise_fraction) {
        return Err(Error::InvalidConfig(format!(
            "noise_fraction = {noise_fraction} must lie in [0, 1]"
        )));
    }
    if !(tail_scale >= 0.0) {
        return Err(Error::InvalidConfig("tail_scale must be nonnegative".into()));
    }
    if k > n {
        return Err(Error::InvalidConfig(format!("k = {k} exceeds n = {n}")));
    }
    let a = generate_matrix(&kind, m, n, seed).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mu = a.coherence()?;

    let rhos = cfg.rho_list(&[0.5, 1.0])?;
    let ws = match (&cfg.w, cfg.w_step) {
        (None, None) => vec![0.0, 0.5, 1.0],
        _ => cfg.w_grid(0.05)?,
    };
    let mut combos = Vec::new();
    for &rho in &rhos {
        let alphas = match &cfg.alpha {
            None | Some(super::AlphaSpec::Admissible) => admissible_alphas(rho, k)?,
            Some(super::AlphaSpec::List(l)) if l.is_empty() => {
                return Err(Error::InvalidConfig("alpha list is empty".into()))
            }
            Some(super::AlphaSpec::List(l)) => l.clone(),
        };
        for alpha in alphas {
            let (len, overlap) = support::prior_counts(rho, alpha, k)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            if overlap > k || len - overlap > n - k {
                return Err(Error::InvalidConfig(format!(
                    "rho = {rho}, alpha = {alpha}: overlap not achievable with k = {k}, n = {n}"
                )));
            }
            for &w in &ws {
                combos.push(Combo {
                    rho,
                    alpha,
                    w,
                    len,
                    overlap,
                });
            }
        }
    }

    let setup = Setup {
        a,
        mu,
        k,
        epsilon,
        noise_fraction,
        tail_scale,
        seed,
        tol: Tolerances::default(),
    };
    let results: Vec<Result<Trial>> =
        map_indexed(trials, |t| run_trial(&setup, t, combos[t % combos.len()]));

    let mut table = SweepTable::new([
        "trial", "rho", "alpha", "w", "prior", "k_max", "lhs", "rhs", "slack", "premises",
        "converged", "violation",
    ]);
    let (mut premise_ok, mut converged, mut nonconverged, mut violations) = (0, 0, 0, 0);
    let mut min_slack = f64::INFINITY;
    for (t, r) in results.into_iter().enumerate() {
        let tr = r?;
        if tr.premises {
            premise_ok += 1;
            if tr.converged {
                converged += 1;
                min_slack = min_slack.min(tr.rhs - tr.lhs);
            } else {
                nonconverged += 1;
            }
        }
        violations += usize::from(tr.violation);
        table.push(vec![
            t.into(),
            tr.combo.rho.into(),
            tr.combo.alpha.into(),
            tr.combo.w.into(),
            tr.prior.to_string().into(),
            tr.k_max.into(),
            tr.lhs.into(),
            tr.rhs.into(),
            (tr.rhs - tr.lhs).into(),
            tr.premises.into(),
            tr.converged.into(),
            tr.violation.into(),
        ])?;
    }

    let mut summary = SweepTable::new([
        "trials",
        "mu",
        "premises_hold",
        "converged",
        "not_converged",
        "violations",
        "min_slack",
    ]);
    summary.push(vec![
        trials.into(),
        mu.into(),
        premise_ok.into(),
        converged.into(),
        nonconverged.into(),
        violations.into(),
        min_slack.into(),
    ])?;
    let checks = vec![
        Check::new(
            "no violations of the local bound among converged trials with premises satisfied",
            violations == 0,
            format!(
                "{violations} violations; {converged} checked, {nonconverged} not converged, {} premises fail",
                trials - premise_ok
            ),
        ),
        Check::new(
            "bound premises hold in at least one trial",
            premise_ok > 0,
            format!("{premise_ok} of {trials}"),
        ),
    ];
    let plots = vec![Plot {
        stem: "verify".into(),
        table: table.clone(),
        spec: PlotSpec::new("Local bound: lhs and rhs per trial", "trial", &["lhs", "rhs"])
            .y_label("error"),
    }];
    Ok(ExperimentOutput {
        name: "verify".into(),
        table,
        summary: Some(summary),
        plots,
        checks,
    })
}
