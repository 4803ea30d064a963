//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use localbound::bounds::{self, GuaranteeParams};
use localbound::experiment::{self, ExperimentConfig, ExperimentOutput};
use localbound::matrix::{generate_matrix, ric_exact, roc_exact, MatrixKind};
use localbound::solver::{solve_l0_oracle, solve_weighted_l1, RecoveryProblem, Tolerances};
use localbound::support::{self, IndexSet};

type Outcome = Result<String, String>;

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{name} = {got}, expected {want} ± {tol}"))
    }
}

fn failed_checks(out: &ExperimentOutput) -> Vec<String> {
    out.checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect()
}

fn checks_outcome(out: &ExperimentOutput) -> Outcome {
    let failed = failed_checks(out);
    if failed.is_empty() {
        Ok(format!("{} checks, {} rows", out.checks.len(), out.table.len()))
    } else {
        Err(failed.join(" | "))
    }
}

fn formula_oracles() -> Outcome {
    const TOL: f64 = 1e-4;
    let local = bounds::local_bound(&GuaranteeParams::new(0.1, 4, 0.5, 0.0, 0.0));
    close("local c0", local.c0, 2.33069, TOL)?;
    close("local c1", local.c1, 0.31427, TOL)?;
    close("local k_max", local.k_max, 22.0, TOL)?;
    let cai = bounds::cai_bound(&GuaranteeParams::new(0.1, 2, 1.0, 1.0, 1.0));
    close("cai c0", cai.c0, 4.46243, TOL)?;
    close("cai c1", cai.c1, 0.94761, TOL)?;
    close("cai k_max", cai.k_max, 5.5, TOL)?;
    let w1 = GuaranteeParams::new(0.1, 2, 1.0, 1.0, 1.0);
    let chen = bounds::chen_coherence(&w1).map_err(|e| e.to_string())?;
    close("chen c0", chen.c0, 4.94413, TOL)?;
    close("chen c1", chen.c1, 2.41421, TOL)?;
    let ge = bounds::ge_coherence(&w1).map_err(|e| e.to_string())?;
    close("ge c0", ge.c0, 5.60142, TOL)?;
    if !(local.valid && cai.valid && chen.valid && ge.valid) {
        return Err("a reference point was reported invalid".into());
    }
    Ok("local, cai, chen, ge reference values within 1e-4".into())
}

fn fig1_properties() -> Outcome {
    let cfg = ExperimentConfig::parse("mu = 0.1\nk = 4\nrho = 0.5, 1\nw_step = 0.01").map_err(|e| e.to_string())?;
    checks_outcome(&experiment::run_fig1(&cfg).map_err(|e| e.to_string())?)
}

fn fig3_properties() -> Outcome {
    let cfg = ExperimentConfig::parse("mu = 0.1\nrho = 0.5, 0.75\nw_step = 0.05").map_err(|e| e.to_string())?;
    checks_outcome(&experiment::run_fig3(&cfg).map_err(|e| e.to_string())?)
}

fn fig4_properties() -> Outcome {
    let cfg = ExperimentConfig::parse("mu = 0.1\nk = 2\nw_step = 0.05").map_err(|e| e.to_string())?;
    checks_outcome(&experiment::run_fig4(&cfg).map_err(|e| e.to_string())?)
}

fn algebraic_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..10_000 {
        let n = rng.random_range(1..=30);
        let k = rng.random_range(1..=n);
        let x: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random_bool(0.3) {
                    0.0
                } else {
                    rng.sample::<f64, _>(StandardNormal)
                }
            })
            .collect();
        let prior = IndexSet::new((0..n).filter(|_| rng.random_bool(0.4)).collect());
        let w = rng.random_range(0.0..=1.0);
        let model = support::support_model(&x, &prior, k, w).map_err(|e| e.to_string())?;
        let t = support::error_terms(&x, &model).map_err(|e| e.to_string())?;
        if (t.e_proof - t.e_local).abs() > 1e-12 {
            return Err(format!("case {case}: e_proof {} vs e_local {}", t.e_proof, t.e_local));
        }
    }
    let mut points = 0;
    for mu in [0.01, 0.05, 0.1, 0.125, 0.2, 0.3, 0.5, 1.0] {
        for k in 1..=60 {
            let p = GuaranteeParams::new(mu, k, 0.5, 0.5, 1.0);
            let (h, c) = (bounds::haixiao_bound(&p), bounds::cai_bound(&p));
            if h.valid != c.valid {
                return Err(format!("mu={mu} k={k}: validity differs"));
            }
            if h.valid {
                for (name, a, b) in [("c0", h.c0, c.c0), ("c1", h.c1, c.c1), ("k_max", h.k_max, c.k_max)] {
                    if (a - b).abs() > 1e-12 {
                        return Err(format!("mu={mu} k={k}: haixiao {name} {a} vs cai {b}"));
                    }
                }
            }
            points += 1;
        }
    }
    Ok(format!("10000 e-identity instances; haixiao(w=1) = cai on {points} points"))
}

fn solver_oracle_equivalence() -> Outcome {
    let tol = Tolerances::default();
    let mut worst: f64 = 0.0;
    for i in 0..200u64 {
        let n = 6 + 2 * (i as usize % 4);
        let m = n / 2 + 2;
        let a = generate_matrix(&MatrixKind::GaussianNormalized, m, n, 1000 + i).map_err(|e| e.to_string())?;
        let mu = a.coherence().map_err(|e| e.to_string())?;
        let limit = 0.5 * (1.0 + 1.0 / mu);
        // Largest k strictly below the exact-recovery threshold.
        let k = ((limit.ceil() - 1.0) as usize).clamp(1, 5);
        if k as f64 >= limit {
            return Err(format!("instance {i}: mu = {mu} admits no k >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        let mut x = DVector::zeros(n);
        for j in rand::seq::index::sample(&mut rng, n, k) {
            x[j] = rng.sample::<f64, _>(StandardNormal);
        }
        let p = RecoveryProblem::new(a.clone(), a.apply(&x), 0.0, vec![1.0; n]).map_err(|e| e.to_string())?;
        let r = solve_weighted_l1(&p, &tol).map_err(|e| e.to_string())?;
        if !r.converged {
            return Err(format!("instance {i}: solver did not converge"));
        }
        let err = (&r.x_star - &x).amax();
        let (x0, k0) = solve_l0_oracle(&p, k).map_err(|e| format!("instance {i}: {e}"))?;
        let err0 = (&r.x_star - &x0).amax();
        worst = worst.max(err).max(err0);
        if err > 1e-6 || err0 > 1e-6 || k0 != k {
            return Err(format!(
                "instance {i} (n={n}, k={k}): |x*-x| = {err:e}, |x*-x0| = {err0:e}, k0 = {k0}"
            ));
        }
    }
    Ok(format!("200 instances, max deviation {worst:.2e}"))
}

fn empirical_local_bound() -> Outcome {
    let out = experiment::run_verify_local(&ExperimentConfig::default()).map_err(|e| e.to_string())?;
    let summary = out.summary.as_ref().ok_or("missing summary")?;
    let get = |c: &str| summary.get(0, c).and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
    let (trials, premises, violations) = (get("trials"), get("premises_hold"), get("violations"));
    if trials < 500.0 {
        return Err(format!("only {trials} trials"));
    }
    if violations != 0.0 {
        return Err(format!("{violations} violations"));
    }
    if premises < 1.0 {
        return Err("premises never held".into());
    }
    checks_outcome(&out)?;
    Ok(format!(
        "{trials} trials, {premises} with premises, {} converged, min slack {:.3e}",
        get("converged"),
        get("min_slack")
    ))
}

fn constant_ordering() -> Outcome {
    let mut pairs = 0;
    for i in 0..50u64 {
        let n = 6 + (i as usize % 7);
        let m = 3 + (i as usize % (n - 3));
        let a = generate_matrix(&MatrixKind::GaussianNormalized, m, n, 500 + i).map_err(|e| e.to_string())?;
        let mu = a.coherence().map_err(|e| e.to_string())?;
        for k in 1..=3.min(n / 2) {
            let delta = ric_exact(&a, k).map_err(|e| e.to_string())?;
            if delta > (k as f64 - 1.0) * mu + 1e-10 {
                return Err(format!("matrix {i}: delta_{k} = {delta} > (k-1) mu = {}", (k as f64 - 1.0) * mu));
            }
            let theta = roc_exact(&a, k, k).map_err(|e| e.to_string())?;
            let delta2 = ric_exact(&a, 2 * k).map_err(|e| e.to_string())?;
            if theta > delta2 + 1e-10 {
                return Err(format!("matrix {i}: theta_{k},{k} = {theta} > delta_{} = {delta2}", 2 * k));
            }
            pairs += 1;
        }
    }
    Ok(format!("50 matrices, {pairs} (matrix, k) pairs"))
}

fn determinism() -> Outcome {
    let cfg = ExperimentConfig::default();
    let runs: [(&str, fn(&ExperimentConfig) -> localbound::Result<ExperimentOutput>); 5] = [
        ("fig1", experiment::run_fig1),
        ("fig2", experiment::run_fig2),
        ("fig3", experiment::run_fig3),
        ("fig4", experiment::run_fig4),
        ("verify", experiment::run_verify_local),
    ];
    for (name, run) in runs {
        let a = run(&cfg).map_err(|e| e.to_string())?;
        let b = run(&cfg).map_err(|e| e.to_string())?;
        if a.table.to_csv() != b.table.to_csv() {
            return Err(format!("{name}: CSV differs between runs"));
        }
        let sa = a.summary.map(|s| s.to_csv());
        let sb = b.summary.map(|s| s.to_csv());
        if sa != sb {
            return Err(format!("{name}: summary differs between runs"));
        }
    }
    Ok("fig1-4 and verify reproduce byte-identical CSVs".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("formula-oracle agreement", formula_oracles),
        ("fig1 coefficient properties", fig1_properties),
        ("fig3 k-ratios exceed 1", fig3_properties),
        ("fig4 local vs global coefficients", fig4_properties),
        ("algebraic identities", algebraic_identities),
        ("solver oracle equivalence", solver_oracle_equivalence),
        ("empirical local bound", empirical_local_bound),
        ("tiny-scale constant ordering", constant_ordering),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {} FAIL  {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
