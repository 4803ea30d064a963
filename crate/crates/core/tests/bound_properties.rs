use proptest::prelude::*;

use localbound::bounds::{self, GuaranteeParams, Theorem};

fn params(mu: f64, k: usize, rho: f64, alpha: f64, w: f64) -> GuaranteeParams {
    GuaranteeParams::new(mu, k, rho, alpha, w)
}

#[test]
fn local_coefficients_decrease_with_rho() {
    // Nonempty priors only: |T| = rho k >= 1.
    for &(mu, k) in &[(0.1, 4), (0.05, 6), (0.125, 2)] {
        for alpha in [0.0, 0.5, 1.0] {
            for w in [0.0, 0.3, 1.0] {
                let mut prev: Option<(f64, f64)> = None;
                for i in (0..=300).rev() {
                    let rho = 1.0 / k as f64 + i as f64 * 0.01;
                    let r = bounds::local_bound(&params(mu, k, rho, alpha, w));
                    if !r.valid || bounds::local_denominator(&params(mu, k, rho, alpha, w)) <= 0.0 {
                        prev = None;
                        continue;
                    }
                    if let Some((c0, c1)) = prev {
                        assert!(r.c0 < c0 && r.c1 < c1, "mu={mu} k={k} alpha={alpha} w={w} rho={rho}");
                    }
                    prev = Some((r.c0, r.c1));
                }
            }
        }
    }
}

#[test]
fn local_coefficient_monotonicity_in_w() {
    for (rho, k) in [(0.5, 4), (1.0, 4), (0.75, 4)] {
        for alpha in [0.0, 1.0 / 3.0, 0.5, 1.0] {
            if alpha > 0.0 && alpha * rho * (k as f64) < 1.0 {
                continue;
            }
            let curve: Vec<_> = (0..=100)
                .map(|i| bounds::local_bound(&params(0.1, k, rho, alpha, i as f64 / 100.0)))
                .collect();
            for pair in curve.windows(2) {
                assert!(pair[0].valid && pair[1].valid);
                if alpha == 0.0 {
                    assert!(pair[1].c0 < pair[0].c0 && pair[1].c1 < pair[0].c1);
                } else {
                    assert!(pair[1].c0 > pair[0].c0 && pair[1].c1 > pair[0].c1);
                }
            }
        }
    }
}

#[test]
fn k_max_branches_meet_at_zero() {
    for mu in [0.01, 0.1, 0.3, 1.0] {
        for rho in [0.25, 0.5, 1.0, 2.0] {
            for alpha in [0.0, 0.5, 1.0] {
                let at_zero = bounds::local_k_max(mu, rho, alpha, 0.0);
                let near = bounds::local_k_max(mu, rho, alpha, 1e-13);
                assert!((at_zero - near).abs() <= 1e-9 * at_zero.max(1.0));
            }
        }
    }
}

#[test]
fn cai_premise_and_limit() {
    let r = bounds::cai_bound(&params(0.1, 6, 1.0, 1.0, 1.0));
    assert!(!r.valid);
    assert!(r.reason.contains("(1 + 1/mu)/2"));
    let r = bounds::cai_bound(&params(1e-6, 2, 1.0, 1.0, 1.0));
    assert!((r.k_max - 500_000.5).abs() < 1e-6);
}

#[test]
fn zero_constant_simplifications() {
    let mut p = params(0.1, 2, 1.0, 1.0, 1.0);
    p.a = Some(2.0);
    let r = bounds::friedlander_bound(&p, 0.0, 0.0).unwrap();
    let s = 2f64.sqrt();
    assert!((r.c0 - 2.0 * (1.0 + 1.0 / s) / (1.0 - 1.0 / s)).abs() < 1e-12);
    assert!((r.c1 - 4.0 / ((2.0 * 2.0f64).sqrt() * (1.0 - 1.0 / s))).abs() < 1e-12);

    let p = params(0.1, 2, 1.0, 1.0, 1.0);
    let r = bounds::ge_bound(&p, 0.0).unwrap();
    assert!((r.c0 - 2.0 * s).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn valid_results_are_finite_and_positive(
        mu in 0.001f64..1.0,
        k in 1usize..12,
        rho in 0.0f64..2.0,
        alpha in 0.0f64..=1.0,
        w in 0.0f64..=1.0,
    ) {
        let p = params(mu, k, rho, alpha, w);
        for th in Theorem::ALL {
            if let Ok(r) = bounds::evaluate(th, &p) {
                if r.valid {
                    prop_assert!(r.c0.is_finite() && r.c0 > 0.0, "{} c0 {}", th, r.c0);
                    prop_assert!(r.c1.is_finite() && r.c1 > 0.0, "{} c1 {}", th, r.c1);
                    prop_assert!(r.k_max > 0.0);
                }
            }
        }
    }

    #[test]
    fn validity_survives_smaller_mu(
        mu in 0.002f64..1.0,
        shrink in 0.01f64..1.0,
        k in 1usize..10,
        rho in 0.1f64..1.5,
        alpha in 0.0f64..=1.0,
        w in 0.0f64..=1.0,
    ) {
        let p = params(mu, k, rho, alpha, w);
        let q = params(mu * shrink, k, rho, alpha, w);
        for th in Theorem::ALL {
            let (a, b) = (bounds::evaluate(th, &p), bounds::evaluate(th, &q));
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!(!a.valid || b.valid, "{} valid at mu={} but not at {}: {}", th, mu, mu * shrink, b.reason);
            }
        }
    }

    #[test]
    fn haixiao_reduces_to_cai(mu in 0.001f64..1.0, k in 1usize..50) {
        let p = params(mu, k, 0.5, 0.5, 1.0);
        let (h, c) = (bounds::haixiao_bound(&p), bounds::cai_bound(&p));
        prop_assert_eq!(h.valid, c.valid);
        if h.valid {
            // Relative: both blow up at the premise boundary.
            prop_assert!((h.c0 - c.c0).abs() <= 1e-12 * c.c0.max(1.0));
            prop_assert!((h.c1 - c.c1).abs() <= 1e-12 * c.c1.max(1.0));
        }
    }
}
