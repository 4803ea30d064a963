//! Browser bindings for the coefficient calculators. Every export returns a
//! JSON string; invalid points carry `null` coefficients and a reason.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use localbound::bounds::{self, Baseline, GuaranteeParams, GuaranteeResult, Theorem};

fn w_grid(steps: u32) -> Vec<f64> {
    let steps = steps.clamp(1, 1000);
    (0..=steps).map(|i| i as f64 / steps as f64).collect()
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn result_json(r: &GuaranteeResult) -> Value {
    json!({
        "c0": if r.valid { finite(r.c0) } else { Value::Null },
        "c1": if r.valid { finite(r.c1) } else { Value::Null },
        "k_max": finite(r.k_max),
        "valid": r.valid,
        "reason": r.reason,
    })
}

/// Local `C₀`, `C₁` along the w grid.
#[wasm_bindgen]
pub fn local_curves(mu: f64, k: u32, rho: f64, alpha: f64, steps: u32) -> String {
    let ws = w_grid(steps);
    let points: Vec<Value> = ws
        .iter()
        .map(|&w| result_json(&bounds::local_bound(&GuaranteeParams::new(mu, k as usize, rho, alpha, w))))
        .collect();
    json!({ "w": ws, "points": points }).to_string()
}

/// Local against the four weighted global guarantees with `T = T₀`, RIC and
/// ROC terms replaced by coherence bounds.
#[wasm_bindgen]
pub fn compare_guarantees(mu: f64, k: u32, steps: u32) -> String {
    let ws = w_grid(steps);
    let theorems = [Theorem::Local, Theorem::Friedlander, Theorem::Haixiao, Theorem::Chen, Theorem::Ge];
    let mut series = serde_json::Map::new();
    for th in theorems {
        let points: Vec<Value> = ws
            .iter()
            .map(|&w| {
                let p = GuaranteeParams::new(mu, k as usize, 1.0, 1.0, w);
                match bounds::evaluate(th, &p) {
                    Ok(r) => result_json(&r),
                    Err(e) => json!({ "c0": null, "c1": null, "k_max": null, "valid": false, "reason": e.to_string() }),
                }
            })
            .collect();
        series.insert(th.name().to_string(), Value::Array(points));
    }
    json!({ "w": ws, "series": series }).to_string()
}

/// Local sparsity bound over the standard and weighted baselines along the
/// w grid.
#[wasm_bindgen]
pub fn k_ratios(mu: f64, rho: f64, alpha: f64, steps: u32) -> String {
    let ws = w_grid(steps);
    let ratio = |w: f64, b: Baseline| {
        bounds::k_ratio(&GuaranteeParams::new(mu, 1, rho, alpha, w), b)
            .map(finite)
            .unwrap_or(Value::Null)
    };
    let standard: Vec<Value> = ws.iter().map(|&w| ratio(w, Baseline::Standard)).collect();
    let weighted: Vec<Value> = ws.iter().map(|&w| ratio(w, Baseline::Weighted)).collect();
    json!({ "w": ws, "standard": standard, "weighted": weighted }).to_string()
}
