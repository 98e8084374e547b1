//! WebAssembly bindings for the browser demo. Every export returns JSON text
//! so the page only needs `JSON.parse`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use seldeg::estimators::growth_exponent_fit;
use seldeg::harness::build_theory;
use seldeg::{ModelParams, SelectionRule, Simulation};

const MAX_D: usize = 100_000;
const MAX_STEPS: u64 = 2_000_000;

#[derive(Serialize)]
struct Curve {
    d: Vec<usize>,
    c: Vec<f64>,
    x: Option<Vec<f64>>,
    gamma: Option<f64>,
    gamma_star: Option<f64>,
    condition6_ok: bool,
}

#[derive(Serialize)]
struct Sampled {
    n: u64,
    s_size: u64,
    /// Observed degrees with their empirical `c` and restricted `x`.
    d: Vec<usize>,
    c_hat: Vec<f64>,
    x_hat: Vec<f64>,
    /// `(n, |S_n|)` at powers of two.
    growth: Vec<(u64, u64)>,
    alpha_hat: Option<f64>,
}

/// Limiting `c_d` and `x_d` of a plane-oriented tree with parameter `beta`
/// for a selected set growing like `n^alpha` whose members are leaves at birth.
pub fn theory_curve_json(beta: f64, alpha: f64, d_max: usize) -> Result<String, String> {
    let model = ModelParams::Port { beta };
    let tf = build_theory(&model, "level_j", alpha, d_max.clamp(2, MAX_D), None).map_err(|e| e.to_string())?;
    let curve = Curve {
        d: (tf.m..=tf.d_max).collect(),
        c: tf.c.clone(),
        x: tf.x.clone(),
        gamma: tf.gamma,
        gamma_star: tf.gamma_star,
        condition6_ok: tf.condition6_ok,
    };
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

/// Grows a plane-oriented tree for `n` steps and restricts to level `j`.
pub fn simulate_level_json(beta: f64, j: u32, n: u64, seed: u64) -> Result<String, String> {
    if n > MAX_STEPS {
        return Err(format!("at most {MAX_STEPS} steps in the browser"));
    }
    let mut sim = Simulation::new(ModelParams::Port { beta }, SelectionRule::LevelJ { j }, seed)
        .map_err(|e| e.to_string())?;
    let mut growth = Vec::new();
    let mut next = 1;
    while next < n {
        sim.run_until(next).map_err(|e| e.to_string())?;
        growth.push((next, sim.selection().s_size()));
        next *= 2;
    }
    sim.run_until(n).map_err(|e| e.to_string())?;
    growth.push((n, sim.selection().s_size()));

    let cp = sim.checkpoint();
    let mut out = Sampled {
        n,
        s_size: cp.s_size,
        d: Vec::new(),
        c_hat: Vec::new(),
        x_hat: Vec::new(),
        growth,
        alpha_hat: None,
    };
    for (d, &count) in cp.histogram.iter().enumerate() {
        let restricted = cp.restricted.get(d).copied().unwrap_or(0);
        if count > 0 {
            out.d.push(d);
            out.c_hat.push(count as f64 / n as f64);
            out.x_hat.push(if cp.s_size > 0 { restricted as f64 / cp.s_size as f64 } else { 0.0 });
        }
    }
    let points: Vec<(u64, f64)> = out
        .growth
        .iter()
        .filter(|&&(m, s)| m >= 1024 && s > 0)
        .map(|&(m, s)| (m, s as f64))
        .collect();
    out.alpha_hat = growth_exponent_fit(&points).ok().map(|g| g.alpha_hat);
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn theory_curve(beta: f64, alpha: f64, d_max: usize) -> Result<String, JsValue> {
    theory_curve_json(beta, alpha, d_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate_level(beta: f64, j: u32, n: u32, seed: u32) -> Result<String, JsValue> {
    simulate_level_json(beta, j, n as u64, seed as u64).map_err(|e| JsValue::from_str(&e))
}

/// `alpha (gamma - 1) + 1`, or NaN outside the valid range.
#[wasm_bindgen]
pub fn gamma_star(alpha: f64, gamma: f64) -> f64 {
    seldeg::theory::gamma_star(alpha, gamma).unwrap_or(f64::NAN)
}
