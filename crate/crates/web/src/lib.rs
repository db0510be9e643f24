//! wasm-bindgen surface for the browser demo in `www/`.
//!
//! Every export returns a JSON string: either the payload, or
//! `{"error": "..."}`. Keeping JsValue out of the signatures lets the same
//! functions run (and be tested) on native targets.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use bellframe::harness::{self, ExperimentConfig, Verdict};
use bellframe::kinematics::{self, analyze_timing, ExperimentGeometry};
use bellframe::models::{ModelId, Setting};
use bellframe::statistics::estimate_correlation;
use bellframe::TimingClass;

fn respond<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| json!({ "error": e.to_string() }).to_string()),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn geometry(source_z: f64, alice_z: f64, bob_z: f64, alice_beta: f64, bob_beta: f64) -> ExperimentGeometry {
    ExperimentGeometry { source_z, alice_z, bob_z, alice_beta, bob_beta, emission_t: 0.0 }
}

/// Measurement events, their times in both apparatus frames and the timing class.
#[wasm_bindgen]
pub fn timing_diagram(source_z: f64, alice_z: f64, bob_z: f64, alice_beta: f64, bob_beta: f64) -> String {
    let g = geometry(source_z, alice_z, bob_z, alice_beta, bob_beta);
    respond(analyze_timing(&g, kinematics::DEFAULT_EPSILON).map_err(|e| e.to_string()))
}

#[derive(Debug, Serialize)]
struct CurvePoint {
    theta: f64,
    analytic: f64,
    estimate: f64,
    stderr: f64,
}

fn curve(model: &str, timing: &str, points: u32, trials: u32, seed: u32) -> Result<Vec<CurvePoint>, String> {
    let model: ModelId = model.parse().map_err(|e: bellframe::models::ModelError| e.to_string())?;
    let timing: TimingClass = timing.parse()?;
    if points < 2 || trials == 0 {
        return Err("need at least 2 points and 1 trial".into());
    }
    let a = Setting::new(0.0).map_err(|e| e.to_string())?;
    (0..points)
        .map(|k| {
            let theta = std::f64::consts::PI * k as f64 / (points - 1) as f64;
            let b = Setting::new(theta).map_err(|e| e.to_string())?;
            let counts = harness::sample_counts(model, timing, a, b, trials as u64, seed as u64, k);
            let est = estimate_correlation(&counts).map_err(|e| e.to_string())?;
            Ok(CurvePoint {
                theta,
                analytic: model.analytic_correlation(a, b, timing),
                estimate: est.e_hat,
                stderr: est.stderr,
            })
        })
        .collect()
}

/// `E(0, θ)` for θ in `[0, π]`: closed form next to a Monte Carlo estimate.
#[wasm_bindgen]
pub fn correlation_curve(model: &str, timing: &str, points: u32, trials: u32, seed: u32) -> String {
    respond(curve(model, timing, points, trials, seed))
}

#[allow(clippy::too_many_arguments)]
fn chsh(
    model: &str,
    source_z: f64,
    alice_z: f64,
    bob_z: f64,
    alice_beta: f64,
    bob_beta: f64,
    settings: &[f64],
    trials: u32,
    seed: u32,
) -> Result<serde_json::Value, String> {
    let s = |x: f64| Setting::new(x).map_err(|e| e.to_string());
    let [a1, a2, b1, b2] = <[f64; 4]>::try_from(settings).map_err(|_| "need 4 setting angles".to_string())?;
    let cfg = ExperimentConfig {
        geometry: geometry(source_z, alice_z, bob_z, alice_beta, bob_beta),
        model: model.parse().map_err(|e: bellframe::models::ModelError| e.to_string())?,
        alice_settings: [s(a1)?, s(a2)?],
        bob_settings: [s(b1)?, s(b2)?],
        trials_per_pair: trials as u64,
        seed: seed as u64,
        epsilon: kinematics::DEFAULT_EPSILON,
    };
    let report = harness::run_experiment(&cfg).map_err(|e| e.to_string())?;
    let verdict = Verdict::of(&report.chsh);
    Ok(json!({ "report": report, "verdict": verdict }))
}

/// Full CHSH run for one model and geometry; `settings` is `[a1, a2, b1, b2]`.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn chsh_experiment(
    model: &str,
    source_z: f64,
    alice_z: f64,
    bob_z: f64,
    alice_beta: f64,
    bob_beta: f64,
    settings: &[f64],
    trials: u32,
    seed: u32,
) -> String {
    respond(chsh(model, source_z, alice_z, bob_z, alice_beta, bob_beta, settings, trials, seed))
}
