//! Browser bindings for the `entmeter` demo page.
//!
//! Every export returns a flat `Float64Array`; the page slices it into rows.
//! The plain Rust functions underneath are what the native tests exercise.

use entmeter::mixedbounds::{concurrence_lower_bound, werner_sweep, BoundConfig};
use entmeter::monotones::{definition, evaluate_monotone, MonotoneKind, Normalization};
use entmeter::oracles::{reduced_entropy, wootters_concurrence};
use entmeter::source_sim::{apply_storage, LocalNoise};
use entmeter::tensorkit::{named, DensityOperator, LegLayout, StateVector};
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

/// Rows of `[p, bound, wootters]`.
pub fn werner_rows(points: usize, alpha1: f64) -> Result<Vec<f64>, String> {
    let rows =
        werner_sweep(points, &BoundConfig::new(alpha1).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    Ok(rows.iter().flat_map(|r| [r.p, r.bound, r.wootters]).collect())
}

/// Rows of `[steps, bound, wootters]` for a Werner source whose copies sit
/// in a depolarizing memory.
pub fn storage_rows(p: f64, q: f64, max_steps: usize, alpha1: f64) -> Result<Vec<f64>, String> {
    let err = |e: entmeter::Error| e.to_string();
    let config = BoundConfig::new(alpha1).map_err(err)?;
    let noise = LocalNoise::depolarizing(q).map_err(err)?;
    let source = named::werner(p).map_err(err)?;
    let mut out = Vec::with_capacity(3 * (max_steps + 1));
    for k in 0..=max_steps {
        let rho = apply_storage(&source, &noise, k).map_err(err)?;
        let b = concurrence_lower_bound(&rho, &config).map_err(err)?;
        out.extend([k as f64, b.bound, wootters_concurrence(&rho).map_err(err)?]);
    }
    Ok(out)
}

/// `[concurrence, raw expectation, entanglement entropy, bound]` for
/// `cos θ |00⟩ + e^{iφ} sin θ |11⟩`.
pub fn pure_summary(theta: f64, phi: f64) -> Result<Vec<f64>, String> {
    let err = |e: entmeter::Error| e.to_string();
    let zero = Complex64::new(0.0, 0.0);
    let amps = [Complex64::new(theta.cos(), 0.0), zero, zero, Complex64::from_polar(theta.sin(), phi)];
    let psi = StateVector::from_slice(&amps, LegLayout::bipartite(2, 2).map_err(err)?).map_err(err)?;
    let e = evaluate_monotone(definition(MonotoneKind::Concurrence), &psi, Normalization::Calibrated).map_err(err)?;
    let entropy = reduced_entropy(&psi, &[0]).map_err(err)?;
    let bound = concurrence_lower_bound(&DensityOperator::from_pure(&psi), &BoundConfig::default()).map_err(err)?;
    Ok(vec![e.value, e.raw_expectation, entropy, bound.bound])
}

#[wasm_bindgen(js_name = wernerSweep)]
pub fn werner_sweep_js(points: usize, alpha1: f64) -> Result<Vec<f64>, JsValue> {
    werner_rows(points, alpha1).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = storageDecay)]
pub fn storage_decay_js(p: f64, q: f64, max_steps: usize, alpha1: f64) -> Result<Vec<f64>, JsValue> {
    storage_rows(p, q, max_steps, alpha1).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = twoQubitPure)]
pub fn two_qubit_pure_js(theta: f64, phi: f64) -> Result<Vec<f64>, JsValue> {
    pure_summary(theta, phi).map_err(|e| JsValue::from_str(&e))
}
