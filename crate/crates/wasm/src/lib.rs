//! Browser bindings for the demo page in `www/`.
//!
//! Each export returns a string (SVG or JSON) so the page needs no glue beyond
//! what `wasm-bindgen --target web` generates.

use serde_json::json;
use wasm_bindgen::prelude::*;

use expmath::agmpi::gauss_legendre_pi;
use expmath::bbopt::{bb_minimize, steepest_descent_baseline, Quadratic, Rosenbrock, Safeguard, Variant};
use expmath::walks::{self, ColorMode, ImageFormat};
use expmath::PrecisionContext;

/// Largest walk the page will ask for; digit extraction is quadratic-ish.
pub const MAX_WALK_STEPS: usize = 200_000;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// SVG of the walk on the first `count` digits of `constant` in `base`.
pub fn walk_svg_string(constant: &str, base: u32, count: usize, progress: bool) -> Result<String, String> {
    if count == 0 || count > MAX_WALK_STEPS {
        return Err(format!("step count must lie in 1..={MAX_WALK_STEPS}"));
    }
    let c: walks::Constant = constant.parse().map_err(|e: expmath::Error| e.to_string())?;
    let stream = walks::digits_auto(c, base, count).map_err(|e| e.to_string())?;
    let path = walks::walk(&stream).map_err(|e| e.to_string())?;
    let color = if progress { ColorMode::Progress } else { ColorMode::Mono };
    let bytes = walks::render(&path, ImageFormat::Svg, 640, 640, color).map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

/// BB iterates on `½(x₁² + κx₂²)` (or Rosenbrock when `kappa` is 0) next to
/// steepest descent from the same start, as JSON.
pub fn bb_trace_json(kappa: f64, variant: &str, x1: f64, x2: f64, tol: f64) -> Result<String, String> {
    let v = match variant {
        "bb1" => Variant::Bb1,
        "bb2" => Variant::Bb2,
        other => return Err(format!("unknown variant `{other}`")),
    };
    if tol.is_nan() || tol <= 0.0 || !x1.is_finite() || !x2.is_finite() {
        return Err("tolerance must be positive and the start finite".into());
    }
    let x0 = [x1, x2];
    let (bb, sd, name) = if kappa == 0.0 {
        let f = Rosenbrock::default();
        let bb = bb_minimize(&f, &x0, tol, 5000, v, Safeguard::default()).map_err(|e| e.to_string())?;
        let sd = steepest_descent_baseline(&f, &x0, tol, 5000).map_err(|e| e.to_string())?;
        (bb, sd, "rosenbrock")
    } else {
        if kappa.is_nan() || kappa <= 0.0 || !kappa.is_finite() {
            return Err("κ must be positive".into());
        }
        let f = Quadratic::diagonal(&[1.0, kappa]);
        let bb = bb_minimize(&f, &x0, tol, 5000, v, Safeguard::off()).map_err(|e| e.to_string())?;
        let sd = steepest_descent_baseline(&f, &x0, tol, 5000).map_err(|e| e.to_string())?;
        (bb, sd, "quadratic")
    };
    let trace = |r: &expmath::bbopt::MinimizeResult| {
        r.trace.iter().map(|t| json!({ "k": t.k, "f": t.f, "grad_norm": t.grad_norm })).collect::<Vec<_>>()
    };
    Ok(json!({
        "problem": name,
        "bb": { "iterations": bb.iterations, "converged": bb.converged, "x": bb.x, "trace": trace(&bb) },
        "steepest_descent": { "iterations": sd.iterations, "converged": sd.converged, "x": sd.x, "trace": trace(&sd) },
    })
    .to_string())
}

/// Gauss–Legendre π after `iterations` steps at `digits` digits, with the
/// error of every iterate, as JSON with decimal strings.
pub fn pi_convergence_json(iterations: u32, digits: u32) -> Result<String, String> {
    if !(1..=5000).contains(&digits) {
        return Err("digits must lie in 1..=5000".into());
    }
    let r = gauss_legendre_pi(iterations, &PrecisionContext::new(digits)).map_err(|e| e.to_string())?;
    let errors: Vec<_> = r
        .per_iteration_error
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let log10 = if e.is_zero() { None } else { Some(e.log2_abs_f64() * std::f64::consts::LOG10_2) };
            json!({ "iteration": i + 1, "error": e.to_string_digits(6.min(digits as usize)), "log10_error": log10 })
        })
        .collect();
    Ok(json!({ "value": r.value.to_string_digits(digits as usize), "iterations": r.iterations, "errors": errors }).to_string())
}

#[wasm_bindgen]
pub fn walk_svg(constant: &str, base: u32, count: usize, progress: bool) -> Result<String, JsValue> {
    walk_svg_string(constant, base, count, progress).map_err(js_err)
}

#[wasm_bindgen]
pub fn bb_trace(kappa: f64, variant: &str, x1: f64, x2: f64, tol: f64) -> Result<String, JsValue> {
    bb_trace_json(kappa, variant, x1, x2, tol).map_err(js_err)
}

#[wasm_bindgen]
pub fn pi_convergence(iterations: u32, digits: u32) -> Result<String, JsValue> {
    pi_convergence_json(iterations, digits).map_err(js_err)
}
