//! Browser bindings for three interactive views of a Fredholm test
//! problem: the generalized spectrum with its power-law fit, the output
//! error over a λ grid against the a-priori rule, and the adaptive rule's
//! iterates. Each export returns a JSON string for the page to plot.
//!
//! The eigendecomposition of the last requested size is cached, so moving
//! the noise or rule controls does not redo the O(n³) work.

use std::cell::RefCell;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use tikhreg::harness::{adaptive_on_prepared, cell_noise, run_sweep, LambdaGrid, PreparedProblem, RuleSpec};
use tikhreg::params::{AdaptiveConfig, PriorRule, StopMode};
use tikhreg::problems::{add_noise, build_fredholm};
use tikhreg::spectral::fit_alpha;
use tikhreg::tikhonov::error_report;
use tikhreg::{Result, TikhError};

/// Largest size offered in the browser; decomposition is cubic.
pub const MAX_N: usize = 600;

thread_local! {
    static CACHE: RefCell<Option<PreparedProblem>> = const { RefCell::new(None) };
}

fn with_problem<T>(n: usize, f: impl FnOnce(&PreparedProblem) -> Result<T>) -> Result<T> {
    if !(20..=MAX_N).contains(&n) {
        return Err(TikhError::InvalidArgument(format!("n must lie in [20, {MAX_N}], got {n}")));
    }
    CACHE.with(|cell| {
        let mut slot = cell.borrow_mut();
        if slot.as_ref().map(PreparedProblem::n) != Some(n) {
            *slot = Some(PreparedProblem::new(build_fredholm(n)?)?);
        }
        f(slot.as_ref().expect("filled above"))
    })
}

/// Retained eigenvalues, fitted envelope and fit summary.
pub fn spectrum_view(n: usize) -> Result<Value> {
    with_problem(n, |prep| {
        let d = &prep.decomp;
        let fit = fit_alpha(d)?;
        let envelope: Vec<f64> = (1..=d.m).map(|k| fit.envelope(k)).collect();
        Ok(json!({
            "rho": d.retained(),
            "envelope": envelope,
            "alpha_hat": fit.alpha_hat,
            "c_upper": fit.c_upper,
            "fit_range": [fit.fit_range.0, fit.fit_range.1],
        }))
    })
}

/// Scaled output error on a log grid, with the rule's λ and its error.
pub fn sweep_view(n: usize, delta: f64, seed: u64, alpha: f64, constant_c: f64) -> Result<Value> {
    with_problem(n, |prep| {
        let rule = RuleSpec {
            rule: PriorRule::Rho0,
            alpha,
            constant_c,
        };
        let grid = LambdaGrid { lo: 1e-14, hi: 1e-1, count: 60 };
        let s = run_sweep(prep, cell_noise(seed, &prep.instance, delta), grid, rule)?;
        Ok(json!({
            "lambdas": s.lambdas,
            "errors": s.output_errors,
            "lambda_pred": s.lambda_pred,
            "err_at_pred": s.err_at_pred,
            "argmin_lambda": s.argmin_lambda,
            "err_min": s.err_min,
        }))
    })
}

/// Iterates of the adaptive rule and the final reconstruction.
pub fn adaptive_view(n: usize, delta: f64, seed: u64, alpha: f64, constant_c: f64, relative: bool) -> Result<Value> {
    with_problem(n, |prep| {
        let cfg = AdaptiveConfig {
            alpha,
            constant_c,
            tol: if relative { 1e-3 } else { 1e-10 },
            stop_mode: if relative { StopMode::Relative } else { StopMode::Absolute },
            max_iters: 100,
        };
        let data = add_noise(&prep.instance, cell_noise(seed, &prep.instance, delta))?;
        let trace = adaptive_on_prepared(prep, &data.b, &cfg)?;
        let report = error_report(&prep.instance, Some(&prep.decomp), &trace.final_solution, &data.b)?;
        Ok(json!({
            "lambdas": trace.lambdas,
            "residuals": trace.residuals,
            "terminated": trace.terminated,
            "x": trace.final_solution.x,
            "x_star": prep.instance.x_star,
            "rel_x": report.rel_x,
            "rel_res": report.rel_res,
        }))
    })
}

fn to_js(v: Result<Value>) -> std::result::Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn spectrum(n: usize) -> std::result::Result<String, JsValue> {
    to_js(spectrum_view(n))
}

#[wasm_bindgen]
pub fn sweep(n: usize, delta: f64, seed: u32, alpha: f64, constant_c: f64) -> std::result::Result<String, JsValue> {
    to_js(sweep_view(n, delta, seed.into(), alpha, constant_c))
}

#[wasm_bindgen]
pub fn adaptive(
    n: usize,
    delta: f64,
    seed: u32,
    alpha: f64,
    constant_c: f64,
    relative: bool,
) -> std::result::Result<String, JsValue> {
    to_js(adaptive_view(n, delta, seed.into(), alpha, constant_c, relative))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_view_reports_fourth_power_decay() {
        let v = spectrum_view(200).unwrap();
        let alpha = v["alpha_hat"].as_f64().unwrap();
        assert!((3.7..4.3).contains(&alpha), "{alpha}");
        assert_eq!(v["rho"].as_array().unwrap().len(), v["envelope"].as_array().unwrap().len());
    }

    #[test]
    fn sweep_view_has_prediction_only_with_noise() {
        let noisy = sweep_view(100, 0.01, 1, 4.0, 1.0).unwrap();
        assert!(noisy["lambda_pred"].as_f64().unwrap() > 0.0);
        assert_eq!(noisy["errors"].as_array().unwrap().len(), 60);
        let clean = sweep_view(100, 0.0, 1, 4.0, 1.0).unwrap();
        assert!(clean["lambda_pred"].is_null());
    }

    #[test]
    fn adaptive_view_matches_library_trace() {
        let v = adaptive_view(120, 0.05, 3, 2.0, 1.0, false).unwrap();
        assert_eq!(v["terminated"], "converged");
        let lambdas = v["lambdas"].as_array().unwrap();
        assert_eq!(lambdas.len(), v["residuals"].as_array().unwrap().len());
        assert_eq!(v["x"].as_array().unwrap().len(), 120);
    }

    #[test]
    fn sizes_outside_the_browser_budget_are_refused() {
        assert!(spectrum_view(MAX_N + 1).is_err());
        assert!(spectrum_view(10).is_err());
    }
}
