//! CSV and JSON writers for experiment outputs.
//!
//! Reals are written in scientific notation with 17 significant digits,
//! which round-trips every `f64` exactly.

use std::io::Write;

use serde::Serialize;
use serde_json::json;

use crate::error::Result;
use crate::harness::{MonteCarloSummary, SampleStudy, SweepResult, TableRow};
use crate::params::{AdaptiveTrace, Termination};
use crate::spectral::{AlphaFit, SpectralDecomposition};

/// Formats a real with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Converged => "converged",
        Termination::MaxIters => "max_iters",
        Termination::Nonfinite => "nonfinite",
    }
}

/// `k,rho,envelope` over all retained modes (1-based `k`).
pub fn write_spectrum_csv<W: Write>(mut out: W, decomp: &SpectralDecomposition, fit: Option<&AlphaFit>) -> Result<()> {
    writeln!(out, "k,rho,envelope")?;
    for (i, &rho) in decomp.retained().iter().enumerate() {
        let env = fit.map_or(String::new(), |f| fmt_real(f.envelope(i + 1)));
        writeln!(out, "{},{},{}", i + 1, fmt_real(rho), env)?;
    }
    Ok(())
}

/// Sidecar of the decay fit.
pub fn spectrum_sidecar(decomp: &SpectralDecomposition, fit: &AlphaFit) -> serde_json::Value {
    json!({
        "n": decomp.n,
        "m": decomp.m,
        "alpha_hat": fit.alpha_hat,
        "log_c": fit.log_c,
        "c_upper": fit.c_upper,
        "fit_range": [fit.fit_range.0, fit.fit_range.1],
        "residual_rms": fit.residual_rms,
    })
}

/// `lambda,error` per grid point.
pub fn write_sweep_csv<W: Write>(mut out: W, sweep: &SweepResult) -> Result<()> {
    writeln!(out, "lambda,error")?;
    for (l, e) in sweep.lambdas.iter().zip(&sweep.output_errors) {
        writeln!(out, "{},{}", fmt_real(*l), fmt_real(*e))?;
    }
    Ok(())
}

/// `n,delta,lambda,mean_out,mean_b,reps` per cell.
pub fn write_mc_cells_csv<W: Write>(mut out: W, summary: &MonteCarloSummary) -> Result<()> {
    writeln!(out, "n,delta,lambda,mean_out,mean_b,reps")?;
    for c in &summary.cells {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            c.n,
            fmt_real(c.delta),
            fmt_real(c.lambda),
            fmt_real(c.mean_scaled_output),
            fmt_real(c.mean_scaled_b),
            c.reps
        )?;
    }
    Ok(())
}

pub fn mc_fit_json(summary: &MonteCarloSummary) -> serde_json::Value {
    json!({
        "slope_output": summary.slope_output,
        "slope_b": summary.slope_b,
        "intercept_output": summary.intercept_output,
        "intercept_b": summary.intercept_b,
        "cells": summary.cells.len(),
    })
}

/// `bin_lo,bin_hi,count`.
pub fn write_hist_csv<W: Write>(mut out: W, study: &SampleStudy) -> Result<()> {
    writeln!(out, "bin_lo,bin_hi,count")?;
    let h = &study.histogram;
    for (i, c) in h.counts.iter().enumerate() {
        writeln!(out, "{},{},{}", fmt_real(h.edges[i]), fmt_real(h.edges[i + 1]), c)?;
    }
    Ok(())
}

/// `normal_quantile,sample_quantile`.
pub fn write_qq_csv<W: Write>(mut out: W, study: &SampleStudy) -> Result<()> {
    writeln!(out, "normal_quantile,sample_quantile")?;
    for (q, s) in &study.qq_pairs {
        writeln!(out, "{},{}", fmt_real(*q), fmt_real(*s))?;
    }
    Ok(())
}

/// `delta,n,sigma,lambda_final,iters,rel_x,rel_Ax,rel_res,terminated`.
pub fn write_table_csv<W: Write>(mut out: W, rows: &[TableRow]) -> Result<()> {
    writeln!(out, "delta,n,sigma,lambda_final,iters,rel_x,rel_Ax,rel_res,terminated")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_real(r.delta),
            r.n,
            fmt_real(r.sigma),
            fmt_real(r.lambda_final),
            r.iters,
            fmt_real(r.rel_x),
            fmt_real(r.rel_Ax),
            fmt_real(r.rel_res),
            termination_name(r.terminated)
        )?;
    }
    Ok(())
}

/// `k,lambda,scaled_residual,scaled_wnorm`.
pub fn write_trace_csv<W: Write>(mut out: W, trace: &AdaptiveTrace) -> Result<()> {
    writeln!(out, "k,lambda,scaled_residual,scaled_wnorm")?;
    for (k, ((l, r), w)) in trace.lambdas.iter().zip(&trace.residuals).zip(&trace.w_norms).enumerate() {
        writeln!(out, "{},{},{},{}", k, fmt_real(*l), fmt_real(*r), fmt_real(*w))?;
    }
    Ok(())
}

/// `index,x` for a solution vector.
pub fn write_vector_csv<W: Write>(mut out: W, header: &str, v: &[f64]) -> Result<()> {
    writeln!(out, "index,{header}")?;
    for (i, x) in v.iter().enumerate() {
        writeln!(out, "{},{}", i, fmt_real(*x))?;
    }
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip_with_17_digits() {
        for v in [0.1, 1.0 / 3.0, 4.7117e-4, -2.5e-300, 123456789.12345679] {
            let s = fmt_real(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
    }
}
