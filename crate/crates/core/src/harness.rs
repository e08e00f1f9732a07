//! Experiment drivers: parameter sweeps, Monte Carlo rate estimation,
//! error-distribution studies and adaptive-rule tables.
//!
//! Every driver is a deterministic function of its arguments. Noise for
//! realization `rep` of cell `(n, δ)` is drawn from the stream seeded by
//! [`stream_seed`]`(master_seed, n, δ, rep)`, so results do not depend on
//! cell order or on how realizations are scheduled across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TikhError};
use crate::linalg::norm;
use crate::params::{adaptive_select, AdaptiveConfig, PriorRule, PriorRuleInput, Termination};
use crate::problems::{perturb, NoiseSpec, ProblemInstance};
use crate::rng::stream_seed;
use crate::spectral::{decompose, least_squares_line, SpectralDecomposition};
use crate::tikhonov::{error_report, SpectralSolver};

/// A problem together with its generalized eigendecomposition.
#[derive(Clone, Debug)]
pub struct PreparedProblem {
    pub instance: ProblemInstance,
    pub decomp: SpectralDecomposition,
}

impl PreparedProblem {
    pub fn new(instance: ProblemInstance) -> Result<Self> {
        let decomp = decompose(&instance)?;
        Ok(Self { instance, decomp })
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    pub fn solver(&self) -> Result<SpectralSolver<'_>> {
        SpectralSolver::new(&self.instance, &self.decomp)
    }
}

/// An a-priori rule with its exponent and constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub rule: PriorRule,
    pub alpha: f64,
    pub constant_c: f64,
}

impl RuleSpec {
    /// Evaluates the rule with the true solution norm and noise strength.
    pub fn lambda(&self, instance: &ProblemInstance, sigma: f64) -> Result<f64> {
        self.rule.apply(&PriorRuleInput {
            alpha: self.alpha,
            n: instance.n(),
            sigma,
            x_norm_w_scaled: instance.scaled_solution_norm()?,
            constant_c: self.constant_c,
        })
    }
}

/// Log-equispaced parameter grid `[lo, hi]` with `count` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl LambdaGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.lo > 0.0 && self.lo < self.hi && self.hi.is_finite()) {
            return Err(TikhError::InvalidArgument(format!(
                "grid needs 0 < lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.count < 2 {
            return Err(TikhError::InvalidArgument(format!(
                "grid needs at least 2 points, got {}",
                self.count
            )));
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let last = self.count - 1;
        Ok((0..self.count)
            .map(|i| match i {
                0 => self.lo,
                i if i == last => self.hi,
                i => (a + (b - a) * i as f64 / last as f64).exp(),
            })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub lambdas: Vec<f64>,
    /// `n^{-1/2}‖Ax_λ − Ax*‖` at each grid point.
    pub output_errors: Vec<f64>,
    pub sigma: f64,
    /// Rule prediction; absent when `σ = 0`.
    pub lambda_pred: Option<f64>,
    pub err_at_pred: Option<f64>,
    pub err_min: f64,
    pub argmin_lambda: f64,
    pub argmin_index: usize,
}

/// Solves on a log grid for one noise draw and compares the error curve
/// with the rule's prediction.
pub fn run_sweep(prep: &PreparedProblem, noise: NoiseSpec, grid: LambdaGrid, rule: RuleSpec) -> Result<SweepResult> {
    let lambdas = grid.values()?;
    let inst = &prep.instance;
    let data = perturb(&inst.y, noise.delta, noise.seed)?;
    let solver = prep.solver()?;
    let g = solver.project(&data.b)?;
    let sqrt_n = (inst.n() as f64).sqrt();
    let output_errors: Vec<f64> = lambdas
        .iter()
        .map(|&l| solver.output_errors(&g, l).0 / sqrt_n)
        .collect();
    let (argmin_index, err_min) = output_errors
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, e)| if e < best.1 { (i, e) } else { best });
    let (lambda_pred, err_at_pred) = if data.sigma > 0.0 {
        let lp = rule.lambda(inst, data.sigma)?;
        if !(lp > 0.0 && lp.is_finite()) {
            return Err(TikhError::NonFiniteLambda(lp));
        }
        (Some(lp), Some(solver.output_errors(&g, lp).0 / sqrt_n))
    } else {
        (None, None)
    };
    Ok(SweepResult {
        argmin_lambda: lambdas[argmin_index],
        lambdas,
        output_errors,
        sigma: data.sigma,
        lambda_pred,
        err_at_pred,
        err_min,
        argmin_index,
    })
}

/// Sample means for one `(n, δ)` pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McCell {
    pub n: usize,
    pub delta: f64,
    pub sigma: f64,
    pub lambda: f64,
    /// Mean of `n^{-1/2}‖Ax_λ − Ax*‖`.
    pub mean_scaled_output: f64,
    /// Mean of `n^{-1/2}‖B(x_λ − x*)‖`.
    pub mean_scaled_b: f64,
    /// Root mean square of `n^{-1/2}‖B(x_λ − x*)‖`; never below the mean.
    pub rms_scaled_b: f64,
    pub reps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub cells: Vec<McCell>,
    /// Slope of `log mean_scaled_output` against `log λ`, pooled over cells.
    pub slope_output: f64,
    pub slope_b: f64,
    pub intercept_output: f64,
    pub intercept_b: f64,
}

fn par_collect<T: Send>(count: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Estimates `E[n^{-1/2}‖Ax_λ − Ax*‖]` and `E[n^{-1/2}‖B(x_λ − x*)‖]` by
/// plain sample means over `reps` realizations per cell, with `λ` from the
/// a-priori rule, then fits both against `λ` on log-log axes in a single
/// pooled regression.
pub fn run_montecarlo(
    problems: &[PreparedProblem],
    deltas: &[f64],
    reps: usize,
    rule: RuleSpec,
    master_seed: u64,
) -> Result<MonteCarloSummary> {
    if reps < 2 {
        return Err(TikhError::InvalidArgument(format!("need at least 2 realizations, got {reps}")));
    }
    if problems.is_empty() || deltas.is_empty() {
        return Err(TikhError::InvalidArgument("need at least one size and one noise level".into()));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(TikhError::InvalidArgument(format!("noise levels must be positive, got {d}")));
    }
    let mut cells = Vec::with_capacity(problems.len() * deltas.len());
    for prep in problems {
        let inst = &prep.instance;
        let n = inst.n();
        let sqrt_n = (n as f64).sqrt();
        let solver = prep.solver()?;
        for &delta in deltas {
            let sigma = crate::problems::noise_strength(&inst.y, delta);
            let lambda = rule.lambda(inst, sigma)?;
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(TikhError::NonFiniteLambda(lambda));
            }
            let samples = par_collect(reps, |rep| {
                let data = perturb(&inst.y, delta, stream_seed(master_seed, n, delta, rep as u64))?;
                let g = solver.project(&data.b)?;
                let (out, b_sq) = solver.output_errors(&g, lambda);
                Ok((out / sqrt_n, b_sq.sqrt() / sqrt_n))
            })?;
            let count = reps as f64;
            let mean_out = samples.iter().map(|s| s.0).sum::<f64>() / count;
            let mean_b = samples.iter().map(|s| s.1).sum::<f64>() / count;
            let rms_b = (samples.iter().map(|s| s.1 * s.1).sum::<f64>() / count).sqrt();
            cells.push(McCell {
                n,
                delta,
                sigma,
                lambda,
                mean_scaled_output: mean_out,
                mean_scaled_b: mean_b,
                rms_scaled_b: rms_b,
                reps,
            });
        }
    }
    let log_l: Vec<f64> = cells.iter().map(|c| c.lambda.ln()).collect();
    let log_out: Vec<f64> = cells.iter().map(|c| c.mean_scaled_output.ln()).collect();
    let log_b: Vec<f64> = cells.iter().map(|c| c.mean_scaled_b.ln()).collect();
    let (slope_output, intercept_output, _) = least_squares_line(&log_l, &log_out);
    let (slope_b, intercept_b, _) = least_squares_line(&log_l, &log_b);
    Ok(MonteCarloSummary {
        cells,
        slope_output,
        slope_b,
        intercept_output,
        intercept_b,
    })
}

/// Equal-width histogram over `[min, max]`; the last bin is closed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(samples: &[f64], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(TikhError::InvalidArgument("histogram needs at least one bin".into()));
        }
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi.is_nan() || hi <= lo {
            return Err(TikhError::DegenerateSample);
        }
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins)
            .map(|i| if i == bins { hi } else { lo + width * i as f64 })
            .collect();
        let mut counts = vec![0usize; bins];
        for &s in samples {
            let idx = (((s - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Ok(Self { edges, counts })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Index of the fullest bin (first one on ties).
    pub fn mode_index(&self) -> usize {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        self.counts.iter().position(|&c| c == max).unwrap_or(0)
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    /// Whether counts rise to the mode and fall after it, ignoring
    /// departures that are within `z` Poisson standard deviations: a bin
    /// `c` breaks monotonicity only if it differs from the running extreme
    /// `r` in the wrong direction by more than `z·sqrt(c + r)`.
    pub fn is_unimodal(&self, z: f64) -> bool {
        let mode = self.mode_index();
        let significant = |hi: usize, lo: usize| (hi - lo) as f64 > z * ((hi + lo) as f64).sqrt();
        let rising = |side: &mut dyn Iterator<Item = usize>| {
            let mut run_max = 0usize;
            for c in side {
                if c < run_max && significant(run_max, c) {
                    return false;
                }
                run_max = run_max.max(c);
            }
            true
        };
        rising(&mut self.counts[..=mode].iter().copied()) && rising(&mut self.counts[mode..].iter().rev().copied())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStudy {
    pub lambda: f64,
    /// Scaled output errors in realization order.
    pub samples: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
    pub histogram: Histogram,
    /// `(standard normal quantile, sorted standardized sample)`.
    pub qq_pairs: Vec<(f64, f64)>,
    pub qq_correlation: f64,
}

pub const DEFAULT_BINS: usize = 50;

/// Records `n^{-1/2}‖Ax_λ − Ax*‖` over `reps` independent noise draws at a
/// fixed `λ`, with histogram and normal QQ diagnostics. QQ positions are
/// `(i − 0.5)/reps`.
pub fn run_sample_study(
    prep: &PreparedProblem,
    delta: f64,
    lambda: f64,
    reps: usize,
    master_seed: u64,
    bins: usize,
) -> Result<SampleStudy> {
    if reps < 100 {
        return Err(TikhError::InvalidArgument(format!("need at least 100 realizations, got {reps}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(TikhError::NonFiniteLambda(lambda));
    }
    let inst = &prep.instance;
    let n = inst.n();
    let sqrt_n = (n as f64).sqrt();
    let solver = prep.solver()?;
    let samples = par_collect(reps, |rep| {
        let data = perturb(&inst.y, delta, stream_seed(master_seed, n, delta, rep as u64))?;
        let g = solver.project(&data.b)?;
        Ok(solver.output_errors(&g, lambda).0 / sqrt_n)
    })?;
    let count = reps as f64;
    let mean = samples.iter().sum::<f64>() / count;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (count - 1.0);
    let std_dev = var.sqrt();
    if std_dev.is_nan() || std_dev <= 1e-14 * mean.abs() {
        return Err(TikhError::DegenerateSample);
    }
    let histogram = Histogram::new(&samples, bins)?;
    let mut standardized: Vec<f64> = samples.iter().map(|s| (s - mean) / std_dev).collect();
    standardized.sort_by(f64::total_cmp);
    let qq_pairs: Vec<(f64, f64)> = standardized
        .iter()
        .enumerate()
        .map(|(i, &z)| (inverse_normal_cdf((i as f64 + 0.5) / count), z))
        .collect();
    let qq_correlation = pearson(&qq_pairs);
    Ok(SampleStudy {
        lambda,
        samples,
        mean,
        std_dev,
        histogram,
        qq_pairs,
        qq_correlation,
    })
}

fn pearson(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pairs.iter().map(|p| (p.1 - my).powi(2)).sum();
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Standard normal quantile by Acklam's rational approximation (relative
/// error below 1.2e-9 on (0, 1)).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - P_LOW {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// One row of the adaptive-rule table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct TableRow {
    pub delta: f64,
    pub n: usize,
    pub sigma: f64,
    pub lambda_final: f64,
    pub iters: usize,
    pub rel_x: f64,
    pub rel_Ax: f64,
    pub rel_res: f64,
    pub terminated: Termination,
}

/// For each `(δ, n)`, δ-major: one noise draw (stream `rep = 0`), the
/// adaptive rule, and the relative errors of its final solution.
pub fn run_table(
    problems: &[PreparedProblem],
    deltas: &[f64],
    cfg: &AdaptiveConfig,
    master_seed: u64,
) -> Result<Vec<TableRow>> {
    cfg.validate()?;
    let solvers = problems.iter().map(PreparedProblem::solver).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(deltas.len() * problems.len());
    for &delta in deltas {
        for (prep, solver) in problems.iter().zip(&solvers) {
            let inst = &prep.instance;
            let n = inst.n();
            let data = perturb(&inst.y, delta, stream_seed(master_seed, n, delta, 0))?;
            let trace = adaptive_select(solver, &data.b, cfg)?;
            let report = error_report(inst, None, &trace.final_solution, &data.b)?;
            rows.push(TableRow {
                delta,
                n,
                sigma: data.sigma,
                lambda_final: trace.final_lambda(),
                iters: trace.iterations(),
                rel_x: report.rel_x,
                rel_Ax: report.rel_Ax,
                rel_res: report.rel_res,
                terminated: trace.terminated,
            });
        }
    }
    Ok(rows)
}

/// Noise draw used by single-realization drivers for cell `(n, δ)`.
pub fn cell_noise(master_seed: u64, instance: &ProblemInstance, delta: f64) -> NoiseSpec {
    NoiseSpec {
        delta,
        seed: stream_seed(master_seed, instance.n(), delta, 0),
    }
}

/// `‖v‖/√n`.
pub fn scaled_norm(v: &[f64]) -> f64 {
    norm(v) / (v.len() as f64).sqrt()
}

/// Runs the adaptive rule through the prepared eigenbasis.
pub fn adaptive_on_prepared(
    prep: &PreparedProblem,
    b: &[f64],
    cfg: &AdaptiveConfig,
) -> Result<crate::params::AdaptiveTrace> {
    adaptive_select(&prep.solver()?, b, cfg)
}
