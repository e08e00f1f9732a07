//! One function per subcommand. Each validates, computes, and only then
//! writes its files, so a failed run leaves no partial output directory.

use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use tikhreg::export;
use tikhreg::harness::{
    adaptive_on_prepared, cell_noise, run_montecarlo, run_sample_study, run_sweep, run_table, LambdaGrid,
    PreparedProblem, RuleSpec,
};
use tikhreg::params::AdaptiveConfig;
use tikhreg::problems::{add_noise, build_blur, build_fredholm, noise_strength, ProblemInstance};
use tikhreg::spectral::{decompose, fit_alpha};
use tikhreg::tikhonov::{error_report, DirectSolver, SpectralSolver, TikhonovSolver};
use tikhreg::{probfile, TikhError};

use crate::cli::*;
use crate::output::Output;

pub enum Failure {
    Usage(String),
    Runtime(TikhError),
}

impl From<TikhError> for Failure {
    fn from(e: TikhError) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome = Result<String, Failure>;

/// Runs `command`, writing into `out`; `manifest` already holds the
/// invocation and is extended with resolved values.
pub fn dispatch(command: &Command, mut out: Output, mut manifest: Value) -> Outcome {
    let summary = match command {
        Command::Generate(a) => generate(a, &mut out, &mut manifest),
        Command::Spectrum(a) => spectrum(a, &mut out, &mut manifest),
        Command::Solve(a) => solve(a, &mut out, &mut manifest),
        Command::Sweep(a) => sweep(a, &mut out, &mut manifest),
        Command::Adaptive(a) => adaptive(a, &mut out, &mut manifest),
        Command::Montecarlo(a) => montecarlo(a, &mut out, &mut manifest),
        Command::Study(a) => study(a, &mut out, &mut manifest),
        Command::Table(a) => table(a, &mut out, &mut manifest),
    }?;
    let dir = out.finish(manifest)?;
    Ok(format!("{summary} -> {}", dir.display()))
}

fn build(p: &ProblemArgs) -> tikhreg::Result<ProblemInstance> {
    match p.problem {
        ProblemKind::Fredholm => build_fredholm(p.n),
        ProblemKind::Blur => build_blur(p.side, p.psf_width),
    }
}

fn load(s: &SourceArgs, manifest: &mut Value) -> tikhreg::Result<ProblemInstance> {
    let inst = match &s.input {
        Some(path) => probfile::load(path)?,
        None => build(&s.problem)?,
    };
    manifest["resolved"]["label"] = json!(inst.label);
    manifest["resolved"]["n"] = json!(inst.n());
    Ok(inst)
}

fn prepare(s: &SourceArgs, manifest: &mut Value) -> tikhreg::Result<PreparedProblem> {
    PreparedProblem::new(load(s, manifest)?)
}

fn rule_spec(r: &RuleArgs) -> RuleSpec {
    RuleSpec {
        rule: r.rule.into(),
        alpha: r.alpha,
        constant_c: r.constant_c,
    }
}

fn adaptive_config(it: &IterationArgs) -> AdaptiveConfig {
    AdaptiveConfig {
        alpha: it.alpha,
        constant_c: it.constant_c,
        tol: it.tol,
        stop_mode: it.stop.into(),
        max_iters: it.max_iters,
    }
}

/// Decomposes every member of a problem family; sizes default per command.
fn family(f: &FamilyArgs, default_ns: &[usize], default_sides: &[usize], manifest: &mut Value) -> Result<Vec<PreparedProblem>, Failure> {
    let sizes: Vec<usize> = match f.problem {
        ProblemKind::Fredholm if f.ns.is_empty() => default_ns.to_vec(),
        ProblemKind::Fredholm => f.ns.clone(),
        ProblemKind::Blur if f.sides.is_empty() => default_sides.to_vec(),
        ProblemKind::Blur => f.sides.clone(),
    };
    let unused = match f.problem {
        ProblemKind::Fredholm => ("--sides", &f.sides),
        ProblemKind::Blur => ("--ns", &f.ns),
    };
    if !unused.1.is_empty() {
        return Err(Failure::Usage(format!("{} does not apply to --problem {:?}", unused.0, f.problem).to_lowercase()));
    }
    manifest["resolved"]["sizes"] = json!(sizes);
    let problems = sizes
        .par_iter()
        .map(|&s| {
            PreparedProblem::new(match f.problem {
                ProblemKind::Fredholm => build_fredholm(s)?,
                ProblemKind::Blur => build_blur(s, f.psf_width)?,
            })
        })
        .collect::<tikhreg::Result<Vec<_>>>()?;
    Ok(problems)
}

fn deltas_or(f: &FamilyArgs, default: &[f64], manifest: &mut Value) -> Vec<f64> {
    let d = if f.deltas.is_empty() { default.to_vec() } else { f.deltas.clone() };
    manifest["resolved"]["deltas"] = json!(d);
    d
}

fn generate(a: &GenerateArgs, out: &mut Output, manifest: &mut Value) -> Outcome {
    let inst = build(&a.problem)?;
    manifest["resolved"]["label"] = json!(inst.label);
    manifest["resolved"]["n"] = json!(inst.n());
    out.write("problem.prob", |w| probfile::write_problem(w, &inst))?;
    Ok(format!("generate: {} (n = {})", inst.label, inst.n()))
}

fn spectrum(a: &SpectrumArgs, out: &mut Output, manifest: &mut Value) -> Outcome {
    let inst = load(&a.source, manifest)?;
    let d = decompose(&inst)?;
    let fit = fit_alpha(&d)?;
    out.write("spectrum.csv", |w| export::write_spectrum_csv(w, &d, Some(&fit)))?;
    out.json("spectrum.json", &export::spectrum_sidecar(&d, &fit))?;
    Ok(format!(
        "spectrum: {} m = {} alpha_hat = {:.4} c_upper = {:.4e}",
        inst.label, d.m, fit.alpha_hat, fit.c_upper
    ))
}

fn solve(a: &SolveArgs, out: &mut Output, manifest: &mut Value) -> Outcome {
    let inst = load(&a.source, manifest)?;
    let noise = cell_noise(a.noise.seed, &inst, a.noise.delta);
    let data = add_noise(&inst, noise)?;
    let lambda = match a.lambda {
        Some(l) => l,
        None => rule_spec(&a.rule).lambda(&inst, data.sigma)?,
    };
    manifest["resolved"]["noise_seed"] = json!(noise.seed);
    manifest["resolved"]["lambda"] = json!(lambda);
    let (sol, report) = match a.solver {
        SolverArg::Direct => {
            let sol = DirectSolver::new(&inst).solve(&data.b, lambda)?;
            let report = error_report(&inst, None, &sol, &data.b)?;
            (sol, report)
        }
        SolverArg::Spectral => {
            let d = decompose(&inst)?;
            let sol = SpectralSolver::new(&inst, &d)?.solve(&data.b, lambda)?;
            let report = error_report(&inst, Some(&d), &sol, &data.b)?;
            (sol, report)
        }
    };
    out.write("solution.csv", |w| {
        use std::io::Write;
        writeln!(w, "index,x,x_star")?;
        for (i, (x, s)) in sol.x.iter().zip(&inst.x_star).enumerate() {
            writeln!(w, "{i},{},{}", export::fmt_real(*x), export::fmt_real(*s))?;
        }
        Ok(())
    })?;
    out.json(
        "solve.json",
        &json!({
            "lambda": lambda,
            "sigma": data.sigma,
            "residual": sol.residual_b,
            "w_norm": sol.w_norm,
            "errors": report,
        }),
    )?;
    Ok(format!(
        "solve: {} lambda = {:.4e} rel_x = {:.4e} rel_res = {:.4e}",
        inst.label, lambda, report.rel_x, report.rel_res
    ))
}

fn sweep(a: &SweepArgs, out: &mut Output, manifest: &mut Value) -> Outcome {
    if a.lo >= a.hi {
        return Err(Failure::Usage(format!("--lo ({}) must be below --hi ({})", a.lo, a.hi)));
    }
    let prep = prepare(&a.source, manifest)?;
    let noise = cell_noise(a.noise.seed, &prep.instance, a.noise.delta);
    manifest["resolved"]["noise_seed"] = json!(noise.seed);
    let grid = LambdaGrid { lo: a.lo, hi: a.hi, count: a.count };
    let s = run_sweep(&prep, noise, grid, rule_spec(&a.rule))?;
    out.write("sweep.csv", |w| export::write_sweep_csv(w, &s))?;
    out.json(
        "sweep.json",
        &json!({
            "sigma": s.sigma,
            "lambda_pred": s.lambda_pred,
            "err_at_pred": s.err_at_pred,
            "err_min": s.err_min,
            "argmin_lambda": s.argmin_lambda,
            "argmin_index": s.argmin_index,
            "argmin_interior": s.argmin_index > 0 && s.argmin_index + 1 < s.lambdas.len(),
        }),
    )?;
    let pred = s.lambda_pred.map_or("none".to_string(), |l| format!("{l:.4e}"));
    Ok(format!(
        "sweep: {} argmin = {:.4e} err_min = {:.4e} lambda_pred = {pred}",
        prep.instance.label, s.argmin_lambda, s.err_min
    ))
}

fn adaptive(a: &AdaptiveArgs, out: &mut Output, manifest: &mut Value) -> Outcome {
    let prep = prepare(&a.source, manifest)?;
    let noise = cell_noise(a.noise.seed, &prep.instance, a.noise.delta);
    manifest["resolved"]["noise_seed"] = json!(noise.seed);
    let data = add_noise(&prep.instance, noise)?;
    let cfg = adaptive_config(&a.iteration);
    let trace = adaptive_on_prepared(&prep, &data.b, &cfg)?;
    let report = error_report(&prep.instance, Some(&prep.decomp), &trace.final_solution, &data.b)?;
    out.write("trace.csv", |w| export::write_trace_csv(w, &trace))?;
    out.json(
        "adaptive.json",
        &json!({
            "sigma": data.sigma,
            "lambda_final": trace.final_lambda(),
            "iters": trace.iterations(),
            "terminated": trace.terminated,
            "errors": report,
        }),
    )?;
    Ok(format!(
        "adaptive: {} lambda = {:.4e} after {} iterations ({:?}) rel_x = {:.4e}",
        prep.instance.label,
        trace.final_lambda(),
        trace.iterations(),
        trace.terminated,
        report.rel_x
    ))
}

fn montecarlo(a: &MonteCarloArgs, out: &mut Output, manifest: &mut Value) -> Outcome {
    let deltas = deltas_or(&a.family, &[1e-1, 1e-2, 1e-3, 1e-4], manifest);
    let problems = family(&a.family, &[500, 1000, 2000], &[16, 24, 32], manifest)?;
    let summary = run_montecarlo(&problems, &deltas, a.reps, rule_spec(&a.rule), a.family.seed)?;
    out.write("mc_cells.csv", |w| export::write_mc_cells_csv(w, &summary))?;
    out.json("mc_fit.json", &export::mc_fit_json(&summary))?;
    Ok(format!(
        "montecarlo: {} cells slope_output = {:.4} slope_b = {:.4}",
        summary.cells.len(),
        summary.slope_output,
        summary.slope_b
    ))
}

fn study(a: &StudyArgs, out: &mut Output, manifest: &mut Value) -> Outcome {
    let prep = prepare(&a.source, manifest)?;
    let lambda = match a.lambda {
        Some(l) => l,
        None => {
            let sigma = noise_strength(&prep.instance.y, a.noise.delta);
            rule_spec(&a.rule).lambda(&prep.instance, sigma)?
        }
    };
    manifest["resolved"]["lambda"] = json!(lambda);
    let s = run_sample_study(&prep, a.noise.delta, lambda, a.reps, a.noise.seed, a.bins)?;
    out.write("study_hist.csv", |w| export::write_hist_csv(w, &s))?;
    out.write("study_qq.csv", |w| export::write_qq_csv(w, &s))?;
    out.json(
        "study.json",
        &json!({
            "lambda": s.lambda,
            "reps": s.samples.len(),
            "mean": s.mean,
            "std_dev": s.std_dev,
            "qq_correlation": s.qq_correlation,
            "mode_center": s.histogram.bin_center(s.histogram.mode_index()),
        }),
    )?;
    Ok(format!(
        "study: {} lambda = {:.4e} mean = {:.4e} std = {:.4e} qq_r = {:.5}",
        prep.instance.label, lambda, s.mean, s.std_dev, s.qq_correlation
    ))
}

fn table(a: &TableArgs, out: &mut Output, manifest: &mut Value) -> Outcome {
    let deltas = deltas_or(&a.family, &[1e-1, 1e-2, 1e-3], manifest);
    let problems = family(&a.family, &[1000, 2000], &[24, 32], manifest)?;
    let rows = run_table(&problems, &deltas, &adaptive_config(&a.iteration), a.family.seed)?;
    out.write("table1.csv", |w| export::write_table_csv(w, &rows))?;
    Ok(format!("table: {} rows", rows.len()))
}

/// Validates `--input` early so a missing file is reported before work.
pub fn check_paths(command: &Command) -> Result<(), Failure> {
    let input: Option<&Path> = match command {
        Command::Spectrum(a) => a.source.input.as_deref(),
        Command::Solve(a) => a.source.input.as_deref(),
        Command::Sweep(a) => a.source.input.as_deref(),
        Command::Adaptive(a) => a.source.input.as_deref(),
        Command::Study(a) => a.source.input.as_deref(),
        _ => None,
    };
    match input {
        Some(p) if !p.is_file() => Err(Failure::Usage(format!("--input {} is not a readable file", p.display()))),
        _ => Ok(()),
    }
}
