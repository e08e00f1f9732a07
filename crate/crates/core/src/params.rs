//! Regularization-parameter rules.
//!
//! Both a-priori rules balance the noise and approximation terms of the
//! error bound and share the exponent `2α/(α+1)`:
//!
//! ```text
//! λ = (C σ n^{-1/2} / s)^{2α/(α+1)}
//! ```
//!
//! where `s = n^{-1/2}‖x*‖_W` ([`prior_rule_w`]) or
//! `s = n^{-1/2}‖x*‖_W + σ n^{-1/2}` ([`prior_rule_rho0`]). The adaptive
//! rule ([`adaptive_select`]) iterates the first form with `σ` replaced by
//! the scaled residual and `‖x*‖_W` by `‖x_λ‖_W`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TikhError};
use crate::tikhonov::{RegularizedSolution, TikhonovSolver};

/// Smallest parameter the adaptive iteration will accept.
pub const LAMBDA_FLOOR: f64 = 1e-300;

/// Inputs of the a-priori rules.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorRuleInput {
    /// Decay exponent of the generalized eigenvalues; must exceed 1.
    pub alpha: f64,
    pub n: usize,
    pub sigma: f64,
    /// `n^{-1/2}‖x*‖_W`.
    pub x_norm_w_scaled: f64,
    pub constant_c: f64,
}

impl PriorRuleInput {
    fn validate(&self) -> Result<()> {
        let finite = [self.alpha, self.sigma, self.x_norm_w_scaled, self.constant_c]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(TikhError::NonFinite("parameter rule input"));
        }
        if self.alpha <= 1.0 {
            return Err(TikhError::Domain(format!("alpha must exceed 1, got {}", self.alpha)));
        }
        if self.n == 0 {
            return Err(TikhError::Domain("n must be positive".into()));
        }
        if self.sigma < 0.0 || self.x_norm_w_scaled < 0.0 {
            return Err(TikhError::Domain("sigma and solution norm must be nonnegative".into()));
        }
        if self.constant_c <= 0.0 {
            return Err(TikhError::Domain(format!(
                "constant must be positive, got {}",
                self.constant_c
            )));
        }
        Ok(())
    }

    fn scaled_sigma(&self) -> f64 {
        self.sigma / (self.n as f64).sqrt()
    }
}

/// The exponent `2α/(α+1)` that maps `λ^{1/2 + 1/(2α)}` back to `λ`.
pub fn rule_exponent(alpha: f64) -> f64 {
    2.0 * alpha / (alpha + 1.0)
}

/// `λ = (C σ n^{-1/2} / (n^{-1/2}‖x*‖_W))^{2α/(α+1)}`.
///
/// `σ = 0` yields `λ = 0`, which no solver accepts.
pub fn prior_rule_w(input: &PriorRuleInput) -> Result<f64> {
    input.validate()?;
    if input.x_norm_w_scaled == 0.0 {
        return Err(TikhError::ZeroSolutionNorm);
    }
    let ratio = input.constant_c * input.scaled_sigma() / input.x_norm_w_scaled;
    Ok(ratio.powf(rule_exponent(input.alpha)))
}

/// `λ = (C σ n^{-1/2} / ρ₀)^{2α/(α+1)}` with `ρ₀ = n^{-1/2}‖x*‖_W + σ n^{-1/2}`.
pub fn prior_rule_rho0(input: &PriorRuleInput) -> Result<f64> {
    input.validate()?;
    let rho0 = input.x_norm_w_scaled + input.scaled_sigma();
    if rho0 == 0.0 {
        return Err(TikhError::ZeroSolutionNorm);
    }
    let ratio = input.constant_c * input.scaled_sigma() / rho0;
    Ok(ratio.powf(rule_exponent(input.alpha)))
}

/// Which a-priori rule to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorRule {
    /// [`prior_rule_w`].
    W,
    /// [`prior_rule_rho0`].
    Rho0,
}

impl PriorRule {
    pub fn apply(self, input: &PriorRuleInput) -> Result<f64> {
        match self {
            PriorRule::W => prior_rule_w(input),
            PriorRule::Rho0 => prior_rule_rho0(input),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopMode {
    /// `|λ_k − λ_{k−1}| ≤ tol`.
    Absolute,
    /// `|λ_k − λ_{k−1}| / λ_k ≤ tol`.
    Relative,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub alpha: f64,
    pub constant_c: f64,
    pub tol: f64,
    pub stop_mode: StopMode,
    pub max_iters: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            alpha: 4.0,
            constant_c: 1.0,
            tol: 1e-10,
            stop_mode: StopMode::Absolute,
            max_iters: 100,
        }
    }
}

impl AdaptiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 1.0) {
            return Err(TikhError::Domain(format!("alpha must exceed 1, got {}", self.alpha)));
        }
        if !(self.constant_c.is_finite() && self.constant_c > 0.0) {
            return Err(TikhError::Domain(format!(
                "constant must be positive, got {}",
                self.constant_c
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(TikhError::Domain(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(TikhError::Domain("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    fn converged(&self, current: f64, previous: f64) -> bool {
        let change = (current - previous).abs();
        match self.stop_mode {
            StopMode::Absolute => change <= self.tol,
            StopMode::Relative => change / current <= self.tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIters,
    /// An update produced a parameter that was zero, below
    /// [`LAMBDA_FLOOR`], infinite or NaN.
    Nonfinite,
}

/// Iterates of the adaptive rule. Entry `k` of each vector belongs to `λ_k`.
#[derive(Clone, Debug)]
pub struct AdaptiveTrace {
    pub lambdas: Vec<f64>,
    /// `n^{-1/2}‖Ax_{λ_k} − b‖`.
    pub residuals: Vec<f64>,
    /// `n^{-1/2}‖x_{λ_k}‖_W`.
    pub w_norms: Vec<f64>,
    pub terminated: Termination,
    /// Solution at the last accepted parameter.
    pub final_solution: RegularizedSolution,
}

impl AdaptiveTrace {
    /// Number of parameter updates performed.
    pub fn iterations(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn final_lambda(&self) -> f64 {
        *self.lambdas.last().expect("trace holds lambda_0")
    }
}

/// The update map `λ ↦ (C r n^{-1/2} / w)^{2α/(α+1)}`, with `r` the scaled
/// residual and `w` the scaled W-norm of `x_λ`.
pub fn adaptive_update(cfg: &AdaptiveConfig, n: usize, scaled_residual: f64, scaled_w_norm: f64) -> f64 {
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    (cfg.constant_c * scaled_residual * inv_sqrt_n / scaled_w_norm).powf(rule_exponent(cfg.alpha))
}

/// Fixed-point parameter selection driven only by the data `b`.
///
/// Starts from `λ₀ = (n^{-1/2})^{2α/(α+1)}` and applies
/// [`adaptive_update`] until the change in `λ` passes the stopping test or
/// `max_iters` updates have been made.
pub fn adaptive_select<S: TikhonovSolver + ?Sized>(
    solver: &S,
    b: &[f64],
    cfg: &AdaptiveConfig,
) -> Result<AdaptiveTrace> {
    cfg.validate()?;
    if b.iter().any(|v| !v.is_finite()) {
        return Err(TikhError::NonFinite("data vector"));
    }
    let n = solver.n();
    let sqrt_n = (n as f64).sqrt();
    let lambda0 = (1.0 / sqrt_n).powf(rule_exponent(cfg.alpha));

    let mut sol = solver.solve(b, lambda0)?;
    let mut lambdas = vec![lambda0];
    let mut residuals = vec![sol.residual_b / sqrt_n];
    let mut w_norms = vec![sol.w_norm / sqrt_n];
    let mut previous = f64::INFINITY;

    let terminated = loop {
        let current = *lambdas.last().expect("nonempty");
        if cfg.converged(current, previous) {
            break Termination::Converged;
        }
        if lambdas.len() > cfg.max_iters {
            break Termination::MaxIters;
        }
        let w = *w_norms.last().expect("nonempty");
        if w == 0.0 {
            return Err(TikhError::DegenerateSolution { lambda: current });
        }
        let next = adaptive_update(cfg, n, *residuals.last().expect("nonempty"), w);
        if !next.is_finite() || next < LAMBDA_FLOOR {
            break Termination::Nonfinite;
        }
        sol = solver.solve(b, next)?;
        previous = current;
        lambdas.push(next);
        residuals.push(sol.residual_b / sqrt_n);
        w_norms.push(sol.w_norm / sqrt_n);
    };

    Ok(AdaptiveTrace {
        lambdas,
        residuals,
        w_norms,
        terminated,
        final_solution: sol,
    })
}
