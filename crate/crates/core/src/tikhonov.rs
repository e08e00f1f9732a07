//! Weighted Tikhonov solutions `x_λ = argmin ‖Ax − b‖² + λ‖x‖²_W`.
//!
//! Two independent routes are provided. [`DirectSolver`] factors the normal
//! equations `(AᵀA + λW) x = Aᵀb` by Cholesky. [`SpectralSolver`] expands in
//! the generalized eigenbasis, where the minimizer is
//! `x_λ = Σ_k (b, Aψ_k)/(λ + ρ_k) ψ_k`. The normal matrix has condition
//! number at most `(ρ₁ + λ)/λ` relative to `W`, so the direct route loses
//! accuracy for very small `λ`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TikhError};
use crate::linalg::{axpy, check_len, dot, norm, w_norm, Cholesky, DenseMatrix, WeightSpec};
use crate::problems::ProblemInstance;
use crate::spectral::{b_seminorm_sq, SpectralDecomposition};

/// A regularized solution and the norms the parameter rules consume.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularizedSolution {
    pub lambda: f64,
    pub x: Vec<f64>,
    /// `‖Ax_λ − b‖`.
    pub residual_b: f64,
    /// `‖Ax_λ − Ax*‖`.
    pub output_err: Option<f64>,
    /// `‖x_λ‖_W`.
    pub w_norm: f64,
    /// `‖B(x_λ − x*)‖²`, only when a decomposition is available.
    pub b_err_sq: Option<f64>,
}

/// The relative and scaled error functionals reported for a solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ErrorReport {
    pub rel_x: f64,
    pub rel_Ax: f64,
    pub rel_res: f64,
    pub scaled_output: f64,
    pub scaled_b: Option<f64>,
}

/// Anything that can produce `x_λ` for data `b`.
pub trait TikhonovSolver {
    fn n(&self) -> usize;
    fn solve(&self, b: &[f64], lambda: f64) -> Result<RegularizedSolution>;
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(TikhError::NonFiniteLambda(lambda))
    }
}

fn assemble(
    instance: &ProblemInstance,
    b: &[f64],
    lambda: f64,
    x: Vec<f64>,
    ax: &[f64],
    b_err_sq: Option<f64>,
) -> Result<RegularizedSolution> {
    let residual_b = ax.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let output_err = ax.iter().zip(&instance.y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let w_norm = w_norm(&x, &instance.weight)?;
    Ok(RegularizedSolution {
        lambda,
        x,
        residual_b,
        output_err: Some(output_err),
        w_norm,
        b_err_sq,
    })
}

/// Normal-equation solver; `AᵀA` is formed once and refactored per `λ`.
pub struct DirectSolver<'a> {
    instance: &'a ProblemInstance,
    gram: DenseMatrix,
}

impl<'a> DirectSolver<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Self {
        Self {
            instance,
            gram: instance.a.gram(),
        }
    }
}

impl TikhonovSolver for DirectSolver<'_> {
    fn n(&self) -> usize {
        self.instance.n()
    }

    fn solve(&self, b: &[f64], lambda: f64) -> Result<RegularizedSolution> {
        check_lambda(lambda)?;
        let p = self.instance;
        check_len(p.n(), b.len())?;
        let n = p.n();
        let mut normal = self.gram.clone();
        match &p.weight {
            WeightSpec::Identity => {
                for i in 0..n {
                    normal[(i, i)] += lambda;
                }
            }
            WeightSpec::Explicit(w) => {
                for i in 0..n {
                    axpy(lambda, w.row(i), normal.row_mut(i));
                }
            }
        }
        let rhs = p.a.tr_matvec(b)?;
        let x = Cholesky::factor(&normal)?.solve(&rhs)?;
        let ax = p.a.matvec(&x)?;
        assemble(p, b, lambda, x, &ax, None)
    }
}

/// One-shot solve of the normal equations.
pub fn solve_direct(instance: &ProblemInstance, b: &[f64], lambda: f64) -> Result<RegularizedSolution> {
    DirectSolver::new(instance).solve(b, lambda)
}

/// Eigenbasis solver. Precomputes `Aψ_k` and the coefficients of `x*`, so a
/// solve costs `O(nm)`.
pub struct SpectralSolver<'a> {
    instance: &'a ProblemInstance,
    decomp: &'a SpectralDecomposition,
    /// Row `k` is `Aψ_k`.
    images: DenseMatrix,
    /// `(x*, ψ_k)_W`.
    x_star_coeffs: Vec<f64>,
}

impl<'a> SpectralSolver<'a> {
    pub fn new(instance: &'a ProblemInstance, decomp: &'a SpectralDecomposition) -> Result<Self> {
        check_len(instance.n(), decomp.n)?;
        let n = instance.n();
        let mut images = DenseMatrix::zeros(decomp.m, n);
        for k in 0..decomp.m {
            let img = instance.a.matvec(decomp.mode(k))?;
            images.row_mut(k).copy_from_slice(&img);
        }
        let x_star_coeffs = decomp.coefficients(&instance.x_star, &instance.weight)?;
        Ok(Self {
            instance,
            decomp,
            images,
            x_star_coeffs,
        })
    }

    pub fn instance(&self) -> &ProblemInstance {
        self.instance
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        self.decomp
    }

    /// `(b, Aψ_k)` for every retained mode.
    pub fn project(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.instance.n(), b.len())?;
        Ok((0..self.decomp.m).map(|k| dot(self.images.row(k), b)).collect())
    }

    /// Filtered coefficients `c_k = g_k / (λ + ρ_k)`.
    pub fn coefficients(&self, projected: &[f64], lambda: f64) -> Vec<f64> {
        projected
            .iter()
            .zip(self.decomp.retained())
            .map(|(g, r)| g / (lambda + r))
            .collect()
    }

    /// `A x_λ = Σ_k c_k Aψ_k`.
    pub fn image(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut ax = vec![0.0; self.instance.n()];
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                axpy(c, self.images.row(k), &mut ax);
            }
        }
        ax
    }

    /// `‖B(x_λ − x*)‖²` from the coefficients of `x_λ`.
    pub fn b_error_sq(&self, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .zip(&self.x_star_coeffs)
            .zip(self.decomp.retained())
            .map(|((c, s), r)| r.sqrt() * (c - s).powi(2))
            .sum()
    }

    /// `‖Ax_λ − Ax*‖` and `‖B(x_λ − x*)‖²` without forming `x_λ`.
    pub fn output_errors(&self, projected: &[f64], lambda: f64) -> (f64, f64) {
        let coeffs = self.coefficients(projected, lambda);
        let ax = self.image(&coeffs);
        let out = ax
            .iter()
            .zip(&self.instance.y)
            .map(|(p, q)| (p - q).powi(2))
            .sum::<f64>()
            .sqrt();
        (out, self.b_error_sq(&coeffs))
    }

    /// Full solution from a precomputed projection of `b`.
    pub fn solve_projected(&self, projected: &[f64], b: &[f64], lambda: f64) -> Result<RegularizedSolution> {
        check_lambda(lambda)?;
        let coeffs = self.coefficients(projected, lambda);
        let x = self.decomp.synthesize(&coeffs)?;
        let ax = self.image(&coeffs);
        let b_err = self.b_error_sq(&coeffs);
        assemble(self.instance, b, lambda, x, &ax, Some(b_err))
    }
}

impl TikhonovSolver for SpectralSolver<'_> {
    fn n(&self) -> usize {
        self.instance.n()
    }

    fn solve(&self, b: &[f64], lambda: f64) -> Result<RegularizedSolution> {
        check_lambda(lambda)?;
        let g = self.project(b)?;
        self.solve_projected(&g, b, lambda)
    }
}

/// One-shot solve through the eigenbasis.
pub fn solve_spectral(
    decomp: &SpectralDecomposition,
    instance: &ProblemInstance,
    b: &[f64],
    lambda: f64,
) -> Result<RegularizedSolution> {
    SpectralSolver::new(instance, decomp)?.solve(b, lambda)
}

/// Relative and scaled errors of `sol` against the instance's exact
/// solution. `scaled_b` is present only when `decomp` is given.
pub fn error_report(
    instance: &ProblemInstance,
    decomp: Option<&SpectralDecomposition>,
    sol: &RegularizedSolution,
    b: &[f64],
) -> Result<ErrorReport> {
    let n = instance.n();
    check_len(n, sol.x.len())?;
    check_len(n, b.len())?;
    let err: Vec<f64> = sol.x.iter().zip(&instance.x_star).map(|(a, b)| a - b).collect();
    let ax = instance.a.matvec(&sol.x)?;
    let out_err = ax.iter().zip(&instance.y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let res = ax.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { num };
    let sqrt_n = (n as f64).sqrt();
    let scaled_b = match decomp {
        Some(d) => Some(b_seminorm_sq(d, &err, &instance.weight)?.sqrt() / sqrt_n),
        None => None,
    };
    Ok(ErrorReport {
        rel_x: ratio(norm(&err), norm(&instance.x_star)),
        rel_Ax: ratio(out_err, norm(&instance.y)),
        rel_res: ratio(res, norm(b)),
        scaled_output: out_err / sqrt_n,
        scaled_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::decompose;

    fn diag_instance(d: &[f64], x: Vec<f64>) -> ProblemInstance {
        ProblemInstance::new("diag", DenseMatrix::from_diag(d), x, WeightSpec::Identity).unwrap()
    }

    #[test]
    fn identity_operator_is_a_scalar_filter() {
        let p = diag_instance(&[1.0, 1.0, 1.0], vec![0.0; 3]);
        let b = [3.0, -1.0, 2.0];
        let s = solve_direct(&p, &b, 0.5).unwrap();
        for (xi, bi) in s.x.iter().zip(&b) {
            assert!((xi - bi / 1.5).abs() < 1e-15);
        }
    }

    #[test]
    fn hand_solved_two_by_two() {
        // (AᵀA + I) x = Aᵀb with A = diag(2,1), b = (2,1): 5x₁ = 4, 2x₂ = 1
        let p = diag_instance(&[2.0, 1.0], vec![1.0, 1.0]);
        let s = solve_direct(&p, &[2.0, 1.0], 1.0).unwrap();
        assert!((s.x[0] - 0.8).abs() < 1e-15 && (s.x[1] - 0.5).abs() < 1e-15);
        let d = decompose(&p).unwrap();
        let t = solve_spectral(&d, &p, &[2.0, 1.0], 1.0).unwrap();
        assert!((t.x[0] - 0.8).abs() < 1e-14 && (t.x[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn huge_lambda_shrinks_to_zero() {
        let p = diag_instance(&[1.0, 0.5], vec![1.0, 1.0]);
        let b = [1.0, 2.0];
        let s = solve_direct(&p, &b, 1e12).unwrap();
        let atb = p.a.tr_matvec(&b).unwrap();
        assert!(norm(&s.x) <= norm(&atb) / 1e12);
    }

    #[test]
    fn single_mode_data_gives_single_filter_factor() {
        let p = diag_instance(&[3.0, 2.0, 1.0], vec![1.0; 3]);
        let d = decompose(&p).unwrap();
        let solver = SpectralSolver::new(&p, &d).unwrap();
        let b = p.a.matvec(d.mode(0)).unwrap();
        let lambda = 0.7;
        let c = solver.coefficients(&solver.project(&b).unwrap(), lambda);
        assert!((c[0] - d.rho[0] / (lambda + d.rho[0])).abs() < 1e-14);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn vanishing_lambda_recovers_least_squares() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let p = ProblemInstance::new("full", a, vec![1.0, -1.0], WeightSpec::Identity).unwrap();
        let d = decompose(&p).unwrap();
        let s = solve_spectral(&d, &p, &p.y.clone(), 1e-12).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-10 && (s.x[1] + 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_lambda() {
        let p = diag_instance(&[1.0, 1.0], vec![0.0; 2]);
        for lam in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(solve_direct(&p, &[1.0, 1.0], lam), Err(TikhError::NonFiniteLambda(_))));
        }
    }

    #[test]
    fn error_report_trivial_cases() {
        let p = diag_instance(&[2.0, 1.0], vec![1.0, 2.0]);
        let d = decompose(&p).unwrap();
        let exact = RegularizedSolution {
            lambda: 1.0,
            x: p.x_star.clone(),
            residual_b: 0.0,
            output_err: Some(0.0),
            w_norm: 0.0,
            b_err_sq: None,
        };
        let r = error_report(&p, Some(&d), &exact, &p.y).unwrap();
        assert_eq!((r.rel_x, r.rel_Ax, r.rel_res), (0.0, 0.0, 0.0));
        assert_eq!(r.scaled_b, Some(0.0));
        let zero = RegularizedSolution {
            x: vec![0.0; 2],
            ..exact
        };
        let r = error_report(&p, None, &zero, &p.y).unwrap();
        assert_eq!(r.rel_x, 1.0);
        assert_eq!(r.scaled_b, None);
    }
}
