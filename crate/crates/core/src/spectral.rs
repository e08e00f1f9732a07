//! Generalized eigenproblem `AᵀA ψ = ρ W ψ`, decay-exponent fits and the
//! spectral seminorm `‖Bu‖² = Σ √ρ_k (u, ψ_k)²_W`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TikhError};
use crate::linalg::{check_len, dot, sym_eig_rows, Cholesky, DenseMatrix, WeightSpec};
use crate::problems::ProblemInstance;

/// First mode (1-based) of the decay fit.
pub const FIT_FIRST_MODE: usize = 6;
/// Upper cap (1-based) of the decay fit.
pub const FIT_LAST_MODE_CAP: usize = 400;

/// Generalized eigenpairs, sorted descending.
///
/// `rho` has one entry per unknown; entries past `m` were at or below the
/// numerical-rank threshold `n·ε·ρ₁` and are stored as zero. Row `k` of
/// `psi` is the W-orthonormal eigenvector `ψ_{k+1}` of the `k`-th retained
/// eigenvalue.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub rho: Vec<f64>,
    pub psi: DenseMatrix,
    pub m: usize,
    pub n: usize,
}

impl SpectralDecomposition {
    pub fn retained(&self) -> &[f64] {
        &self.rho[..self.m]
    }

    /// `ψ_k` for 0-based `k < m`.
    pub fn mode(&self, k: usize) -> &[f64] {
        self.psi.row(k)
    }

    /// Coefficients `(u, ψ_k)_W` over the retained modes.
    pub fn coefficients(&self, u: &[f64], weight: &WeightSpec) -> Result<Vec<f64>> {
        check_len(self.n, u.len())?;
        weight.check_dim(self.n)?;
        let wu = weight.apply(u)?;
        Ok((0..self.m).map(|k| dot(self.mode(k), &wu)).collect())
    }

    /// `Σ_k c_k ψ_k`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.m, coeffs.len())?;
        let mut x = vec![0.0; self.n];
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                crate::linalg::axpy(c, self.mode(k), &mut x);
            }
        }
        Ok(x)
    }
}

/// Generalized eigendecomposition of `(AᵀA, W)`.
///
/// With `W = I` this is the eigendecomposition of `AᵀA`. Otherwise
/// `W = LLᵀ`, the symmetric matrix `L⁻¹AᵀAL⁻ᵀ` is decomposed and its
/// eigenvectors are mapped back by `ψ = L⁻ᵀz`.
pub fn decompose(instance: &ProblemInstance) -> Result<SpectralDecomposition> {
    let n = instance.n();
    let gram = instance.a.gram();
    let (values, vectors) = match &instance.weight {
        WeightSpec::Identity => sym_eig_rows(&gram)?,
        WeightSpec::Explicit(w) => {
            let chol = Cholesky::factor(w)?;
            let half = chol.solve_lower_matrix(&gram)?;
            let mut whitened = chol.solve_lower_matrix(&half.transpose())?;
            for i in 0..n {
                for j in 0..i {
                    let avg = 0.5 * (whitened[(i, j)] + whitened[(j, i)]);
                    whitened[(i, j)] = avg;
                    whitened[(j, i)] = avg;
                }
            }
            let (values, z) = sym_eig_rows(&whitened)?;
            let mut psi = DenseMatrix::zeros(n, n);
            for k in 0..n {
                psi.row_mut(k).copy_from_slice(&chol.solve_upper(z.row(k))?);
            }
            (values, psi)
        }
    };
    Ok(truncate(values, vectors, n))
}

fn truncate(mut values: Vec<f64>, vectors: DenseMatrix, n: usize) -> SpectralDecomposition {
    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    let threshold = n as f64 * f64::EPSILON * top;
    let m = if top > 0.0 {
        values.iter().take_while(|&&r| r > threshold).count()
    } else {
        0
    };
    for r in values.iter_mut().skip(m) {
        *r = 0.0;
    }
    let mut psi = DenseMatrix::zeros(m, n);
    for k in 0..m {
        psi.row_mut(k).copy_from_slice(vectors.row(k));
    }
    SpectralDecomposition {
        rho: values,
        psi,
        m,
        n,
    }
}

/// Power-law fit `log ρ_k ≈ log C − α̂ log k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaFit {
    pub alpha_hat: f64,
    pub log_c: f64,
    /// Inclusive 1-based mode range of the fit.
    pub fit_range: (usize, usize),
    /// `max_{1≤k≤m} ρ_k k^{α̂}`.
    pub c_upper: f64,
    pub residual_rms: f64,
}

impl AlphaFit {
    /// Envelope `C_upper k^{-α̂}` at 1-based mode `k`.
    pub fn envelope(&self, k: usize) -> f64 {
        self.c_upper * (k as f64).powf(-self.alpha_hat)
    }
}

/// Least-squares line `y = intercept + slope·x`. Returns
/// `(slope, intercept, residual_rms)`.
pub fn least_squares_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Fits the decay exponent over `k = 6, …, min(400, ⌊m/2⌋)` (1-based,
/// natural logarithms). Needs at least two modes in range, so `m ≥ 14`.
pub fn fit_alpha(decomp: &SpectralDecomposition) -> Result<AlphaFit> {
    fit_alpha_values(decomp.retained())
}

/// As [`fit_alpha`] on a bare descending spectrum of positive values.
pub fn fit_alpha_values(rho: &[f64]) -> Result<AlphaFit> {
    let m = rho.len();
    let k_lo = FIT_FIRST_MODE;
    let k_hi = FIT_LAST_MODE_CAP.min(m / 2);
    if k_hi <= k_lo {
        return Err(TikhError::InsufficientSpectrum {
            retained: m,
            needed: 2 * (FIT_FIRST_MODE + 1),
        });
    }
    if rho.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(TikhError::Domain("spectrum must be positive and finite".into()));
    }
    let xs: Vec<f64> = (k_lo..=k_hi).map(|k| (k as f64).ln()).collect();
    let ys: Vec<f64> = (k_lo..=k_hi).map(|k| rho[k - 1].ln()).collect();
    let (slope, intercept, residual_rms) = least_squares_line(&xs, &ys);
    let alpha_hat = -slope;
    let c_upper = rho
        .iter()
        .enumerate()
        .map(|(i, &r)| r * ((i + 1) as f64).powf(alpha_hat))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(AlphaFit {
        alpha_hat,
        log_c: intercept,
        fit_range: (k_lo, k_hi),
        c_upper,
        residual_rms,
    })
}

/// `‖Bu‖² = Σ_{k≤m} √ρ_k (u, ψ_k)²_W`.
pub fn b_seminorm_sq(decomp: &SpectralDecomposition, u: &[f64], weight: &WeightSpec) -> Result<f64> {
    let coeffs = decomp.coefficients(u, weight)?;
    Ok(coeffs
        .iter()
        .zip(decomp.retained())
        .map(|(c, r)| r.sqrt() * c * c)
        .sum())
}
