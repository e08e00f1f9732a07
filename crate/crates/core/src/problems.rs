//! Model problems and the additive Gaussian noise model `b = y + σξ`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TikhError};
use crate::linalg::{norm, DenseMatrix, WeightSpec};
use crate::rng::GaussianStream;

/// Largest blur problem (in unknowns) that will be assembled densely.
pub const BLUR_SIZE_CAP: usize = 40_000;

/// A discrete linear problem `A x* = y` with its penalty weight.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub label: String,
    pub a: DenseMatrix,
    pub x_star: Vec<f64>,
    pub y: Vec<f64>,
    pub weight: WeightSpec,
}

impl ProblemInstance {
    /// Assembles an instance, computing the clean data `y = A x*`.
    pub fn new(
        label: impl Into<String>,
        a: DenseMatrix,
        x_star: Vec<f64>,
        weight: WeightSpec,
    ) -> Result<Self> {
        if !a.is_square() {
            return Err(TikhError::DimensionMismatch {
                expected: a.rows(),
                found: a.cols(),
            });
        }
        let n = a.rows();
        if n < 2 {
            return Err(TikhError::Domain(format!("problem size must be at least 2, got {n}")));
        }
        if x_star.iter().any(|v| !v.is_finite()) {
            return Err(TikhError::NonFinite("exact solution"));
        }
        weight.check_dim(n)?;
        let y = a.matvec(&x_star)?;
        Ok(Self {
            label: label.into(),
            a,
            x_star,
            y,
            weight,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// `n^{-1/2} ‖x*‖_W`.
    pub fn scaled_solution_norm(&self) -> Result<f64> {
        Ok(crate::linalg::w_norm(&self.x_star, &self.weight)? / (self.n() as f64).sqrt())
    }
}

/// Relative noise level and generator seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub delta: f64,
    pub seed: u64,
}

/// Noisy observation `b = y + σξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyData {
    pub b: Vec<f64>,
    pub sigma: f64,
    pub delta: f64,
    pub seed: u64,
}

/// Noise strength `σ = δ n^{-1/2} ‖y‖`.
pub fn noise_strength(y: &[f64], delta: f64) -> f64 {
    delta * norm(y) / (y.len() as f64).sqrt()
}

/// Draws `b = y + σξ` with `ξ` iid standard normal from the seeded stream.
pub fn add_noise(instance: &ProblemInstance, spec: NoiseSpec) -> Result<NoisyData> {
    perturb(&instance.y, spec.delta, spec.seed)
}

pub(crate) fn perturb(y: &[f64], delta: f64, seed: u64) -> Result<NoisyData> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(TikhError::Domain(format!(
            "noise level must be finite and nonnegative, got {delta}"
        )));
    }
    let sigma = noise_strength(y, delta);
    let mut stream = GaussianStream::new(seed);
    let b = y.iter().map(|&yi| yi + sigma * stream.next_normal()).collect();
    Ok(NoisyData {
        b,
        sigma,
        delta,
        seed,
    })
}

/// Green's function of the Dirichlet Laplacian on (0, 1).
pub fn greens_kernel(t: f64, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&s) {
        return Err(TikhError::Domain(format!(
            "kernel arguments ({t}, {s}) outside the unit square"
        )));
    }
    Ok(kernel(t, s))
}

#[inline]
fn kernel(t: f64, s: f64) -> f64 {
    if s <= t {
        s * (1.0 - t)
    } else {
        t * (1.0 - s)
    }
}

/// Exact solution `x(t) = -6t²(1-t)(2-8t+7t²)` of the integral equation.
pub fn fredholm_solution(t: f64) -> f64 {
    -6.0 * t * t * (1.0 - t) * (2.0 - 8.0 * t + 7.0 * t * t)
}

#[inline]
fn fredholm_entry(n: usize, j: usize, i: usize) -> f64 {
    let nf = n as f64;
    let t = j as f64 / nf;
    let s = (2 * i + 1) as f64 / (2.0 * nf);
    kernel(t, s) / nf
}

fn fredholm_nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| fredholm_solution((2 * j + 1) as f64 / (2.0 * n as f64)))
        .collect()
}

/// Quadrature discretization of the first-kind equation with the Green's
/// kernel. Row `j` (0-based) uses the output node `t = j/n`; column `i` uses
/// the midpoint `s = (2i+1)/(2n)`:
///
/// ```text
/// A[j][i] = κ(j/n, (2i+1)/(2n)) / n,   x*[j] = x((2j+1)/(2n)),   W = I
/// ```
pub fn build_fredholm(n: usize) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(TikhError::Domain(format!("problem size must be at least 2, got {n}")));
    }
    let a = DenseMatrix::from_fn(n, n, |j, i| fredholm_entry(n, j, i));
    ProblemInstance::new(format!("fredholm-{n}"), a, fredholm_nodes(n), WeightSpec::Identity)
}

/// `‖y‖` for the Fredholm problem of size `n`, computed row by row without
/// assembling `A`. Agrees with `norm(&build_fredholm(n)?.y)` to roundoff.
pub fn fredholm_data_norm(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(TikhError::Domain(format!("problem size must be at least 2, got {n}")));
    }
    let x = fredholm_nodes(n);
    let sq: f64 = (0..n)
        .map(|j| {
            let yj: f64 = x.iter().enumerate().map(|(i, xi)| fredholm_entry(n, j, i) * xi).sum();
            yj * yj
        })
        .sum();
    Ok(sq.sqrt())
}

/// Normalized 1D Gaussian blur along one image axis with zero boundary:
/// weights outside the image are dropped, so edge rows lose mass.
fn blur_axis(side: usize, width: f64) -> DenseMatrix {
    let radius = (4.0 * width).ceil().max(1.0) as isize;
    let weight = |d: isize| (-((d * d) as f64) / (2.0 * width * width)).exp();
    let total: f64 = (-radius..=radius).map(weight).sum();
    DenseMatrix::from_fn(side, side, |i, j| {
        let d = i as isize - j as isize;
        if d.abs() <= radius {
            weight(d) / total
        } else {
            0.0
        }
    })
}

/// Synthetic test image on `[0,1]²` sampled at pixel centres: two
/// rectangles plus a Gaussian bump.
///
/// ```text
/// 1.0   on [0.15, 0.45] × [0.20, 0.60]   (u = column, v = row)
/// 0.6   on [0.55, 0.85] × [0.60, 0.85]
/// 0.8 · exp(-((u-0.7)² + (v-0.3)²) / (2 · 0.08²))   added everywhere
/// ```
pub fn blur_image(side: usize) -> Vec<f64> {
    let h = 1.0 / side as f64;
    let mut img = Vec::with_capacity(side * side);
    for r in 0..side {
        let v = (r as f64 + 0.5) * h;
        for c in 0..side {
            let u = (c as f64 + 0.5) * h;
            let mut val = 0.0;
            if (0.15..=0.45).contains(&u) && (0.20..=0.60).contains(&v) {
                val += 1.0;
            }
            if (0.55..=0.85).contains(&u) && (0.60..=0.85).contains(&v) {
                val += 0.6;
            }
            val += 0.8 * (-((u - 0.7).powi(2) + (v - 0.3).powi(2)) / (2.0 * 0.08 * 0.08)).exp();
            img.push(val);
        }
    }
    img
}

/// Separable Gaussian blur of a `side × side` image with zero boundary
/// conditions, acting on the row-major flattened image. `psf_width` is the
/// standard deviation in pixels.
pub fn build_blur(side: usize, psf_width: f64) -> Result<ProblemInstance> {
    if side < 4 {
        return Err(TikhError::Domain(format!("image side must be at least 4, got {side}")));
    }
    if !(psf_width > 0.0 && psf_width.is_finite()) {
        return Err(TikhError::Domain(format!("psf width must be positive, got {psf_width}")));
    }
    let n = side * side;
    if n > BLUR_SIZE_CAP {
        return Err(TikhError::SizeCap { n, cap: BLUR_SIZE_CAP });
    }
    let g = blur_axis(side, psf_width);
    // A[(r1,c1),(r2,c2)] = G[r1][r2] · G[c1][c2]
    let a = DenseMatrix::from_fn(n, n, |p, q| g[(p / side, q / side)] * g[(p % side, q % side)]);
    ProblemInstance::new(
        format!("blur-{side}-{psf_width}"),
        a,
        blur_image(side),
        WeightSpec::Identity,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        assert_eq!(greens_kernel(0.5, 0.25).unwrap(), 0.125);
        assert_eq!(greens_kernel(0.0, 0.7).unwrap(), 0.0);
        assert_eq!(greens_kernel(0.3, 0.8).unwrap(), greens_kernel(0.8, 0.3).unwrap());
        assert!(matches!(greens_kernel(1.2, 0.5), Err(TikhError::Domain(_))));
        assert!(matches!(greens_kernel(0.5, -0.1), Err(TikhError::Domain(_))));
    }

    #[test]
    fn fredholm_small_entries() {
        let p = build_fredholm(2).unwrap();
        // first row sits on t = 0 where the kernel vanishes
        assert_eq!(p.a[(0, 0)], 0.0);
        assert_eq!(p.a[(0, 1)], 0.0);
        // A[1][0] = κ(1/2, 1/4)/2 = (1/4)(1/2)/2
        assert_eq!(p.a[(1, 0)], 0.0625);
        assert!(p.a.as_slice().iter().all(|&v| v >= 0.0));
        assert!(p.weight.is_identity());
    }

    #[test]
    fn fredholm_solution_sample_at_quarter() {
        assert_eq!(fredholm_solution(0.25), -0.123046875);
        // n = 2 samples exactly t = 1/4 first
        let p = build_fredholm(2).unwrap();
        assert_eq!(p.x_star[0], -0.123046875);
    }

    #[test]
    fn fredholm_rejects_tiny_n() {
        assert!(build_fredholm(1).is_err());
        assert!(fredholm_data_norm(0).is_err());
    }

    #[test]
    fn streamed_norm_matches_assembled() {
        let p = build_fredholm(300).unwrap();
        let direct = norm(&p.y);
        let streamed = fredholm_data_norm(300).unwrap();
        assert!((direct - streamed).abs() <= 1e-13 * direct);
    }

    #[test]
    fn clean_data_consistent() {
        let p = build_fredholm(50).unwrap();
        let r = p.a.matvec(&p.x_star).unwrap();
        let diff: Vec<f64> = r.iter().zip(&p.y).map(|(a, b)| a - b).collect();
        assert!(norm(&diff) <= 1e-12 * norm(&p.y));
    }

    #[test]
    fn blur_narrow_psf_is_nearly_identity() {
        let p = build_blur(6, 0.2).unwrap();
        for i in 0..p.n() {
            assert!(p.a[(i, i)] >= 0.99);
        }
    }

    #[test]
    fn blur_rows_lose_mass_only() {
        let p = build_blur(20, 1.5).unwrap();
        let sums: Vec<f64> = (0..p.n()).map(|i| p.a.row(i).iter().sum()).collect();
        assert!(sums.iter().all(|&s| s <= 1.0 + 1e-14));
        // centre pixel keeps its mass, corner loses some
        assert!((sums[10 * 20 + 10] - 1.0).abs() < 1e-12);
        assert!(sums[0] < 0.9);
        let r = p.a.matvec(&p.x_star).unwrap();
        assert!(r.iter().zip(&p.y).all(|(a, b)| (a - b).abs() <= 1e-12 * norm(&p.y)));
    }

    #[test]
    fn blur_size_checks() {
        assert!(matches!(build_blur(201, 1.0), Err(TikhError::SizeCap { .. })));
        assert!(matches!(build_blur(3, 1.0), Err(TikhError::Domain(_))));
        assert!(matches!(build_blur(8, 0.0), Err(TikhError::Domain(_))));
    }

    #[test]
    fn zero_noise_is_exact() {
        let p = build_fredholm(20).unwrap();
        let d = add_noise(&p, NoiseSpec { delta: 0.0, seed: 3 }).unwrap();
        assert_eq!(d.b, p.y);
        assert_eq!(d.sigma, 0.0);
    }

    #[test]
    fn negative_noise_level_rejected() {
        let p = build_fredholm(10).unwrap();
        assert!(add_noise(&p, NoiseSpec { delta: -0.1, seed: 0 }).is_err());
        assert!(add_noise(&p, NoiseSpec { delta: f64::NAN, seed: 0 }).is_err());
    }

    #[test]
    fn noise_is_reproducible_and_standard() {
        let n = 10_000;
        let y = vec![1.0; n];
        let a = perturb(&y, 0.1, 99).unwrap();
        let b = perturb(&y, 0.1, 99).unwrap();
        assert_eq!(a, b);
        assert!((a.sigma - 0.1).abs() < 1e-15);
        let xi: Vec<f64> = a.b.iter().map(|v| (v - 1.0) / a.sigma).collect();
        let mean = xi.iter().sum::<f64>() / n as f64;
        let var = xi.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        assert!((-0.05..=0.05).contains(&mean));
        assert!((0.95..=1.05).contains(&var));
    }

    #[test]
    fn different_seeds_are_uncorrelated() {
        let n = 10_000;
        let y = vec![1.0; n];
        let a: Vec<f64> = perturb(&y, 1.0, 1).unwrap().b.iter().map(|v| v - 1.0).collect();
        let b: Vec<f64> = perturb(&y, 1.0, 2).unwrap().b.iter().map(|v| v - 1.0).collect();
        let ma = a.iter().sum::<f64>() / n as f64;
        let mb = b.iter().sum::<f64>() / n as f64;
        let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|x| (x - mb).powi(2)).sum();
        let corr = cov / (va * vb).sqrt();
        assert!((-0.05..=0.05).contains(&corr), "correlation {corr}");
    }
}
