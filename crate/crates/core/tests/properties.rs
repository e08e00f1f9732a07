use proptest::prelude::*;

use tikhreg::linalg::{
    dot, norm, spd_solve, sym_eig, sym_eig_jacobi, w_inner, DenseMatrix, WeightSpec,
};
use tikhreg::params::{
    adaptive_select, adaptive_update, prior_rule_rho0, prior_rule_w, AdaptiveConfig, PriorRuleInput, StopMode,
    Termination,
};
use tikhreg::problems::{add_noise, build_fredholm, NoiseSpec, ProblemInstance};
use tikhreg::rng::GaussianStream;
use tikhreg::spectral::{b_seminorm_sq, decompose, fit_alpha_values};
use tikhreg::tikhonov::{solve_direct, DirectSolver, SpectralSolver, TikhonovSolver};

fn gaussian_matrix(rows: usize, cols: usize, stream: &mut GaussianStream) -> DenseMatrix {
    DenseMatrix::new(rows, cols, stream.sample(rows * cols)).unwrap()
}

fn random_spd(n: usize, stream: &mut GaussianStream) -> DenseMatrix {
    let r = gaussian_matrix(n, n, stream);
    let mut m = r.gram();
    for i in 0..n {
        m[(i, i)] += n as f64;
    }
    m
}

fn random_instance(n: usize, seed: u64, weighted: bool) -> ProblemInstance {
    let mut s = GaussianStream::new(seed);
    let a = gaussian_matrix(n, n, &mut s);
    let x = s.sample(n);
    let w = if weighted {
        WeightSpec::explicit(random_spd(n, &mut s)).unwrap()
    } else {
        WeightSpec::Identity
    };
    ProblemInstance::new("random", a, x, w).unwrap()
}

/// `‖M^{1/4} W^{1/2} u‖²` with `M = W^{-1/2}AᵀAW^{-1/2}`, every matrix
/// function taken through a Jacobi eigendecomposition.
fn b_seminorm_by_matrix_powers(a: &DenseMatrix, w: &DenseMatrix, u: &[f64]) -> f64 {
    let n = a.rows();
    let matrix_power = |m: &DenseMatrix, p: f64| {
        let e = sym_eig_jacobi(m).unwrap();
        let f: Vec<f64> = e.values.iter().map(|v| v.max(0.0).powf(p)).collect();
        DenseMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| e.vectors[(i, k)] * f[k] * e.vectors[(j, k)]).sum()
        })
    };
    let w_half = matrix_power(w, 0.5);
    let w_mhalf = matrix_power(w, -0.5);
    let m = w_mhalf.matmul(&a.gram()).unwrap().matmul(&w_mhalf).unwrap();
    let m = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let bu = matrix_power(&m, 0.25).matvec(&w_half.matvec(u).unwrap()).unwrap();
    dot(&bu, &bu)
}

#[test]
fn b_seminorm_matches_matrix_power_oracle() {
    for seed in 0..4 {
        let p = random_instance(10, 100 + seed, seed % 2 == 1);
        let d = decompose(&p).unwrap();
        let u = GaussianStream::new(900 + seed).sample(10);
        let w = p.weight.to_dense(10);
        let fast = b_seminorm_sq(&d, &u, &p.weight).unwrap();
        let oracle = b_seminorm_by_matrix_powers(&p.a, &w, &u);
        assert!((fast - oracle).abs() <= 1e-8 * oracle, "seed {seed}: {fast} vs {oracle}");
    }
}

#[test]
fn cross_solver_equivalence_on_fredholm() {
    let p = build_fredholm(80).unwrap();
    let d = decompose(&p).unwrap();
    let data = add_noise(&p, NoiseSpec { delta: 0.01, seed: 5 }).unwrap();
    let spectral = SpectralSolver::new(&p, &d).unwrap();
    let direct = DirectSolver::new(&p);
    // the Fredholm operator has numerically null modes, so only moderate λ
    // keeps the normal equations well conditioned
    for lambda in [1e-4, 1.0] {
        let xd = direct.solve(&data.b, lambda).unwrap().x;
        let xs = spectral.solve(&data.b, lambda).unwrap().x;
        let diff: Vec<f64> = xd.iter().zip(&xs).map(|(a, b)| a - b).collect();
        assert!(norm(&diff) <= 1e-8 * (1.0 + norm(&xd)));
    }
}

#[test]
fn energy_identity() {
    let p = random_instance(12, 41, true);
    let d = decompose(&p).unwrap();
    let u = GaussianStream::new(3).sample(12);
    let lambda = 0.37;
    let direct = lambda * w_inner(&u, &u, &p.weight).unwrap() + norm(&p.a.matvec(&u).unwrap()).powi(2);
    let coeffs = d.coefficients(&u, &p.weight).unwrap();
    let spectral: f64 = coeffs.iter().zip(&d.rho).map(|(c, r)| (lambda + r) * c * c).sum();
    assert!((direct - spectral).abs() <= 1e-10 * direct);
}

#[test]
fn optimality_certificate() {
    let p = random_instance(15, 77, true);
    let b = GaussianStream::new(8).sample(15);
    let lambda = 1e-2;
    let sol = solve_direct(&p, &b, lambda).unwrap();
    let objective = |x: &[f64]| {
        let r: Vec<f64> = p.a.matvec(x).unwrap().iter().zip(&b).map(|(a, b)| a - b).collect();
        dot(&r, &r) + lambda * w_inner(x, x, &p.weight).unwrap()
    };
    let base = objective(&sol.x);
    let mut s = GaussianStream::new(9);
    for _ in 0..20 {
        let v = s.sample(15);
        let moved: Vec<f64> = sol.x.iter().zip(&v).map(|(x, v)| x + 1e-4 * v).collect();
        assert!(base <= objective(&moved));
    }
}

#[test]
fn adaptive_is_deterministic_and_positive() {
    let p = build_fredholm(100).unwrap();
    let d = decompose(&p).unwrap();
    let solver = SpectralSolver::new(&p, &d).unwrap();
    let data = add_noise(&p, NoiseSpec { delta: 0.05, seed: 12 }).unwrap();
    let cfg = AdaptiveConfig::default();
    let a = adaptive_select(&solver, &data.b, &cfg).unwrap();
    let b = adaptive_select(&solver, &data.b, &cfg).unwrap();
    assert_eq!(a.lambdas, b.lambdas);
    assert_eq!(a.final_solution, b.final_solution);
    assert_eq!(a.terminated, Termination::Converged);
    assert!(a.lambdas.iter().all(|&l| l > 0.0 && l.is_finite()));
    assert_eq!(a.lambdas.len(), a.residuals.len());
    assert_eq!(a.lambdas.len(), a.w_norms.len());
    assert_eq!(a.final_solution.lambda, a.final_lambda());
}

#[test]
fn adaptive_direct_and_spectral_agree() {
    let p = build_fredholm(60).unwrap();
    let d = decompose(&p).unwrap();
    let data = add_noise(&p, NoiseSpec { delta: 0.1, seed: 2 }).unwrap();
    let cfg = AdaptiveConfig {
        stop_mode: StopMode::Relative,
        tol: 1e-6,
        ..AdaptiveConfig::default()
    };
    let a = adaptive_select(&SpectralSolver::new(&p, &d).unwrap(), &data.b, &cfg).unwrap();
    let b = adaptive_select(&DirectSolver::new(&p), &data.b, &cfg).unwrap();
    assert_eq!(a.iterations(), b.iterations());
    assert!((a.final_lambda() / b.final_lambda() - 1.0).abs() < 1e-6);
}

#[test]
fn noise_free_adaptive_iterates_decay_monotonically() {
    let p = build_fredholm(20).unwrap();
    let d = decompose(&p).unwrap();
    let solver = SpectralSolver::new(&p, &d).unwrap();
    let cfg = AdaptiveConfig {
        stop_mode: StopMode::Relative,
        tol: 1e-12,
        max_iters: 200,
        ..AdaptiveConfig::default()
    };
    let t = adaptive_select(&solver, &p.y, &cfg).unwrap();
    // once the residual reaches roundoff the iterates stall instead of decaying
    let head: Vec<f64> = t.lambdas.iter().copied().take_while(|&l| l > 1e-20).collect();
    assert!(head.len() >= 10);
    assert!(head.windows(2).all(|w| w[1] < w[0]), "{:?}", t.lambdas);
    assert!(t.final_lambda() < 1e-20);
}

#[test]
fn adaptive_reports_max_iters() {
    let p = build_fredholm(30).unwrap();
    let d = decompose(&p).unwrap();
    let solver = SpectralSolver::new(&p, &d).unwrap();
    let data = add_noise(&p, NoiseSpec { delta: 0.01, seed: 1 }).unwrap();
    let cfg = AdaptiveConfig {
        max_iters: 1,
        ..AdaptiveConfig::default()
    };
    let t = adaptive_select(&solver, &data.b, &cfg).unwrap();
    assert_eq!(t.terminated, Termination::MaxIters);
    assert_eq!(t.iterations(), 1);
}

#[test]
fn fit_alpha_recovers_power_laws() {
    for alpha in [1.5, 2.0, 4.0] {
        for c in [0.1, 1.0, 10.0] {
            let rho: Vec<f64> = (1..=300).map(|k| c * (k as f64).powf(-alpha)).collect();
            let fit = fit_alpha_values(&rho).unwrap();
            assert!((fit.alpha_hat - alpha).abs() < 1e-10);
            assert!((fit.log_c.exp() - c).abs() < 1e-10 * c);
            assert!((fit.c_upper - c).abs() < 1e-10 * c);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spd_solve_inverts_products(n in 1usize..=50, seed in any::<u64>()) {
        let mut s = GaussianStream::new(seed);
        let m = random_spd(n, &mut s);
        let z = s.sample(n);
        let rhs = m.matvec(&z).unwrap();
        let back = spd_solve(&m, &rhs).unwrap();
        let err: Vec<f64> = back.iter().zip(&z).map(|(a, b)| a - b).collect();
        prop_assert!(norm(&err) <= 1e-9 * norm(&z));
    }

    #[test]
    fn sym_eig_preserves_trace_and_orthonormality(n in 1usize..=40, seed in any::<u64>()) {
        let mut s = GaussianStream::new(seed);
        let r = gaussian_matrix(n, n, &mut s);
        let m = DenseMatrix::from_fn(n, n, |i, j| r[(i, j)] + r[(j, i)]);
        let e = sym_eig(&m).unwrap();
        let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
        let sum: f64 = e.values.iter().sum();
        let scale: f64 = e.values.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!((trace - sum).abs() <= 1e-10 * scale);
        let vtv = e.vectors.transpose().matmul(&e.vectors).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((vtv[(i, j)] - expect).abs() <= 1e-10);
            }
        }
        let norm_m = m.frobenius_norm().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let v = e.vector(k);
            let mv = m.matvec(&v).unwrap();
            let r: Vec<f64> = mv.iter().zip(&v).map(|(a, b)| a - e.values[k] * b).collect();
            prop_assert!(norm(&r) <= 1e-8 * norm_m);
        }
    }

    #[test]
    fn w_inner_is_positive_and_symmetric(n in 1usize..=20, seed in any::<u64>()) {
        let mut s = GaussianStream::new(seed);
        let w = WeightSpec::explicit(random_spd(n, &mut s)).unwrap();
        let u = s.sample(n);
        let v = s.sample(n);
        prop_assert!(w_inner(&u, &u, &w).unwrap() > 0.0);
        let uv = w_inner(&u, &v, &w).unwrap();
        let vu = w_inner(&v, &u, &w).unwrap();
        prop_assert!((uv - vu).abs() <= 1e-12 * (1.0 + uv.abs()));
    }

    #[test]
    fn spectral_parseval_and_cauchy_schwarz(n in 3usize..=25, seed in any::<u64>(), weighted in any::<bool>()) {
        let p = random_instance(n, seed, weighted);
        let d = decompose(&p).unwrap();
        let u = GaussianStream::new(seed ^ 0xabc).sample(n);
        let coeffs = d.coefficients(&u, &p.weight).unwrap();
        let au = norm(&p.a.matvec(&u).unwrap());
        let parseval: f64 = coeffs.iter().zip(&d.rho).map(|(c, r)| r * c * c).sum();
        prop_assert!((au * au - parseval).abs() <= 1e-8 * au * au);
        let b = b_seminorm_sq(&d, &u, &p.weight).unwrap();
        let wn = w_inner(&u, &u, &p.weight).unwrap().sqrt();
        prop_assert!(b >= 0.0);
        prop_assert!(b <= wn * au * (1.0 + 1e-8));
    }

    #[test]
    fn prior_rules_are_monotone(
        sigma in 1e-6f64..1.0,
        x_norm in 1e-3f64..10.0,
        factor in 1.01f64..10.0,
        alpha in 1.1f64..6.0,
    ) {
        let base = PriorRuleInput { alpha, n: 1000, sigma, x_norm_w_scaled: x_norm, constant_c: 1.0 };
        let more_noise = PriorRuleInput { sigma: sigma * factor, ..base };
        let bigger_x = PriorRuleInput { x_norm_w_scaled: x_norm * factor, ..base };
        for rule in [prior_rule_w, prior_rule_rho0] {
            let l = rule(&base).unwrap();
            prop_assert!(rule(&more_noise).unwrap() > l);
            prop_assert!(rule(&bigger_x).unwrap() < l);
        }
    }

    #[test]
    fn update_map_is_scale_equivariant(scale in 1e-3f64..1e3, seed in any::<u64>()) {
        let p = random_instance(8, seed, false);
        let scaled = ProblemInstance::new(
            "scaled",
            p.a.clone(),
            p.x_star.iter().map(|v| v * scale).collect(),
            WeightSpec::Identity,
        ).unwrap();
        let b = GaussianStream::new(seed ^ 7).sample(8);
        let cb: Vec<f64> = b.iter().map(|v| v * scale).collect();
        let cfg = AdaptiveConfig::default();
        let lambda = 1e-3;
        let s1 = solve_direct(&p, &b, lambda).unwrap();
        let s2 = solve_direct(&scaled, &cb, lambda).unwrap();
        let sqrt_n = 8f64.sqrt();
        let u1 = adaptive_update(&cfg, 8, s1.residual_b / sqrt_n, s1.w_norm / sqrt_n);
        let u2 = adaptive_update(&cfg, 8, s2.residual_b / sqrt_n, s2.w_norm / sqrt_n);
        prop_assert!((u1 - u2).abs() <= 1e-10 * u1);
    }
}
