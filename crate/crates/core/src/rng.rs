//! Seeded Gaussian noise.
//!
//! Uniforms come from `ChaCha8Rng` seeded with `seed_from_u64`. Standard
//! normals use the Box–Muller transform on consecutive 64-bit draws:
//!
//! ```text
//! u1 = ((x1 >> 11) + 1) · 2⁻⁵³      in (0, 1]
//! u2 =  (x2 >> 11)      · 2⁻⁵³      in [0, 1)
//! z1 = sqrt(-2 ln u1) · cos(2π u2)
//! z2 = sqrt(-2 ln u1) · sin(2π u2)
//! ```
//!
//! Pairs are emitted in order `z1, z2`; a trailing odd variate discards its
//! partner.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// A stream of independent standard normal variates.
pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * TWO_POW_M53;
        let u2 = (self.rng.next_u64() >> 11) as f64 * TWO_POW_M53;
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.next_normal();
        }
    }

    pub fn sample(&mut self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        self.fill(&mut v);
        v
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the noise stream for one Monte Carlo realization, keyed by the
/// master seed, problem size, noise level (in units of 10⁻⁶, rounded) and
/// realization index.
pub fn stream_seed(master: u64, n: usize, delta: f64, rep: u64) -> u64 {
    let delta_key = (delta * 1e6).round() as i64 as u64;
    [n as u64, delta_key, rep]
        .into_iter()
        .fold(splitmix64(master), |h, k| splitmix64(h ^ splitmix64(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a = GaussianStream::new(42).sample(101);
        let b = GaussianStream::new(42).sample(101);
        assert_eq!(a, b);
        assert_ne!(a, GaussianStream::new(43).sample(101));
    }

    #[test]
    fn moments_are_standard() {
        let z = GaussianStream::new(1).sample(200_000);
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let kurt = z.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n / (var * var);
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
        assert!((kurt - 3.0).abs() < 0.05, "kurtosis {kurt}");
    }

    #[test]
    fn stream_seeds_distinguish_every_key() {
        let base = stream_seed(7, 1000, 0.01, 3);
        assert_ne!(base, stream_seed(8, 1000, 0.01, 3));
        assert_ne!(base, stream_seed(7, 2000, 0.01, 3));
        assert_ne!(base, stream_seed(7, 1000, 0.001, 3));
        assert_ne!(base, stream_seed(7, 1000, 0.01, 4));
        assert_eq!(base, stream_seed(7, 1000, 0.010_000_000_1, 3));
    }
}
