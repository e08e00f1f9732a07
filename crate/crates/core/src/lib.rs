//! Weighted Tikhonov regularization for discrete ill-posed problems with
//! random noise.
//!
//! The crate solves `min ‖Ax − b‖² + λ‖x‖²_W` through the normal equations
//! or the generalized eigenbasis of `(AᵀA, W)`, chooses `λ` by a-priori
//! rules or by an adaptive fixed-point iteration, and drives the Monte
//! Carlo experiments that check the resulting convergence rates.
//!
//! ```
//! use tikhreg::{problems, spectral, tikhonov};
//!
//! let p = problems::build_fredholm(64).unwrap();
//! let data = problems::add_noise(&p, problems::NoiseSpec { delta: 0.01, seed: 7 }).unwrap();
//! let d = spectral::decompose(&p).unwrap();
//! let x = tikhonov::solve_spectral(&d, &p, &data.b, 1e-7).unwrap();
//! let y = tikhonov::solve_direct(&p, &data.b, 1e-7).unwrap();
//! assert!(x.x.iter().zip(&y.x).all(|(a, b)| (a - b).abs() < 1e-6));
//! ```

pub mod error;
pub mod export;
pub mod harness;
pub mod linalg;
pub mod params;
pub mod probfile;
pub mod problems;
pub mod rng;
pub mod spectral;
pub mod tikhonov;

pub use error::{Result, TikhError};
pub use linalg::{DenseMatrix, WeightSpec};
pub use problems::{NoiseSpec, NoisyData, ProblemInstance};
pub use spectral::{AlphaFit, SpectralDecomposition};
pub use tikhonov::{ErrorReport, RegularizedSolution};
