//! Randomized Kaczmarz for consistent and noisy linear systems.
//!
//! The crate provides the solver itself, the quantities that govern its
//! convergence (`R`, `gamma` and the noisy threshold `sqrt(R) * gamma`),
//! seeded generators for Gaussian, 0/1 Bernoulli and partial Fourier test
//! matrices, and a multi-trial harness that writes plot-ready CSV.
//!
//! ```
//! use kaczmarz::linalg::DenseMatrix;
//! use kaczmarz::solver::{run, Schedule, SolveConfig};
//!
//! let a = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, -1.0], [0.5, 0.5]])?;
//! let x = [1.0, -1.0];
//! let b = a.mul_vec(&x)?;
//!
//! let schedule = Schedule::randomized(&a)?;
//! let cfg = SolveConfig::new(200, 7);
//! let traj = run(&a, &b, &[0.0, 0.0], &schedule, &cfg, &x)?;
//! assert!(traj.final_error().unwrap() < 1e-8);
//! # Ok::<(), kaczmarz::Error>(())
//! ```

pub mod analysis;
mod error;
pub mod experiment;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod sampling;
pub mod solver;

pub use error::{Error, Result};

// Compile and run the guide's snippets as doc-tests so the book cannot drift
// from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/projection.md")]
    mod projection {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/convergence.md")]
    mod convergence {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
    #[doc = include_str!("../../../book/src/singular-values.md")]
    mod singular_values {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
