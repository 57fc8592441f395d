//! Convergence theory for randomized Kaczmarz.
//!
//! * `R = ||A^{-1}||^2 ||A||_F^2 = ||A||_F^2 / sigma_min^2` sets the expected
//!   contraction `(1 - 1/R)` of the squared error per iteration on a
//!   consistent system.
//! * `gamma = max_i |r_i| / ||a_i||` measures a right-hand side perturbation
//!   `r` relative to the rows it shifts.
//! * With noise the expected error obeys
//!   `E||x_k - x|| <= (1 - 1/R)^{k/2} ||x_0 - x|| + sqrt(R) gamma`, so the
//!   iterates reach the threshold `sqrt(R) gamma` at the noiseless rate.

use crate::error::{Error, Result};
use crate::linalg::{distance, least_squares, norm, sigma_extremes, DenseMatrix, Scalar, SigmaPair};

/// Theoretical quantities for a matrix and an optional noise vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisReport {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub kappa: f64,
    pub r: f64,
    pub gamma: f64,
    /// `sqrt(R) * gamma`.
    pub threshold: f64,
    pub frobenius_sq: f64,
}

impl AnalysisReport {
    pub fn new<T: Scalar>(a: &DenseMatrix<T>, noise: Option<&[T]>) -> Result<Self> {
        let sigmas = sigma_extremes(a)?.full_rank()?;
        Self::from_parts(a, sigmas, noise)
    }

    fn from_parts<T: Scalar>(a: &DenseMatrix<T>, sigmas: SigmaPair, noise: Option<&[T]>) -> Result<Self> {
        let frobenius_sq = a.frobenius_sq();
        let r = frobenius_sq / sigmas.sigma_min.powi(2);
        let gamma = match noise {
            Some(noise) => compute_gamma(a, noise)?,
            None => 0.0,
        };
        Ok(AnalysisReport {
            sigma_min: sigmas.sigma_min,
            sigma_max: sigmas.sigma_max,
            kappa: sigmas.kappa(),
            r,
            gamma,
            threshold: r.sqrt() * gamma,
            frobenius_sq,
        })
    }

    pub fn noisy_bound(&self, init_err: f64, k: usize) -> Result<f64> {
        noisy_bound(self.r, self.gamma, init_err, k)
    }
}

/// `||A||_F^2 / sigma_min(A)^2`. Fails on rank-deficient input.
pub fn compute_r<T: Scalar>(a: &DenseMatrix<T>) -> Result<f64> {
    let s = sigma_extremes(a)?.full_rank()?;
    Ok(a.frobenius_sq() / s.sigma_min.powi(2))
}

/// `max_i |r_i| / ||a_i||`. A zero row is only allowed where `r_i = 0`.
pub fn compute_gamma<T: Scalar>(a: &DenseMatrix<T>, noise: &[T]) -> Result<f64> {
    if noise.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            context: "noise vector",
            expected: a.rows(),
            found: noise.len(),
        });
    }
    let mut gamma = 0.0_f64;
    for (i, (row_sq, &ri)) in a.row_norms_sq().into_iter().zip(noise).enumerate() {
        let mag = ri.abs();
        if row_sq == 0.0 {
            if mag != 0.0 {
                return Err(Error::UndefinedGamma { row: i });
            }
            continue;
        }
        gamma = gamma.max(mag / row_sq.sqrt());
    }
    Ok(gamma)
}

fn check_rate(r: f64) -> Result<()> {
    if !r.is_finite() || r <= 1.0 {
        return Err(Error::Domain(format!(
            "the rate bound needs R > 1 (got {r}); R = 1 means one-step convergence"
        )));
    }
    Ok(())
}

/// `(1 - 1/R)^{k/2} * init_err + sqrt(R) * gamma`, with `init_err = ||x_0 - x||`.
pub fn noisy_bound(r: f64, gamma: f64, init_err: f64, k: usize) -> Result<f64> {
    check_rate(r)?;
    if gamma < 0.0 || init_err < 0.0 {
        return Err(Error::Domain("gamma and init_err must be nonnegative".into()));
    }
    let contraction = (1.0 - 1.0 / r).sqrt().powf(k as f64);
    Ok(contraction * init_err + r.sqrt() * gamma)
}

/// `(1 - 1/R)^k * init_err_sq`, the expected squared error on a consistent
/// system with `init_err_sq = ||x_0 - x||^2`.
pub fn noiseless_bound(r: f64, init_err_sq: f64, k: usize) -> Result<f64> {
    check_rate(r)?;
    if init_err_sq < 0.0 {
        return Err(Error::Domain("init_err_sq must be nonnegative".into()));
    }
    Ok((1.0 - 1.0 / r).powf(k as f64) * init_err_sq)
}

/// Relative error of the least-squares solution under noise, next to the
/// classical perturbation bound and the bound implied by the Kaczmarz
/// threshold through `sqrt(R) <= kappa sqrt(n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationDiagnostic {
    /// `||x - x_hat|| / ||x||` with `x_hat = A^+ (A x + r)`.
    pub lhs: f64,
    /// `kappa ||r|| / ||A x||`.
    pub rhs_classical: f64,
    /// `kappa max_i sqrt(n) |r_i| / (||a_i|| ||x||)`.
    pub rhs_kaczmarz: f64,
}

pub fn perturbation_diagnostic<T: Scalar>(
    a: &DenseMatrix<T>,
    noise: &[T],
    x: &[T],
) -> Result<PerturbationDiagnostic> {
    let x_norm = norm(x);
    if x_norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let kappa = sigma_extremes(a)?.full_rank()?.kappa();
    let b = a.mul_vec(x)?;
    if noise.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "noise vector",
            expected: b.len(),
            found: noise.len(),
        });
    }
    let perturbed: Vec<T> = b.iter().zip(noise).map(|(&bi, &ri)| bi + ri).collect();
    let x_hat = least_squares(a, &perturbed)?;
    let gamma = compute_gamma(a, noise)?;
    let n = a.cols() as f64;
    Ok(PerturbationDiagnostic {
        lhs: distance(x, &x_hat) / x_norm,
        rhs_classical: kappa * norm(noise) / norm(&b),
        rhs_kaczmarz: kappa * n.sqrt() * gamma / x_norm,
    })
}
