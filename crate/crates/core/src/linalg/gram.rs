//! Extreme singular values and least-squares solves through the Hermitian
//! Gram matrix `A* A`.
//!
//! The Gram matrix is diagonalized with cyclic Jacobi rotations. For complex
//! input each rotation is preceded by a diagonal phase change that makes the
//! pivot entry real, after which an ordinary real Givens rotation annihilates
//! it. Singular values of `A` are the square roots of the Gram eigenvalues.

use super::matrix::{check_len, norm_sq, DenseMatrix};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Sweeps stop once the off-diagonal Frobenius norm falls to this fraction of
/// the Gram matrix's Frobenius norm.
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-14;

pub const JACOBI_MAX_SWEEPS: usize = 30;

/// `sigma_min^2 < RANK_TOL * sigma_max^2` is treated as rank deficiency.
pub const RANK_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaPair {
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl SigmaPair {
    pub fn is_rank_deficient(&self) -> bool {
        self.sigma_max == 0.0 || self.sigma_min.powi(2) < RANK_TOL * self.sigma_max.powi(2)
    }

    /// Returns the pair unchanged when the matrix has full column rank.
    pub fn full_rank(self) -> Result<Self> {
        if self.is_rank_deficient() {
            Err(Error::RankDeficient {
                sigma_min: self.sigma_min,
                sigma_max: self.sigma_max,
            })
        } else {
            Ok(self)
        }
    }

    /// `sigma_max / sigma_min`.
    pub fn kappa(&self) -> f64 {
        self.sigma_max / self.sigma_min
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: DenseMatrix<T>,
    pub sweeps: usize,
}

fn off_diagonal_sq<T: Scalar>(h: &[T], n: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += h[p * n + q].abs_sq();
            }
        }
    }
    s
}

/// Cyclic Jacobi eigen-decomposition of a Hermitian matrix.
///
/// Only the Hermitian part is trusted: the input is expected to satisfy
/// `h[p][q] == conj(h[q][p])` with real diagonal.
pub fn jacobi_eigen<T: Scalar>(h: &DenseMatrix<T>) -> Result<HermitianEigen<T>> {
    let n = h.rows();
    check_len("Hermitian matrix", n, h.cols())?;
    let mut a = h.as_slice().to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }

    let target = JACOBI_OFF_DIAGONAL_TOL * norm_sq(&a).sqrt();
    let mut sweeps = 0;
    loop {
        if off_diagonal_sq(&a, n).sqrt() <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re()).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, k| v[r * n + order[k]])?;
    Ok(HermitianEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Annihilates the `(p, q)` entry of the Hermitian matrix `a` (row-major,
/// `n x n`) and accumulates the transformation into `v`.
fn rotate<T: Scalar>(a: &mut [T], v: &mut [T], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let mag = apq.abs();
    if mag == 0.0 {
        return;
    }
    // Phase change on coordinate q makes the pivot real and positive.
    let phase = apq.scale(1.0 / mag);
    let phase_conj = phase.conj();

    let app = a[p * n + p].re();
    let aqq = a[q * n + q].re();
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[r * n + p];
        let arq = a[r * n + q] * phase_conj;
        let new_rp = arp.scale(c) - arq.scale(s);
        let new_rq = arp.scale(s) + arq.scale(c);
        a[r * n + p] = new_rp;
        a[p * n + r] = new_rp.conj();
        a[r * n + q] = new_rq;
        a[q * n + r] = new_rq.conj();
    }
    a[p * n + p] = T::from_real(app - t * mag);
    a[q * n + q] = T::from_real(aqq + t * mag);
    a[p * n + q] = T::zero();
    a[q * n + p] = T::zero();

    for r in 0..n {
        let vrp = v[r * n + p];
        let vrq = v[r * n + q] * phase_conj;
        v[r * n + p] = vrp.scale(c) - vrq.scale(s);
        v[r * n + q] = vrp.scale(s) + vrq.scale(c);
    }
}

/// Eigen-decomposition of `A* A` for a fixed `A`, reused for singular values
/// and least-squares solves.
#[derive(Clone, Debug)]
pub struct GramSpectrum<T> {
    eigen: HermitianEigen<T>,
}

impl<T: Scalar> GramSpectrum<T> {
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        Ok(GramSpectrum {
            eigen: jacobi_eigen(&a.gram())?,
        })
    }

    pub fn eigen(&self) -> &HermitianEigen<T> {
        &self.eigen
    }

    pub fn sigmas(&self) -> SigmaPair {
        let vals = &self.eigen.values;
        let lo = vals.first().copied().unwrap_or(0.0).max(0.0);
        let hi = vals.last().copied().unwrap_or(0.0).max(0.0);
        SigmaPair {
            sigma_min: lo.sqrt(),
            sigma_max: hi.sqrt(),
        }
    }

    /// Solves `(A* A) x = y` through the eigen-decomposition.
    pub fn solve_normal(&self, y: &[T]) -> Result<Vec<T>> {
        self.sigmas().full_rank()?;
        let vecs = &self.eigen.vectors;
        let n = vecs.rows();
        check_len("normal equations", n, y.len())?;
        let mut x = vec![T::zero(); n];
        for (k, &lambda) in self.eigen.values.iter().enumerate() {
            // coefficient of y along eigenvector k
            let mut coeff = T::zero();
            for r in 0..n {
                coeff += vecs.get(r, k).conj() * y[r];
            }
            let coeff = coeff.scale(1.0 / lambda);
            for r in 0..n {
                x[r] += vecs.get(r, k) * coeff;
            }
        }
        Ok(x)
    }
}

/// Smallest and largest singular values of `A`.
///
/// A rank-deficient matrix is reported through [`SigmaPair::is_rank_deficient`]
/// rather than as an error.
pub fn sigma_extremes<T: Scalar>(a: &DenseMatrix<T>) -> Result<SigmaPair> {
    Ok(GramSpectrum::new(a)?.sigmas())
}

/// Minimizer of `||A v - c||_2`, i.e. `(A* A)^{-1} A* c`.
pub fn least_squares<T: Scalar>(a: &DenseMatrix<T>, c: &[T]) -> Result<Vec<T>> {
    let rhs = a.adjoint_mul_vec(c)?;
    GramSpectrum::new(a)?.solve_normal(&rhs)
}
