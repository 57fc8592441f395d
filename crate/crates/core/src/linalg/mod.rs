//! Dense real/complex matrices, inner products and norms, and the Gram
//! eigen-decomposition behind singular values and least squares.

mod gram;
mod matrix;
mod scalar;

pub use gram::{
    jacobi_eigen, least_squares, sigma_extremes, GramSpectrum, HermitianEigen, SigmaPair,
    JACOBI_MAX_SWEEPS, JACOBI_OFF_DIAGONAL_TOL, RANK_TOL,
};
pub(crate) use matrix::inner_unchecked;
pub use matrix::{distance, inner, norm, norm_sq, AnyMatrix, AnyVector, DenseMatrix};
pub use scalar::{Field, Scalar};
pub use num_complex::Complex64;
