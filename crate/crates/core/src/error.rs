use std::io;

use thiserror::Error;

/// Errors produced by the solver, analysis and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("index {index} out of range for {len} rows")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("row {row} is zero; the projection step divides by its squared norm")]
    ZeroRow { row: usize },

    #[error("all row weights are zero; cannot build a row sampler")]
    DegenerateWeights,

    #[error("sampler was built for {sampler_rows} rows but the matrix has {matrix_rows}")]
    SamplerMismatch {
        sampler_rows: usize,
        matrix_rows: usize,
    },

    #[error("matrix is rank deficient (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})")]
    RankDeficient { sigma_min: f64, sigma_max: f64 },

    #[error("Jacobi eigenvalue iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("gamma is undefined: row {row} is zero but carries noise")]
    UndefinedGamma { row: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid ensemble specification: {0}")]
    InvalidSpec(String),

    #[error("reference vector is zero")]
    ZeroVector,

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
