//! The Kaczmarz projection step and the cyclic / randomized solve loops.
//!
//! One iteration projects the current iterate orthogonally onto the
//! hyperplane `{x : <a_i, x> = b_i}` of a single row:
//!
//! ```text
//! x_{k+1} = x_k + (b_i - <a_i, x_k>) / ||a_i||^2 * a_i
//! ```
//!
//! The cyclic schedule visits rows `0, 1, ..., m-1, 0, ...`; the randomized
//! schedule draws row `i` with probability `||a_i||^2 / ||A||_F^2`. Row norms
//! are computed once per solve, an `O(mn)` pass that dominates setup cost.
//!
//! There is no convergence test. With a noisy right-hand side the system is
//! generally inconsistent and the iterates settle into a neighbourhood of the
//! solution rather than a point, so every run uses a fixed iteration budget.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{distance, inner_unchecked, norm, DenseMatrix, Scalar};
use crate::sampling::{RngStream, RowSampler};

/// Row selection rule.
#[derive(Clone, Debug)]
pub enum Schedule {
    /// Row `k mod m` at iteration `k`.
    Cyclic,
    /// Rows drawn independently in proportion to their squared norms.
    Randomized(RowSampler),
}

impl Schedule {
    /// Randomized schedule for `a`. Zero rows are rejected here even though
    /// the sampler itself would simply never draw them.
    pub fn randomized<T: Scalar>(a: &DenseMatrix<T>) -> Result<Self> {
        if let Some(row) = a.row_iter().position(|r| r.iter().all(|x| x.abs_sq() == 0.0)) {
            return Err(Error::ZeroRow { row });
        }
        Ok(Schedule::Randomized(RowSampler::from_matrix(a)?))
    }
}

/// What the trajectory records at each checkpoint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ErrorMetric {
    /// `||x_k - x_ref||_2`.
    #[default]
    Reference,
    /// `||A x_k - rhs||_2`; `x_ref` is ignored.
    Residual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveConfig {
    pub max_iters: usize,
    pub record_every: usize,
    pub seed: u64,
    pub stream: u64,
    pub metric: ErrorMetric,
}

impl SolveConfig {
    pub fn new(max_iters: usize, seed: u64) -> Self {
        SolveConfig {
            max_iters,
            record_every: 1,
            seed,
            stream: 0,
            metric: ErrorMetric::Reference,
        }
    }

    pub fn record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn metric(mut self, metric: ErrorMetric) -> Self {
        self.metric = metric;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Record {
    pub iter: usize,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub records: Vec<Record>,
    pub final_x: Vec<T>,
    pub rows_visited: usize,
}

impl<T> Trajectory<T> {
    pub fn final_error(&self) -> Option<f64> {
        self.records.last().map(|r| r.error)
    }
}

/// One Kaczmarz projection of `x` onto `{v : <a_i, v> = b_i}`.
pub fn project_row<T: Scalar>(x: &[T], a: &DenseMatrix<T>, i: usize, b_i: T) -> Result<Vec<T>> {
    let row = a.try_row(i)?;
    if row.len() != x.len() {
        return Err(Error::DimensionMismatch {
            context: "iterate",
            expected: row.len(),
            found: x.len(),
        });
    }
    let row_norm_sq = a.row_norm_sq(i)?;
    if row_norm_sq == 0.0 {
        return Err(Error::ZeroRow { row: i });
    }
    let mut out = x.to_vec();
    project_in_place(&mut out, row, row_norm_sq, b_i);
    Ok(out)
}

#[inline]
fn project_in_place<T: Scalar>(x: &mut [T], row: &[T], row_norm_sq: f64, b_i: T) {
    let coeff = (b_i - inner_unchecked(row, x)).scale(1.0 / row_norm_sq);
    for (xj, &aj) in x.iter_mut().zip(row) {
        *xj += aj * coeff;
    }
}

fn measure<T: Scalar>(
    metric: ErrorMetric,
    a: &DenseMatrix<T>,
    rhs: &[T],
    x: &[T],
    x_ref: &[T],
) -> f64 {
    match metric {
        ErrorMetric::Reference => distance(x, x_ref),
        ErrorMetric::Residual => {
            let ax = a.mul_vec(x).expect("iterate length checked at entry");
            distance(&ax, rhs)
        }
    }
}

/// Runs `cfg.max_iters` projections from `x0` and records the error every
/// `cfg.record_every` iterations, starting with `k = 0`.
///
/// For a noisy solve pass `rhs = b + r` and the unperturbed solution as
/// `x_ref`.
pub fn run<T: Scalar>(
    a: &DenseMatrix<T>,
    rhs: &[T],
    x0: &[T],
    schedule: &Schedule,
    cfg: &SolveConfig,
    x_ref: &[T],
) -> Result<Trajectory<T>> {
    let (m, n) = (a.rows(), a.cols());
    for (context, expected, found) in [
        ("right-hand side", m, rhs.len()),
        ("initial iterate", n, x0.len()),
        ("reference solution", n, x_ref.len()),
    ] {
        if expected != found {
            return Err(Error::DimensionMismatch {
                context,
                expected,
                found,
            });
        }
    }
    if cfg.record_every == 0 {
        return Err(Error::Domain("record_every must be at least 1".into()));
    }
    if let Schedule::Randomized(s) = schedule {
        if s.len() != m {
            return Err(Error::SamplerMismatch {
                sampler_rows: s.len(),
                matrix_rows: m,
            });
        }
    }

    let row_norms = a.row_norms_sq();
    let mut rng = RngStream::new(cfg.seed, cfg.stream);
    let mut x = x0.to_vec();
    let mut records = Vec::with_capacity(1 + cfg.max_iters / cfg.record_every);
    records.push(Record {
        iter: 0,
        error: measure(cfg.metric, a, rhs, &x, x_ref),
    });

    for k in 0..cfg.max_iters {
        let i = match schedule {
            Schedule::Cyclic => k % m,
            Schedule::Randomized(s) => s.draw(&mut rng),
        };
        let nsq = row_norms[i];
        if nsq == 0.0 {
            return Err(Error::ZeroRow { row: i });
        }
        project_in_place(&mut x, a.row(i), nsq, rhs[i]);

        let done = k + 1;
        if done % cfg.record_every == 0 {
            records.push(Record {
                iter: done,
                error: measure(cfg.metric, a, rhs, &x, x_ref),
            });
        }
    }

    Ok(Trajectory {
        records,
        final_x: x,
        rows_visited: cfg.max_iters,
    })
}

/// Independent randomized trials of [`run`]; trial `t` (1-based) uses stream
/// id `t`. The result depends only on the inputs, never on scheduling.
pub fn run_batch<T: Scalar>(
    a: &DenseMatrix<T>,
    rhs: &[T],
    x0: &[T],
    schedule: &Schedule,
    cfg: &SolveConfig,
    x_ref: &[T],
    trials: usize,
) -> Result<Vec<Trajectory<T>>> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    (1..=trials as u64)
        .into_par_iter()
        .map(|t| run(a, rhs, x0, schedule, &cfg.stream(t), x_ref))
        .collect()
}

/// `||x||_2` of the final iterate of each trajectory, averaged.
pub fn mean_final_error<T: Scalar>(batch: &[Trajectory<T>], x_ref: &[T]) -> f64 {
    batch
        .iter()
        .map(|t| distance(&t.final_x, x_ref))
        .sum::<f64>()
        / batch.len() as f64
}

/// Residual norm `||A x - rhs||_2`.
pub fn residual_norm<T: Scalar>(a: &DenseMatrix<T>, x: &[T], rhs: &[T]) -> Result<f64> {
    let ax = a.mul_vec(x)?;
    if ax.len() != rhs.len() {
        return Err(Error::DimensionMismatch {
            context: "right-hand side",
            expected: ax.len(),
            found: rhs.len(),
        });
    }
    Ok(norm(&ax.iter().zip(rhs).map(|(&p, &q)| p - q).collect::<Vec<_>>()))
}
