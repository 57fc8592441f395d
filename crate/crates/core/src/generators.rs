//! Seeded test-matrix ensembles and fixed-norm noise.
//!
//! Normal variates come from `rand_distr::StandardNormal` (a ziggurat
//! sampler) driven by [`RngStream`]; uniforms use the stream's 53-bit
//! `[0, 1)` draw. Both are pinned through `Cargo.lock`, so a given
//! `(seed, stream)` always produces the same matrix.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{norm, AnyMatrix, Complex64, DenseMatrix, Field, Scalar};
use crate::sampling::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnsembleKind {
    /// i.i.d. standard normal entries.
    Gaussian,
    /// i.i.d. entries equal to 0 or 1 with probability 1/2 each.
    Bernoulli01,
    /// `exp(2 pi i k t_j)` for uniform sample points `t_j` and centred
    /// integer frequencies `k`.
    PartialFourier,
}

impl EnsembleKind {
    pub fn field(self) -> Field {
        match self {
            EnsembleKind::PartialFourier => Field::Complex,
            _ => Field::Real,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EnsembleKind::Gaussian => "gaussian",
            EnsembleKind::Bernoulli01 => "bernoulli",
            EnsembleKind::PartialFourier => "fourier",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(EnsembleKind::Gaussian),
            "bernoulli" | "bernoulli01" => Ok(EnsembleKind::Bernoulli01),
            "fourier" | "partial_fourier" | "partial-fourier" => Ok(EnsembleKind::PartialFourier),
            other => Err(Error::InvalidSpec(format!("unknown ensemble kind `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub stream: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, m: usize, n: usize, seed: u64) -> Self {
        EnsembleSpec {
            kind,
            m,
            n,
            seed,
            stream: 0,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m < self.n {
            return Err(Error::InvalidSpec(format!(
                "need m >= n >= 1, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if self.kind == EnsembleKind::PartialFourier && self.n % 2 == 0 {
            return Err(Error::InvalidSpec(format!(
                "partial Fourier matrices need an odd column count, got n = {}",
                self.n
            )));
        }
        Ok(())
    }

    fn rng(&self) -> RngStream {
        RngStream::new(self.seed, self.stream)
    }

    fn expect_kind(&self, kind: EnsembleKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidSpec(format!(
                "expected a {kind} spec, got {}",
                self.kind
            )));
        }
        self.validate()
    }
}

pub fn gen_gaussian(spec: &EnsembleSpec) -> Result<DenseMatrix<f64>> {
    spec.expect_kind(EnsembleKind::Gaussian)?;
    let mut rng = spec.rng();
    DenseMatrix::from_fn(spec.m, spec.n, |_, _| rng.sample(StandardNormal))
}

pub fn gen_bernoulli01(spec: &EnsembleSpec) -> Result<DenseMatrix<f64>> {
    spec.expect_kind(EnsembleKind::Bernoulli01)?;
    let mut rng = spec.rng();
    DenseMatrix::from_fn(spec.m, spec.n, |_, _| if rng.uniform() < 0.5 { 1.0 } else { 0.0 })
}

/// Row `j` holds `exp(2 pi i k t_j)` for `k = -(n-1)/2 ..= (n-1)/2` in
/// ascending order, with `t_j` uniform on `[0, 1)`.
pub fn gen_partial_fourier(spec: &EnsembleSpec) -> Result<DenseMatrix<Complex64>> {
    spec.expect_kind(EnsembleKind::PartialFourier)?;
    let mut rng = spec.rng();
    let half = (spec.n as i64 - 1) / 2;
    let mut data = Vec::with_capacity(spec.m * spec.n);
    for _ in 0..spec.m {
        let t = rng.uniform();
        for k in -half..=half {
            data.push(Complex64::cis(TAU * k as f64 * t));
        }
    }
    DenseMatrix::from_row_major(spec.m, spec.n, data)
}

pub fn generate(spec: &EnsembleSpec) -> Result<AnyMatrix> {
    Ok(match spec.kind {
        EnsembleKind::Gaussian => gen_gaussian(spec)?.into(),
        EnsembleKind::Bernoulli01 => gen_bernoulli01(spec)?.into(),
        EnsembleKind::PartialFourier => gen_partial_fourier(spec)?.into(),
    })
}

/// Whether noise for a complex system gets an imaginary part.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NoiseKind {
    /// Real noise for real systems, i.i.d. real and imaginary parts for complex ones.
    #[default]
    MatchField,
    /// Real-valued noise regardless of field.
    Real,
}

/// A standard Gaussian vector rescaled to Euclidean norm exactly `target`.
pub fn gen_noise<T: Scalar>(len: usize, target: f64, kind: NoiseKind, rng: &mut RngStream) -> Result<Vec<T>> {
    if !target.is_finite() || target < 0.0 {
        return Err(Error::Domain(format!("noise norm must be finite and >= 0, got {target}")));
    }
    if target == 0.0 {
        return Ok(vec![T::zero(); len]);
    }
    let complex = T::FIELD == Field::Complex && kind == NoiseKind::MatchField;
    loop {
        let v: Vec<T> = (0..len)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
                T::from_parts(re, im)
            })
            .collect();
        let len_now = norm(&v);
        if len_now > 0.0 {
            let s = target / len_now;
            return Ok(v.into_iter().map(|x| x.scale(s)).collect());
        }
    }
}

/// Uniformly distributed direction on the unit sphere of the field.
pub fn random_unit<T: Scalar>(len: usize, rng: &mut RngStream) -> Result<Vec<T>> {
    gen_noise(len, 1.0, NoiseKind::MatchField, rng)
}
