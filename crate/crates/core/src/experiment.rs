//! Multi-trial noisy-system experiments and their CSV output.
//!
//! Each trial draws a fresh matrix, a fresh noise vector of fixed norm and a
//! random initial iterate, then runs the randomized solver on the
//! homogeneous system `A x = 0` perturbed to `A x ~ r`. The true solution is
//! therefore `x = 0` and the recorded error is simply `||x_k||`.
//!
//! All randomness for trial `t` comes from `master_seed` on four stream ids
//! derived from `t`, so results do not depend on how trials are scheduled.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::analysis::{noisy_bound, AnalysisReport};
use crate::error::{Error, Result};
use crate::generators::{gen_bernoulli01, gen_gaussian, gen_noise, gen_partial_fourier, random_unit, EnsembleKind, EnsembleSpec, NoiseKind};
use crate::io::{atomic_write, fmt_f64};
use crate::linalg::{norm, DenseMatrix, Scalar};
use crate::sampling::RngStream;
use crate::solver::{run, Schedule, SolveConfig};

/// Iteration budget used when none is given.
pub const DEFAULT_ITERS: usize = 6000;
pub const DEFAULT_NOISE_NORM: f64 = 0.02;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_RECORD_EVERY: usize = 100;

pub const SUMMARY_HEADER: &str = "trial,R,gamma,threshold,final_error";
pub const TRAJECTORY_HEADER: &str = "trial,iter,error,noisy_bound";

/// What a random stream within a trial is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Matrix = 0,
    Noise = 1,
    Start = 2,
    Rows = 3,
}

/// Stream id for one source of randomness within trial `t`.
pub fn stream_for(trial: u64, purpose: Purpose) -> u64 {
    (trial << 2) | purpose as u64
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub kind: EnsembleKind,
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    pub iters: usize,
    pub record_every: usize,
    pub noise_norm: f64,
    pub noise_kind: NoiseKind,
    /// Norm of the random initial iterate (the solution is zero).
    pub init_norm: f64,
    pub master_seed: u64,
}

impl ExperimentSpec {
    /// Defaults for an ensemble: 2000 x 100 for the real ensembles,
    /// 700 x 101 for partial Fourier.
    pub fn new(kind: EnsembleKind) -> Self {
        let (m, n) = match kind {
            EnsembleKind::PartialFourier => (700, 101),
            _ => (2000, 100),
        };
        ExperimentSpec {
            kind,
            m,
            n,
            trials: DEFAULT_TRIALS,
            iters: DEFAULT_ITERS,
            record_every: DEFAULT_RECORD_EVERY,
            noise_norm: DEFAULT_NOISE_NORM,
            noise_kind: NoiseKind::MatchField,
            init_norm: 1.0,
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.iters == 0 || self.record_every == 0 {
            return Err(Error::Domain(
                "trials, iters and record_every must all be at least 1".into(),
            ));
        }
        if !self.init_norm.is_finite() || self.init_norm < 0.0 {
            return Err(Error::Domain(format!("invalid init norm {}", self.init_norm)));
        }
        self.ensemble(1).validate()
    }

    pub fn ensemble(&self, trial: u64) -> EnsembleSpec {
        EnsembleSpec::new(self.kind, self.m, self.n, self.master_seed)
            .with_stream(stream_for(trial, Purpose::Matrix))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialSummary {
    pub trial: usize,
    pub r: f64,
    pub gamma: f64,
    pub threshold: f64,
    pub final_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub iter: usize,
    pub error: f64,
    pub noisy_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub summary: TrialSummary,
    pub points: Vec<TrajectoryPoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub trials: Vec<TrialOutcome>,
}

impl ExperimentResult {
    pub fn summaries(&self) -> impl Iterator<Item = &TrialSummary> + '_ {
        self.trials.iter().map(|t| &t.summary)
    }

    pub fn mean_r(&self) -> f64 {
        mean(self.summaries().map(|s| s.r))
    }

    pub fn mean_threshold(&self) -> f64 {
        mean(self.summaries().map(|s| s.threshold))
    }

    pub fn mean_final_error(&self) -> f64 {
        mean(self.summaries().map(|s| s.final_error))
    }

    /// Fraction of trials with `final_error <= threshold * (1 + slack)`.
    pub fn fraction_within(&self, slack: f64) -> f64 {
        let hits = self
            .summaries()
            .filter(|s| s.final_error <= s.threshold * (1.0 + slack))
            .count();
        hits as f64 / self.trials.len() as f64
    }

    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{SUMMARY_HEADER}")?;
        for s in self.summaries() {
            writeln!(
                w,
                "{},{},{},{},{}",
                s.trial,
                fmt_f64(s.r),
                fmt_f64(s.gamma),
                fmt_f64(s.threshold),
                fmt_f64(s.final_error)
            )?;
        }
        Ok(())
    }

    pub fn write_trajectories_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{TRAJECTORY_HEADER}")?;
        for t in &self.trials {
            write_trajectory_rows(&mut w, t.summary.trial, &t.points)?;
        }
        Ok(())
    }

    /// Writes `summary.csv` and `trajectories.csv` into `dir`. Either both
    /// files are written or neither is left behind.
    pub fn write_outputs(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let summary = dir.join("summary.csv");
        let traj = dir.join("trajectories.csv");
        atomic_write(&summary, |w| self.write_summary_csv(w))?;
        if let Err(e) = atomic_write(&traj, |w| self.write_trajectories_csv(w)) {
            let _ = fs::remove_file(&summary);
            return Err(e);
        }
        Ok((summary, traj))
    }
}

pub fn write_trajectory_rows<W: Write>(mut w: W, trial: usize, points: &[TrajectoryPoint]) -> io::Result<()> {
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            trial,
            p.iter,
            fmt_f64(p.error),
            fmt_f64(p.noisy_bound)
        )?;
    }
    Ok(())
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    sum / count as f64
}

/// Runs the noisy homogeneous solve on one matrix and attaches the bound curve.
pub fn noisy_trial<T: Scalar>(
    a: &DenseMatrix<T>,
    spec: &ExperimentSpec,
    trial: u64,
) -> Result<TrialOutcome> {
    let (m, n) = (a.rows(), a.cols());
    let seed = spec.master_seed;
    let noise: Vec<T> = gen_noise(
        m,
        spec.noise_norm,
        spec.noise_kind,
        &mut RngStream::new(seed, stream_for(trial, Purpose::Noise)),
    )?;
    let x0: Vec<T> = random_unit::<T>(n, &mut RngStream::new(seed, stream_for(trial, Purpose::Start)))?
        .into_iter()
        .map(|x| x.scale(spec.init_norm))
        .collect();
    let solution = vec![T::zero(); n];

    let report = AnalysisReport::new(a, Some(&noise))?;
    let schedule = Schedule::randomized(a)?;
    let cfg = SolveConfig::new(spec.iters, seed)
        .record_every(spec.record_every)
        .stream(stream_for(trial, Purpose::Rows));
    let traj = run(a, &noise, &x0, &schedule, &cfg, &solution)?;

    let init_err = norm(&x0);
    let points = traj
        .records
        .iter()
        .map(|rec| {
            Ok(TrajectoryPoint {
                iter: rec.iter,
                error: rec.error,
                noisy_bound: noisy_bound(report.r, report.gamma, init_err, rec.iter)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(TrialOutcome {
        summary: TrialSummary {
            trial: trial as usize,
            r: report.r,
            gamma: report.gamma,
            threshold: report.threshold,
            final_error: norm(&traj.final_x),
        },
        points,
    })
}

fn one_trial(spec: &ExperimentSpec, trial: u64) -> Result<TrialOutcome> {
    let ens = spec.ensemble(trial);
    match spec.kind {
        EnsembleKind::Gaussian => noisy_trial(&gen_gaussian(&ens)?, spec, trial),
        EnsembleKind::Bernoulli01 => noisy_trial(&gen_bernoulli01(&ens)?, spec, trial),
        EnsembleKind::PartialFourier => noisy_trial(&gen_partial_fourier(&ens)?, spec, trial),
    }
}

/// Runs every trial (in parallel) and collects the results in trial order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let trials = (1..=spec.trials as u64)
        .into_par_iter()
        .map(|t| one_trial(spec, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult { trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: EnsembleKind) -> ExperimentSpec {
        ExperimentSpec {
            m: 60,
            n: if kind == EnsembleKind::PartialFourier { 11 } else { 10 },
            trials: 4,
            iters: 500,
            record_every: 50,
            master_seed: 17,
            ..ExperimentSpec::new(kind)
        }
    }

    #[test]
    fn stream_ids_do_not_collide() {
        let mut ids = std::collections::HashSet::new();
        for t in 1..=200u64 {
            for p in [Purpose::Matrix, Purpose::Noise, Purpose::Start, Purpose::Rows] {
                assert!(ids.insert(stream_for(t, p)));
            }
        }
    }

    #[test]
    fn one_record_per_trial_and_aggregate_mean() {
        let res = run_experiment(&small(EnsembleKind::Gaussian)).unwrap();
        assert_eq!(res.trials.len(), 4);
        let ids: Vec<_> = res.summaries().map(|s| s.trial).collect();
        assert_eq!(ids, vec![1, 2, 3, 4]);
        let manual = res.summaries().map(|s| s.r).sum::<f64>() / 4.0;
        assert!((res.mean_r() - manual).abs() <= 1e-12 * manual);
        for t in &res.trials {
            assert_eq!(t.points.len(), 1 + 500 / 50);
            assert_eq!(t.points[0].iter, 0);
            assert!((t.points[0].error - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_row_counts() {
        let res = run_experiment(&small(EnsembleKind::PartialFourier)).unwrap();
        let mut s = Vec::new();
        res.write_summary_csv(&mut s).unwrap();
        let mut t = Vec::new();
        res.write_trajectories_csv(&mut t).unwrap();
        let s = String::from_utf8(s).unwrap();
        let t = String::from_utf8(t).unwrap();
        assert_eq!(s.lines().next(), Some(SUMMARY_HEADER));
        assert_eq!(t.lines().next(), Some(TRAJECTORY_HEADER));
        assert_eq!(s.lines().count(), 1 + 4);
        assert_eq!(t.lines().count(), 1 + 4 * (1 + 500 / 50));
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = small(EnsembleKind::Gaussian);
        spec.trials = 0;
        assert!(run_experiment(&spec).is_err());
        let mut spec = small(EnsembleKind::PartialFourier);
        spec.n = 10;
        assert!(run_experiment(&spec).is_err());
    }

    #[test]
    fn write_outputs_creates_both_files() {
        let dir = tempfile::tempdir().unwrap();
        let res = run_experiment(&small(EnsembleKind::Bernoulli01)).unwrap();
        let (s, t) = res.write_outputs(dir.path().join("out")).unwrap();
        assert!(s.exists() && t.exists());
    }
}
