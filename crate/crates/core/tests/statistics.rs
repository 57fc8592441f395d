//! Monte Carlo checks of the sampler, the ensembles and the solver's
//! expected behaviour. All runs are seeded and therefore deterministic.

mod common;

use common::chi_square;
use kaczmarz::analysis::{compute_gamma, compute_r, noisy_bound, perturbation_diagnostic};
use kaczmarz::generators::{
    gen_bernoulli01, gen_gaussian, gen_noise, gen_partial_fourier, random_unit, EnsembleKind, EnsembleSpec, NoiseKind,
};
use kaczmarz::linalg::{distance, norm, DenseMatrix};
use kaczmarz::sampling::{RngStream, RowSampler};
use kaczmarz::solver::{mean_final_error, run_batch, Schedule, SolveConfig};

fn spec(kind: EnsembleKind, m: usize, n: usize, seed: u64) -> EnsembleSpec {
    EnsembleSpec::new(kind, m, n, seed)
}

#[test]
fn sampler_passes_chi_square_on_random_weights() {
    for (k, m) in [2usize, 10, 2000].into_iter().enumerate() {
        let a = gen_gaussian(&spec(EnsembleKind::Gaussian, m, 2.min(m), 600 + k as u64)).unwrap();
        let s = RowSampler::from_matrix(&a).unwrap();
        let mut rng = RngStream::new(7, k as u64);
        let mut counts = vec![0u64; m];
        for _ in 0..1_000_000 {
            counts[s.draw(&mut rng)] += 1;
        }
        let (stat, crit) = chi_square(&counts, s.probabilities(), 1e-6);
        assert!(stat < crit, "m = {m}: chi2 {stat} >= {crit}");
    }
}

#[test]
fn uniform_sampler_frequencies() {
    let s = RowSampler::from_matrix(&DenseMatrix::<f64>::identity(4).unwrap()).unwrap();
    let mut rng = RngStream::new(1, 1);
    let mut counts = [0u64; 4];
    for _ in 0..1_000_000 {
        counts[s.draw(&mut rng)] += 1;
    }
    for c in counts {
        assert!((c as f64 / 1e6 - 0.25).abs() < 0.005);
    }
}

#[test]
fn zero_weight_rows_are_never_drawn() {
    let w = [0.0, 3.0, 0.0, 1.0, 0.0, 0.5, 0.0];
    let s = RowSampler::from_weights(&w).unwrap();
    let mut rng = RngStream::new(2, 2);
    for _ in 0..1_000_000 {
        assert!(w[s.draw(&mut rng)] > 0.0);
    }
}

#[test]
fn gaussian_entries_have_unit_variance() {
    let a = gen_gaussian(&spec(EnsembleKind::Gaussian, 2000, 100, 1)).unwrap();
    let mn = (2000 * 100) as f64;
    let mean = a.as_slice().iter().sum::<f64>() / mn;
    assert!(mean.abs() < 0.01, "mean {mean}");
    assert!((a.frobenius_sq() / mn - 1.0).abs() < 0.02);
}

#[test]
fn bernoulli_entries_are_fair_bits() {
    let a = gen_bernoulli01(&spec(EnsembleKind::Bernoulli01, 2000, 100, 1)).unwrap();
    assert!(a.as_slice().iter().all(|&x| x == 0.0 || x == 1.0));
    let mean = a.as_slice().iter().sum::<f64>() / 200_000.0;
    assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
}

#[test]
fn fourier_column_norms_concentrate_at_m() {
    let (m, n) = (700usize, 101usize);
    let a = gen_partial_fourier(&spec(EnsembleKind::PartialFourier, m, n, 5)).unwrap();
    let g = a.gram();
    for k in 0..n {
        let d = g.get(k, k).re;
        assert!((d - m as f64).abs() <= 5.0 * (m as f64).sqrt());
    }
    assert_eq!(g.get(50, 50).re, m as f64);
}

#[test]
fn gaussian_r_is_concentrated_across_trials() {
    let rs: Vec<f64> = (0..100u64)
        .map(|t| compute_r(&gen_gaussian(&spec(EnsembleKind::Gaussian, 2000, 100, 77).with_stream(t)).unwrap()).unwrap())
        .collect();
    let mean = rs.iter().sum::<f64>() / 100.0;
    let var = rs.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / 99.0;
    assert!(var.sqrt() < 0.2 * mean, "sd {} mean {mean}", var.sqrt());
}

#[test]
fn identity_with_unit_noise_settles_at_sqrt_n() {
    let n = 100;
    let a = DenseMatrix::<f64>::identity(n).unwrap();
    let rhs = vec![1.0; n];
    let sched = Schedule::randomized(&a).unwrap();
    let cfg = SolveConfig::new(5000, 3).record_every(5000);
    let batch = run_batch(&a, &rhs, &vec![0.0; n], &sched, &cfg, &vec![0.0; n], 20).unwrap();
    let mean = mean_final_error(&batch, &vec![0.0; n]);
    assert!((mean - 10.0).abs() <= 0.02 * 10.0);
}

#[test]
fn noisy_batch_stays_under_theoretical_curve() {
    let a = gen_gaussian(&spec(EnsembleKind::Gaussian, 200, 20, 31)).unwrap();
    let x: Vec<f64> = random_unit(20, &mut RngStream::new(31, 1)).unwrap();
    let b = a.mul_vec(&x).unwrap();
    let r: Vec<f64> = gen_noise(200, 0.5, NoiseKind::MatchField, &mut RngStream::new(31, 2)).unwrap();
    let rhs: Vec<f64> = b.iter().zip(&r).map(|(p, q)| p + q).collect();
    let x0 = vec![0.0; 20];
    let rr = compute_r(&a).unwrap();
    let gamma = compute_gamma(&a, &r).unwrap();
    let sched = Schedule::randomized(&a).unwrap();
    for iters in [0usize, 50, 200, 2000] {
        let cfg = SolveConfig::new(iters, 31).record_every(iters.max(1));
        let batch = run_batch(&a, &rhs, &x0, &sched, &cfg, &x, 100).unwrap();
        let mean = mean_final_error(&batch, &x);
        let bound = noisy_bound(rr, gamma, distance(&x0, &x), iters).unwrap();
        assert!(mean <= bound, "k = {iters}: {mean} > {bound}");
    }
}

#[test]
fn perturbation_diagnostic_respects_classical_bound() {
    let a = gen_gaussian(&spec(EnsembleKind::Gaussian, 50, 10, 50)).unwrap();
    let x: Vec<f64> = random_unit(10, &mut RngStream::new(50, 1)).unwrap();
    let r: Vec<f64> = gen_noise(50, 0.1, NoiseKind::MatchField, &mut RngStream::new(50, 2)).unwrap();
    let d = perturbation_diagnostic(&a, &r, &x).unwrap();
    assert!(d.lhs > 0.0);
    assert!(d.lhs <= d.rhs_classical, "{d:?}");
    assert!(d.rhs_kaczmarz > 0.0);
    assert!(norm(&r) > 0.0);
}
