//! Test-only oracles, written independently of the library's numerics.
#![allow(dead_code)]

use kaczmarz::linalg::DenseMatrix;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// `A^T A` by the textbook triple loop.
pub fn gram_naive(a: &DenseMatrix<f64>) -> Vec<Vec<f64>> {
    let n = a.cols();
    let mut g = vec![vec![0.0; n]; n];
    for p in 0..n {
        for q in 0..n {
            g[p][q] = (0..a.rows()).map(|i| a.get(i, p) * a.get(i, q)).sum();
        }
    }
    g
}

/// Coefficients `c[0..=n]` of `det(lambda I - G) = sum c_k lambda^k`
/// via the Faddeev-LeVerrier recurrence.
pub fn char_poly(g: &[Vec<f64>]) -> Vec<f64> {
    let n = g.len();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut m = vec![vec![0.0; n]; n];
    for k in 1..=n {
        // M_k = G M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).map(|l| g[i][l] * m[l][j]).sum::<f64>();
            }
            next[i][i] += c[n - k + 1];
        }
        m = next;
        // c_{n-k} = -tr(G M_k) / k
        let tr: f64 = (0..n)
            .map(|i| (0..n).map(|l| g[i][l] * m[l][i]).sum::<f64>())
            .sum();
        c[n - k] = -tr / k as f64;
    }
    c
}

pub fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

fn bisect(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = horner(c, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = horner(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest and largest singular values of `a` from sign changes of the
/// characteristic polynomial of `A^T A` on a fine grid over `[0, trace]`,
/// each refined by bisection.
pub fn sigma_oracle(a: &DenseMatrix<f64>) -> (f64, f64) {
    let g = gram_naive(a);
    let c = char_poly(&g);
    let trace: f64 = (0..g.len()).map(|i| g[i][i]).sum();
    let hi = trace * (1.0 + 1e-9);
    let steps = 200_000;
    let mut brackets = Vec::new();
    let mut prev_x = 0.0;
    let mut prev_f = horner(&c, 0.0);
    for s in 1..=steps {
        let x = hi * s as f64 / steps as f64;
        let f = horner(&c, x);
        if (f < 0.0) != (prev_f < 0.0) {
            brackets.push((prev_x, x));
        }
        prev_x = x;
        prev_f = f;
    }
    assert_eq!(brackets.len(), g.len(), "oracle failed to separate all roots");
    let lo_root = bisect(&c, brackets[0].0, brackets[0].1);
    let (a_hi, b_hi) = *brackets.last().unwrap();
    let hi_root = bisect(&c, a_hi, b_hi);
    (lo_root.sqrt(), hi_root.sqrt())
}

/// Pearson chi-square statistic and the critical value at `alpha`, over the
/// cells with positive expected count.
pub fn chi_square(counts: &[u64], probs: &[f64], alpha: f64) -> (f64, f64) {
    let total: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&obs, &p) in counts.iter().zip(probs) {
        if p == 0.0 {
            assert_eq!(obs, 0, "zero-probability cell was drawn");
            continue;
        }
        let expected = p * total as f64;
        stat += (obs as f64 - expected).powi(2) / expected;
        cells += 1;
    }
    let dist = ChiSquared::new((cells - 1) as f64).unwrap();
    (stat, dist.inverse_cdf(1.0 - alpha))
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs()
}
