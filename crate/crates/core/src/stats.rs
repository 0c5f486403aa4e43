//! Small statistical utilities: exact binomial confidence bounds, percentile
//! bootstrap, and log-domain summation.

use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::rng;

/// Beta quantile by bisection on the (precise) regularized incomplete beta
/// CDF. The trait's default `inverse_cdf` search stops around 1e-5, which is
/// too coarse for interval endpoints asserted to 1e-9.
fn beta_quantile(a: f64, b: f64, p: f64) -> f64 {
    let beta = Beta::new(a, b).unwrap();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if beta.cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Clopper-Pearson two-sided confidence interval for `successes` out of `n`
/// Bernoulli trials at confidence `level` (e.g. 0.95).
pub fn clopper_pearson(successes: u64, n: u64, level: f64) -> (f64, f64) {
    assert!(n > 0, "clopper_pearson needs n > 0");
    assert!(successes <= n);
    let a = 1.0 - level;
    let k = successes as f64;
    let nf = n as f64;
    let lo = if successes == 0 {
        0.0
    } else {
        beta_quantile(k, nf - k + 1.0, a / 2.0)
    };
    let hi = if successes == n {
        1.0
    } else {
        beta_quantile(k + 1.0, nf - k, 1.0 - a / 2.0)
    };
    (lo, hi)
}

/// log(sum(exp(x_i))) without overflow. Returns -inf for an empty slice or
/// when every entry is -inf; propagates +inf.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if m == f64::INFINITY {
        return f64::INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// Percentile-bootstrap 95% interval of `statistic` over `resamples`
/// with-replacement resamples of `data`. Resamples are seeded per index, so
/// the interval is reproducible and thread-count independent.
pub fn bootstrap_ci95<F>(data: &[f64], resamples: usize, seed: u64, statistic: F) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(!data.is_empty() && resamples >= 2);
    let n = data.len();
    let mut stats: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, rng::BOOTSTRAP_STREAM_BASE + r as u64);
            let resample: Vec<f64> = (0..n).map(|_| data[rng.gen_range(0..n)]).collect();
            statistic(&resample)
        })
        .collect();
    stats.sort_by(|a, b| a.total_cmp(b));
    let lo_idx = ((0.025 * resamples as f64) as usize).min(resamples - 1);
    let hi_idx = ((0.975 * resamples as f64) as usize).min(resamples - 1);
    (stats[lo_idx], stats[hi_idx])
}
