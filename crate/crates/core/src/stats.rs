//! Statistical distances and goodness-of-fit helpers used by the Monte Carlo
//! validators.

use crate::scalar::Scalar;
use crate::special::gamma_q;

/// Total variation distance between two finite distributions given densely
/// (the shorter slice is zero-padded).
pub fn tv_dense<F: Scalar>(a: &[F], b: &[F]) -> F {
    let n = a.len().max(b.len());
    let mut acc = F::zero();
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or_else(F::zero);
        let y = b.get(i).copied().unwrap_or_else(F::zero);
        acc += (x - y).abs();
    }
    acc / F::of(2.0)
}

/// One-sample Kolmogorov–Smirnov statistic `sup_t |F_n(t) - F(t)|`.
///
/// Sorts `samples` in place; `cdf` must be the hypothesized distribution of
/// the samples (for defective laws, pass the conditional CDF and conditional
/// samples).
pub fn ks_statistic<F: Scalar>(samples: &mut [F], cdf: impl Fn(F) -> F) -> F {
    assert!(!samples.is_empty(), "KS needs at least one sample");
    samples.sort_by(|a, b| a.partial_cmp(b).expect("samples must be orderable"));
    let n = samples.len() as f64;
    let mut d = F::zero();
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let lo = F::of(i as f64 / n);
        let hi = F::of((i + 1) as f64 / n);
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Asymptotic two-sided KS critical value at level `alpha` for `n` samples:
/// `sqrt(-ln(alpha/2) / 2) / sqrt(n)`.
pub fn ks_critical(n: u64, alpha: f64) -> f64 {
    assert!(n > 0 && alpha > 0.0 && alpha < 1.0);
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Result of a two-sample chi-square homogeneity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub stat: f64,
    pub dof: u64,
    pub p_value: f64,
}

/// Two-sample chi-square test that two histograms come from the same
/// distribution. Adjacent bins are pooled until each carries a combined
/// count of at least 10, keeping the chi-square approximation honest.
pub fn chi2_two_sample(a: &[u64], b: &[u64]) -> ChiSquare {
    let n = a.len().max(b.len());
    let take = |s: &[u64], i: usize| s.get(i).copied().unwrap_or(0);
    // pool small bins left to right; remainder joins the last pooled bin
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut ca, mut cb) = (0u64, 0u64);
    for i in 0..n {
        ca += take(a, i);
        cb += take(b, i);
        if ca + cb >= 10 {
            bins.push((ca as f64, cb as f64));
            ca = 0;
            cb = 0;
        }
    }
    if ca + cb > 0 {
        if let Some(last) = bins.last_mut() {
            last.0 += ca as f64;
            last.1 += cb as f64;
        } else {
            bins.push((ca as f64, cb as f64));
        }
    }
    let na: f64 = bins.iter().map(|x| x.0).sum();
    let nb: f64 = bins.iter().map(|x| x.1).sum();
    assert!(na > 0.0 && nb > 0.0, "both samples must be nonempty");
    if bins.len() < 2 {
        return ChiSquare {
            stat: 0.0,
            dof: 0,
            p_value: 1.0,
        };
    }
    let k1 = (nb / na).sqrt();
    let k2 = (na / nb).sqrt();
    let stat: f64 = bins
        .iter()
        .map(|&(x, y)| {
            let d = k1 * x - k2 * y;
            d * d / (x + y)
        })
        .sum();
    let dof = (bins.len() - 1) as u64;
    ChiSquare {
        stat,
        dof,
        p_value: gamma_q(dof as f64 / 2.0, stat / 2.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{binom_logpmf, pois_logpmf};

    #[test]
    fn tv_reference_value() {
        // Binomial(2000, 0.001) vs Poisson(2), supports truncated far out
        let a: Vec<f64> = (0..=60).map(|y| binom_logpmf(y, 2000, 0.001).exp()).collect();
        let b: Vec<f64> = (0..=60).map(|y| pois_logpmf(y, 2.0).exp()).collect();
        let tv = tv_dense(&a, &b);
        assert!(
            (tv - 2.2570929079972928e-4).abs() < 1e-16,
            "tv = {tv:e}"
        );
        // identical distributions
        assert_eq!(tv_dense(&a, &a), 0.0);
        // disjoint point masses
        assert_eq!(tv_dense(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        // zero padding
        assert_eq!(tv_dense(&[1.0], &[0.5, 0.5]), 0.5);
    }

    #[test]
    fn ks_critical_reference_value() {
        let c = ks_critical(100_000, 0.01);
        assert!(
            (c * (100_000f64).sqrt() - 1.6276236307187293).abs() < 1e-12,
            "scaled critical value {}",
            c * (100_000f64).sqrt()
        );
        assert!(ks_critical(100, 0.05) > ks_critical(100, 0.01) * 0.5);
    }

    #[test]
    fn ks_statistic_detects_and_accepts() {
        // deterministic plug-in: uniform quantiles against the uniform CDF
        let n = 1000;
        let mut samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&mut samples, |x| x);
        assert!(d <= 0.5 / n as f64 + 1e-12, "near-perfect fit, d = {d}");
        // the same samples against a wrong CDF
        let mut samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&mut samples, |x: f64| x.powi(2));
        assert!(d > 0.2, "misfit must be flagged, d = {d}");
    }

    #[test]
    fn chi2_identical_histograms_accept() {
        let a = [100u64, 250, 400, 250, 100];
        let c = chi2_two_sample(&a, &a);
        assert_eq!(c.stat, 0.0);
        assert_eq!(c.dof, 4);
        assert!((c.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi2_shifted_histograms_reject() {
        let a = [1000u64, 2000, 4000, 2000, 1000];
        let b = [2000u64, 4000, 2000, 1000, 1000];
        let c = chi2_two_sample(&a, &b);
        assert!(c.stat > 100.0);
        assert!(c.p_value < 1e-10, "p = {}", c.p_value);
    }

    #[test]
    fn chi2_pools_sparse_bins() {
        // long sparse tails collapse into the bulk instead of inflating dof
        let mut a = vec![0u64; 40];
        let mut b = vec![0u64; 40];
        a[0] = 500;
        b[0] = 480;
        a[1] = 500;
        b[1] = 520;
        for i in 2..40 {
            a[i] = u64::from(i % 7 == 0);
            b[i] = u64::from(i % 11 == 0);
        }
        let c = chi2_two_sample(&a, &b);
        assert!(c.dof <= 2, "dof = {}", c.dof);
        assert!(c.p_value > 0.05, "p = {}", c.p_value);
    }
}
