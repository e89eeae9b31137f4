//! Monte Carlo simulation of the particle channel.
//!
//! Draws end-to-end transcripts `x -> released -> arrived -> detected` and
//! tabulates empirical conditional laws for comparison against the analytic
//! rows. Two interchangeable arrival samplers are provided: binomial thinning
//! (each released particle arrives with probability `rho`) and explicit
//! first-arrival times (sample `T`, count it if `T <= tau`). The two must be
//! statistically indistinguishable; keeping both is a cross-check of the
//! arrival law against the thinning shortcut.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::channel::{
    compress_dense, end_to_end_closed_form, make_context, ChannelParams, DiscreteChannel, Row,
    ThetaContext,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How the arrival stage is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingPath {
    /// Arrived count ~ Binomial(released, rho).
    Thinning,
    /// Draw each particle's first-arrival time and count those at most tau.
    ArrivalTimes,
}

impl SamplingPath {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplingPath::Thinning => "thinning",
            SamplingPath::ArrivalTimes => "arrival-times",
        }
    }
}

impl std::fmt::Display for SamplingPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A Monte Carlo run description. `seed` fixes every draw: rows are simulated
/// on independent RNG streams keyed by the input symbol, so results do not
/// depend on thread scheduling.
#[derive(Debug, Clone)]
pub struct SimConfig<F: Scalar> {
    pub params: ChannelParams<F>,
    pub rho: F,
    pub trials: u64,
    pub seed: u64,
    pub path: SamplingPath,
}

/// Empirical conditional laws plus their distance to the analytic rows.
#[derive(Debug, Clone)]
pub struct EmpiricalChannel<F: Scalar> {
    pub ctx: ThetaContext<F>,
    /// Empirical rows (counts / trials) as a channel over inputs `0..=m_rho`.
    pub channel: DiscreteChannel<F>,
    /// Raw output histograms, `counts[x][y]`, each row summing to `trials`.
    pub counts: Vec<Vec<u64>>,
    /// Per-row total variation distance to the analytic end-to-end law.
    pub tv_to_closed_form: Vec<F>,
}

// Binomial(n, p) draw with the degenerate ends short-circuited.
fn binom_draw<R: Rng>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        Binomial::new(n, p)
            .expect("p lies in (0, 1)")
            .sample(rng)
    }
}

/// One end-to-end transcript: input symbol `x` (at most `ctx.m_rho`) to
/// detected count.
pub fn simulate_symbol<F: Scalar, R: Rng>(
    cfg: &SimConfig<F>,
    ctx: &ThetaContext<F>,
    x: u64,
    rng: &mut R,
) -> u64 {
    debug_assert!(x <= ctx.m_rho);
    let m = ctx.m_rho;
    if m == 0 || x == 0 {
        return 0;
    }
    let p_release = (cfg.params.alpha.f64() * (x as f64 / m as f64)).min(1.0);
    let released = binom_draw(m, p_release, rng);
    let arrived = match cfg.path {
        SamplingPath::Thinning => binom_draw(released, ctx.rho.f64(), rng),
        SamplingPath::ArrivalTimes => {
            let mut hits = 0;
            for _ in 0..released {
                if let Some(t) = cfg.params.arrival.sample(rng) {
                    if t <= ctx.tau {
                        hits += 1;
                    }
                }
            }
            hits
        }
    };
    binom_draw(arrived, cfg.params.beta.f64(), rng)
}

/// Simulate `cfg.trials` transcripts for every input symbol and tabulate the
/// empirical channel. Deterministic in `cfg.seed`.
pub fn empirical_channel<F: Scalar>(cfg: &SimConfig<F>) -> Result<EmpiricalChannel<F>> {
    if cfg.trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let ctx = make_context(&cfg.params, cfg.rho)?;
    let m = ctx.m_rho;
    let width = m as u128 + 1;
    if width * width > 200_000_000 {
        return Err(Error::Budget(format!(
            "empirical channel needs (m_rho + 1)^2 = {} counters; m_rho = {m} is too large",
            width * width
        )));
    }
    if width * cfg.trials as u128 > 4_000_000_000 {
        return Err(Error::Budget(format!(
            "(m_rho + 1) * trials = {} transcripts exceeds the simulation budget",
            width * cfg.trials as u128
        )));
    }
    let counts: Vec<Vec<u64>> = (0..=m)
        .into_par_iter()
        .map(|x| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(x + 1);
            let mut hist = vec![0u64; (m + 1) as usize];
            for _ in 0..cfg.trials {
                let y = simulate_symbol(cfg, &ctx, x, &mut rng);
                hist[y as usize] += 1;
            }
            hist
        })
        .collect();
    let trials = cfg.trials as f64;
    let rows: Vec<Row<F>> = counts
        .iter()
        .map(|hist| {
            let dense: Vec<F> = hist.iter().map(|&c| F::of(c as f64 / trials)).collect();
            compress_dense(&dense)
        })
        .collect();
    let channel = DiscreteChannel::from_parts((0..=m).collect(), rows, m)?;
    let reference = end_to_end_closed_form(&ctx)?;
    let tv_to_closed_form = channel
        .rows()
        .iter()
        .zip(reference.rows())
        .map(|(e, r)| e.tv(r))
        .collect();
    Ok(EmpiricalChannel {
        ctx,
        channel,
        counts,
        tv_to_closed_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrival::ScaledLevy;
    use crate::stats::chi2_two_sample;
    use std::sync::Arc;

    fn test_config(lambda: f64, trials: u64, seed: u64, path: SamplingPath) -> SimConfig<f64> {
        let law = ScaledLevy::new(0.7, 1.0).unwrap();
        SimConfig {
            params: ChannelParams::new(0.9, 0.8, lambda, Arc::new(law)).unwrap(),
            rho: 0.35,
            trials,
            seed,
            path,
        }
    }

    #[test]
    fn empirical_channel_is_seed_deterministic() {
        let cfg = test_config(3.0, 20_000, 42, SamplingPath::Thinning);
        let a = empirical_channel(&cfg).unwrap();
        let b = empirical_channel(&cfg).unwrap();
        assert_eq!(a.counts, b.counts, "same seed must reproduce every draw");
        assert_eq!(a.channel, b.channel);
        let cfg2 = SimConfig { seed: 43, ..cfg };
        let c = empirical_channel(&cfg2).unwrap();
        assert_ne!(a.counts, c.counts, "different seed must change the draws");
    }

    #[test]
    fn zero_input_row_is_exact() {
        for path in [SamplingPath::Thinning, SamplingPath::ArrivalTimes] {
            let cfg = test_config(3.0, 5_000, 11, path);
            let e = empirical_channel(&cfg).unwrap();
            assert_eq!(e.counts[0][0], cfg.trials, "x = 0 releases nothing");
            assert_eq!(e.channel.rows()[0], Row::delta(0));
            assert_eq!(e.tv_to_closed_form[0], 0.0);
        }
    }

    #[test]
    fn empirical_means_match_analytic_means() {
        let cfg = test_config(3.0, 20_000, 7, SamplingPath::Thinning);
        let e = empirical_channel(&cfg).unwrap();
        let m = e.ctx.m_rho;
        assert!(m >= 5, "test geometry expects a nontrivial alphabet");
        for (x, row) in e.channel.rows().iter().enumerate() {
            let p = e.ctx.theta * x as f64 / m as f64;
            let mean = x as f64 * e.ctx.theta;
            let se = (m as f64 * p * (1.0 - p) / cfg.trials as f64).sqrt();
            assert!(
                (row.mean() - mean).abs() <= 5.0 * se,
                "row {x}: mean {} vs {mean}, se {se}",
                row.mean()
            );
        }
    }

    #[test]
    fn rows_converge_to_closed_form() {
        let cfg = test_config(3.0, 200_000, 5, SamplingPath::Thinning);
        let e = empirical_channel(&cfg).unwrap();
        for (x, tv) in e.tv_to_closed_form.iter().enumerate() {
            assert!(*tv < 0.01, "row {x}: tv = {tv}");
        }
    }

    #[test]
    fn sampling_paths_are_statistically_indistinguishable() {
        let trials = 100_000;
        let a = empirical_channel(&test_config(4.0, trials, 7, SamplingPath::Thinning)).unwrap();
        let b =
            empirical_channel(&test_config(4.0, trials, 1007, SamplingPath::ArrivalTimes)).unwrap();
        assert_eq!(a.ctx.m_rho, b.ctx.m_rho);
        for x in 0..=(a.ctx.m_rho as usize) {
            let c = chi2_two_sample(&a.counts[x], &b.counts[x]);
            assert!(
                c.p_value > 1e-4,
                "row {x}: chi2 = {}, dof = {}, p = {}",
                c.stat,
                c.dof,
                c.p_value
            );
            let tv = a.channel.rows()[x].tv(&b.channel.rows()[x]);
            assert!(tv < 0.02, "row {x}: tv between paths = {tv}");
        }
    }

    #[test]
    fn budget_and_domain_guards() {
        let cfg = test_config(3.0, 0, 1, SamplingPath::Thinning);
        assert!(empirical_channel(&cfg).is_err(), "zero trials rejected");
        let cfg = test_config(3.0, u64::MAX, 1, SamplingPath::Thinning);
        match empirical_channel(&cfg) {
            Err(Error::Budget(_)) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
