//! Channel matrices for particle-intensity transmission.
//!
//! The chain is: intended count `x` → released count `x'` (binomial release
//! with per-particle efficiency `alpha·x/m`) → arrived count `y'` (each
//! released particle arrives within the interval with probability `rho`) →
//! detected count `y` (each arrival registers with probability `beta`).
//! The composition collapses to a single binomial law with per-particle
//! success `theta = alpha·rho·beta`, which is what the closed-form builder
//! produces directly; the stage builders exist so the collapse can be checked
//! rather than assumed.
//!
//! Rows are stored sparsely: support where cumulative mass per tail is below
//! [`TRUNC_EPS`] is dropped and the remainder renormalized, which keeps
//! matrices for `m` in the thousands tractable without giving up row
//! stochasticity.

use std::fmt;
use std::sync::Arc;

use crate::arrival::FirstArrival;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::special::{binom_logpmf, gamma_p, pois_logpmf};

/// Per-tail mass dropped when truncating a row's support.
pub const TRUNC_EPS: f64 = 1e-15;

/// Hard cap on dense scratch allocations (entries), protecting compose and
/// dense exports from runaway alphabet sizes.
pub const MAX_DENSE_ENTRIES: u64 = 100_000_000;

/// Static description of the transmitter, medium, and receiver.
pub struct ChannelParams<F: Scalar> {
    /// Release efficiency, in (0, 1].
    pub alpha: F,
    /// Detection probability, in (0, 1].
    pub beta: F,
    /// Particle generation rate, particles per second, positive.
    pub lambda: F,
    /// First-arrival law of the medium.
    pub arrival: Arc<dyn FirstArrival<F>>,
}

impl<F: Scalar> Clone for ChannelParams<F> {
    fn clone(&self) -> Self {
        ChannelParams {
            alpha: self.alpha,
            beta: self.beta,
            lambda: self.lambda,
            arrival: Arc::clone(&self.arrival),
        }
    }
}

impl<F: Scalar> fmt::Debug for ChannelParams<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChannelParams")
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("lambda", &self.lambda)
            .field("eta", &self.arrival.capture_probability())
            .finish()
    }
}

impl<F: Scalar> ChannelParams<F> {
    pub fn new(alpha: F, beta: F, lambda: F, arrival: Arc<dyn FirstArrival<F>>) -> Result<Self> {
        if !(alpha > F::zero() && alpha <= F::one()) {
            return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(beta > F::zero() && beta <= F::one()) {
            return Err(Error::domain(format!("beta must lie in (0, 1], got {beta}")));
        }
        if !(lambda > F::zero()) || !lambda.is_finite() {
            return Err(Error::domain(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        Ok(ChannelParams {
            alpha,
            beta,
            lambda,
            arrival,
        })
    }
}

/// Everything the channel law needs at one operating point `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaContext<F> {
    /// Arrival probability within the interval, in (0, eta).
    pub rho: F,
    /// End-to-end per-particle success `alpha * rho * beta`.
    pub theta: F,
    /// Input-alphabet bound: at most `m_rho` particles fit in one interval.
    pub m_rho: u64,
    /// Symbol interval length in seconds.
    pub tau: F,
}

/// Resolve `rho` into the symbol duration, alphabet bound, and end-to-end
/// success probability.
///
/// `m_rho` may come out 0 (interval shorter than one generation period); that
/// is a degenerate but valid operating point with zero capacity.
pub fn make_context<F: Scalar>(params: &ChannelParams<F>, rho: F) -> Result<ThetaContext<F>> {
    let tau = params.arrival.icdf(rho)?;
    let budget = params.lambda * tau;
    if !budget.is_finite() || budget.f64() >= 9.007_199_254_740_992e15 {
        return Err(Error::Budget(format!(
            "lambda * tau = {budget} exceeds the exactly representable count range"
        )));
    }
    let m_rho = budget.floor().f64() as u64;
    let theta = params.alpha * rho * params.beta;
    Ok(ThetaContext {
        rho,
        theta,
        m_rho,
        tau,
    })
}

/// One sparse row of conditional probabilities: `probs[i]` is the mass at
/// output symbol `start + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row<F> {
    pub start: u64,
    pub probs: Vec<F>,
}

impl<F: Scalar> Row<F> {
    /// Point mass at `y`.
    pub fn delta(y: u64) -> Self {
        Row {
            start: y,
            probs: vec![F::one()],
        }
    }

    /// Largest output symbol carrying mass.
    pub fn end(&self) -> u64 {
        self.start + self.probs.len() as u64 - 1
    }

    /// Mass at output symbol `y` (zero outside the stored support).
    pub fn prob(&self, y: u64) -> F {
        if y < self.start || y > self.end() {
            F::zero()
        } else {
            self.probs[(y - self.start) as usize]
        }
    }

    /// `(symbol, mass)` pairs over the stored support.
    pub fn iter(&self) -> impl Iterator<Item = (u64, F)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.start + i as u64, p))
    }

    /// Mean of the row as a distribution over output symbols.
    pub fn mean(&self) -> F {
        self.iter().map(|(y, p)| F::of(y as f64) * p).sum()
    }

    /// Total variation distance to another row.
    pub fn tv(&self, other: &Row<F>) -> F {
        let lo = self.start.min(other.start);
        let hi = self.end().max(other.end());
        let mut acc = F::zero();
        for y in lo..=hi {
            acc += (self.prob(y) - other.prob(y)).abs();
        }
        acc / F::of(2.0)
    }
}

/// A discrete memoryless channel from the symbols in `inputs` to the output
/// alphabet `{0..y_max}`.
///
/// `inputs` is strictly increasing; a full channel lists `0..=m`, a
/// restricted or subsampled one lists fewer. `rows[i]` is the conditional law
/// of the output given input `inputs[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteChannel<F> {
    inputs: Vec<u64>,
    rows: Vec<Row<F>>,
    y_max: u64,
}

impl<F: Scalar> DiscreteChannel<F> {
    pub fn from_parts(inputs: Vec<u64>, rows: Vec<Row<F>>, y_max: u64) -> Result<Self> {
        let ch = DiscreteChannel {
            inputs,
            rows,
            y_max,
        };
        ch.validate()?;
        Ok(ch)
    }

    /// Input symbols, strictly increasing.
    pub fn inputs(&self) -> &[u64] {
        &self.inputs
    }

    /// Conditional rows, parallel to `inputs`.
    pub fn rows(&self) -> &[Row<F>] {
        &self.rows
    }

    /// Output-alphabet bound.
    pub fn y_max(&self) -> u64 {
        self.y_max
    }

    /// Input-alphabet bound (largest input symbol).
    pub fn m(&self) -> u64 {
        *self.inputs.last().expect("channel has at least one input")
    }

    /// Number of input symbols.
    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    /// Stored (nonzero-support) entry count.
    pub fn entry_count(&self) -> u64 {
        self.rows.iter().map(|r| r.probs.len() as u64).sum()
    }

    /// Row for the literal input symbol `x`, if present.
    pub fn row_for_input(&self, x: u64) -> Option<&Row<F>> {
        let i = self.inputs.binary_search(&x).ok()?;
        Some(&self.rows[i])
    }

    /// `P(y | inputs[i])`.
    pub fn prob(&self, i: usize, y: u64) -> F {
        self.rows[i].prob(y)
    }

    /// Dense `(n_inputs) x (y_max+1)` matrix; guarded against oversize.
    pub fn dense(&self) -> Result<Vec<Vec<F>>> {
        let total = self.inputs.len() as u64 * (self.y_max + 1);
        if total > MAX_DENSE_ENTRIES {
            return Err(Error::Budget(format!(
                "dense export of {} entries exceeds the {} cap",
                total, MAX_DENSE_ENTRIES
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|r| (0..=self.y_max).map(|y| r.prob(y)).collect())
            .collect())
    }

    /// Check structural and stochasticity invariants.
    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Dimension("channel has no inputs".into()));
        }
        if self.inputs.len() != self.rows.len() {
            return Err(Error::Dimension(format!(
                "{} inputs but {} rows",
                self.inputs.len(),
                self.rows.len()
            )));
        }
        if !self.inputs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Dimension(
                "input symbols must be strictly increasing".into(),
            ));
        }
        let tol = F::row_tol();
        for (i, row) in self.rows.iter().enumerate() {
            if row.probs.is_empty() {
                return Err(Error::NonStochastic(format!("row {i} is empty")));
            }
            if row.end() > self.y_max {
                return Err(Error::Dimension(format!(
                    "row {i} reaches output {} beyond y_max = {}",
                    row.end(),
                    self.y_max
                )));
            }
            let mut sum = F::zero();
            for &p in &row.probs {
                if !(p >= F::zero() && p <= F::one()) {
                    return Err(Error::NonStochastic(format!(
                        "row {i} holds an entry outside [0, 1]: {p}"
                    )));
                }
                sum += p;
            }
            if (sum - F::one()).abs() > tol {
                return Err(Error::NonStochastic(format!(
                    "row {i} sums to {sum}, off by more than {tol}"
                )));
            }
        }
        Ok(())
    }

    /// Compose with a downstream channel: the output of `self` feeds the
    /// input of `right`. `right` must cover every symbol `self` can emit with
    /// a contiguous `0..=m` input alphabet.
    pub fn compose(&self, right: &DiscreteChannel<F>) -> Result<DiscreteChannel<F>> {
        let contiguous = right.inputs.len() as u64 == right.m() + 1 && right.inputs[0] == 0;
        if !contiguous {
            return Err(Error::Dimension(
                "downstream channel must have a contiguous 0..=m input alphabet".into(),
            ));
        }
        if self.y_max > right.m() {
            return Err(Error::Dimension(format!(
                "upstream emits up to {} but downstream accepts only up to {}",
                self.y_max,
                right.m()
            )));
        }
        let width = right.y_max + 1;
        if width > MAX_DENSE_ENTRIES / self.rows.len().max(1) as u64 {
            return Err(Error::Budget(format!(
                "composition scratch of {} x {} entries exceeds the {} cap",
                self.rows.len(),
                width,
                MAX_DENSE_ENTRIES
            )));
        }
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut acc = vec![F::zero(); width as usize];
        for row in &self.rows {
            for a in acc.iter_mut() {
                *a = F::zero();
            }
            for (k, p) in row.iter() {
                let mid = &right.rows[k as usize];
                for (j, q) in mid.iter() {
                    acc[j as usize] += p * q;
                }
            }
            rows.push(compress_dense(&acc));
        }
        Ok(DiscreteChannel {
            inputs: self.inputs.clone(),
            rows,
            y_max: right.y_max,
        })
    }
}

// Sparse row from a dense buffer: trim exact zeros at both ends.
pub(crate) fn compress_dense<F: Scalar>(dense: &[F]) -> Row<F> {
    let first = dense.iter().position(|p| *p > F::zero()).unwrap_or(0);
    let last = dense
        .iter()
        .rposition(|p| *p > F::zero())
        .unwrap_or(dense.len() - 1);
    Row {
        start: first as u64,
        probs: dense[first..=last].to_vec(),
    }
}

// Support half-width for Binomial/Poisson tails: Bernstein's inequality gives
// P(|X - mu| >= t) <= 2 exp(-t^2 / (2 sigma^2 + 2t/3)), solved for the t that
// pushes each tail below eps/2.
fn tail_halfwidth(variance: f64, eps: f64) -> f64 {
    let l = (4.0 / eps).ln();
    l / 3.0 + (l * l / 9.0 + 2.0 * variance * l).sqrt()
}

/// Sparse Binomial(n, p) row, tails below `trunc_eps` dropped per side, then
/// renormalized.
pub fn binom_row<F: Scalar>(n: u64, p: f64, trunc_eps: f64) -> Row<F> {
    debug_assert!((0.0..=1.0).contains(&p));
    if n == 0 || p == 0.0 {
        return Row::delta(0);
    }
    if p == 1.0 {
        return Row::delta(n);
    }
    let nf = n as f64;
    let mean = nf * p;
    let half = tail_halfwidth(nf * p * (1.0 - p), trunc_eps);
    let lo = (mean - half).floor().max(0.0) as u64;
    let hi = ((mean + half).ceil() as u64).min(n);
    finish_row(lo, hi, trunc_eps, |y| binom_logpmf(y, n, p).exp())
}

/// Sparse Poisson(mean) row over `0..=y_hi`, tails below `trunc_eps` dropped
/// per side, then renormalized.
pub fn pois_row<F: Scalar>(mean: f64, y_hi: u64, trunc_eps: f64) -> Row<F> {
    debug_assert!(mean >= 0.0);
    if mean == 0.0 {
        return Row::delta(0);
    }
    let half = tail_halfwidth(mean, trunc_eps);
    let lo = (mean - half).floor().max(0.0) as u64;
    let hi = ((mean + half).ceil() as u64).min(y_hi);
    finish_row(lo, hi, trunc_eps, |y| pois_logpmf(y, mean).exp())
}

// Evaluate the pmf on [lo, hi], trim each tail while its dropped cumulative
// mass stays below trunc_eps, renormalize, convert to F.
fn finish_row<F: Scalar>(lo: u64, hi: u64, trunc_eps: f64, pmf: impl Fn(u64) -> f64) -> Row<F> {
    let mut vals: Vec<f64> = (lo..=hi).map(&pmf).collect();
    let mut start = lo;
    // leading trim
    let mut dropped = 0.0;
    let mut cut = 0usize;
    while cut + 1 < vals.len() && dropped + vals[cut] < trunc_eps {
        dropped += vals[cut];
        cut += 1;
    }
    if cut > 0 {
        vals.drain(..cut);
        start += cut as u64;
    }
    // trailing trim
    dropped = 0.0;
    let mut keep = vals.len();
    while keep > 1 && dropped + vals[keep - 1] < trunc_eps {
        dropped += vals[keep - 1];
        keep -= 1;
    }
    vals.truncate(keep);
    let sum: f64 = vals.iter().sum();
    debug_assert!(sum > 0.0);
    Row {
        start,
        probs: vals.iter().map(|&v| F::of(v / sum)).collect(),
    }
}

// Degenerate single-symbol channel used whenever m_rho = 0.
fn degenerate<F: Scalar>() -> DiscreteChannel<F> {
    DiscreteChannel {
        inputs: vec![0],
        rows: vec![Row::delta(0)],
        y_max: 0,
    }
}

/// Transmitter stage: row `x` is the released-count law Binomial(m, alpha·x/m)
/// for `x` in `0..=m` (`m = ctx.m_rho`); the zero symbol is released
/// perfectly.
pub fn tx_matrix<F: Scalar>(ctx: &ThetaContext<F>, alpha: F) -> Result<DiscreteChannel<F>> {
    if !(alpha > F::zero() && alpha <= F::one()) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let m = ctx.m_rho;
    if m == 0 {
        return Ok(degenerate());
    }
    let a = alpha.f64();
    let rows = (0..=m)
        .map(|x| {
            let p = (a * (x as f64 / m as f64)).min(1.0);
            binom_row(m, p, TRUNC_EPS)
        })
        .collect();
    Ok(DiscreteChannel {
        inputs: (0..=m).collect(),
        rows,
        y_max: m,
    })
}

/// Propagation stage: row `x'` is Binomial(x', rho) — each released particle
/// independently arrives within the interval. Support is lower-triangular.
pub fn prop_matrix<F: Scalar>(m: u64, rho: F) -> Result<DiscreteChannel<F>> {
    stage_thinning(m, rho, "rho")
}

/// Receiver stage: row `y'` is Binomial(y', beta) — each arrived particle is
/// independently detected.
pub fn rx_matrix<F: Scalar>(m: u64, beta: F) -> Result<DiscreteChannel<F>> {
    stage_thinning(m, beta, "beta")
}

fn stage_thinning<F: Scalar>(m: u64, p: F, name: &str) -> Result<DiscreteChannel<F>> {
    if !(p >= F::zero() && p <= F::one()) {
        return Err(Error::domain(format!(
            "{name} must lie in [0, 1], got {p}"
        )));
    }
    let pf = p.f64();
    let rows = (0..=m).map(|x| binom_row(x, pf, TRUNC_EPS)).collect();
    Ok(DiscreteChannel {
        inputs: (0..=m).collect(),
        rows,
        y_max: m,
    })
}

/// End-to-end law in closed form: row `x` is Binomial(m, x·theta/m) over the
/// full input alphabet `0..=m`.
pub fn end_to_end_closed_form<F: Scalar>(ctx: &ThetaContext<F>) -> Result<DiscreteChannel<F>> {
    if ctx.m_rho == 0 {
        return Ok(degenerate());
    }
    let inputs: Vec<u64> = (0..=ctx.m_rho).collect();
    end_to_end_closed_form_for_inputs(ctx, &inputs)
}

/// End-to-end closed form restricted to the given input symbols (strictly
/// increasing, all within `0..=m_rho`). The output alphabet stays `0..=m_rho`.
pub fn end_to_end_closed_form_for_inputs<F: Scalar>(
    ctx: &ThetaContext<F>,
    inputs: &[u64],
) -> Result<DiscreteChannel<F>> {
    let m = ctx.m_rho;
    if m == 0 {
        return Ok(degenerate());
    }
    if inputs.is_empty() {
        return Err(Error::Dimension("input symbol list is empty".into()));
    }
    if !inputs.windows(2).all(|w| w[0] < w[1]) || *inputs.last().unwrap() > m {
        return Err(Error::Dimension(format!(
            "input symbols must be strictly increasing and at most m_rho = {m}"
        )));
    }
    let theta = ctx.theta.f64();
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::domain(format!(
            "theta must lie in (0, 1), got {theta}"
        )));
    }
    let rows = inputs
        .iter()
        .map(|&x| {
            let p = (theta * (x as f64 / m as f64)).min(1.0);
            binom_row(m, p, TRUNC_EPS)
        })
        .collect();
    Ok(DiscreteChannel {
        inputs: inputs.to_vec(),
        rows,
        y_max: m,
    })
}

/// Poisson substitute for the end-to-end law: row `x` is Poisson(x·theta),
/// all rows truncated at the smallest common `y_max` whose total tail mass
/// (summed across rows) is below `tail_eps`, then renormalized per row.
///
/// Intended for the regime of large `m_rho` and small `theta`; this builder
/// does not police that regime — compare rows against the closed form to
/// judge the approximation.
pub fn end_to_end_poisson<F: Scalar>(
    ctx: &ThetaContext<F>,
    tail_eps: F,
) -> Result<DiscreteChannel<F>> {
    let eps = tail_eps.f64();
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::domain(format!(
            "tail_eps must lie in (0, 0.5), got {eps}"
        )));
    }
    let m = ctx.m_rho;
    if m == 0 {
        return Ok(degenerate());
    }
    let theta = ctx.theta.f64();
    let max_mean = m as f64 * theta;
    // total tail mass above y across all rows; P(Poi(mu) > y) = gamma_p(y+1, mu)
    let total_tail = |y: u64| -> f64 {
        (1..=m)
            .map(|x| gamma_p(y as f64 + 1.0, x as f64 * theta))
            .sum()
    };
    let mut hi = max_mean.ceil().max(1.0) as u64;
    while total_tail(hi) >= eps {
        hi = hi.saturating_mul(2);
        if hi > (1 << 50) {
            return Err(Error::Budget("poisson tail search ran away".into()));
        }
    }
    let mut lo = 0u64;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if total_tail(mid) < eps {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let y_max = hi;
    if (m + 1).saturating_mul(y_max + 1) > MAX_DENSE_ENTRIES {
        return Err(Error::Budget(format!(
            "poisson channel of {} x {} entries exceeds the {} cap",
            m + 1,
            y_max + 1,
            MAX_DENSE_ENTRIES
        )));
    }
    let rows = (0..=m)
        .map(|x| {
            let mean = x as f64 * theta;
            if mean == 0.0 {
                return Row::delta(0);
            }
            let mut vals: Vec<f64> = (0..=y_max).map(|y| pois_logpmf(y, mean).exp()).collect();
            let sum: f64 = vals.iter().sum();
            for v in vals.iter_mut() {
                *v /= sum;
            }
            Row {
                start: 0,
                probs: vals.into_iter().map(F::of).collect(),
            }
        })
        .collect();
    Ok(DiscreteChannel {
        inputs: (0..=m).collect(),
        rows,
        y_max,
    })
}
