//! Interval-length optimization: capacity as a function of the arrival
//! probability `rho`, sweeps with refinement, binary-vs-optimal comparison,
//! and scaling invariance checks.
//!
//! The per-use mutual information must be traded against the interval length
//! `tau = F_T^{-1}(rho)`: the rate at an operating point is `MI(rho) / tau`.
//! Because `m_rho = floor(lambda tau)` jumps as `rho` grows, the rate curve is
//! piecewise smooth with discontinuities at alphabet-size changes, so the
//! global search is a grid scan plus a bounded scalar refinement inside the
//! constant-`m_rho` segment of the grid argmax.

use rayon::prelude::*;

use crate::capacity::{binary_capacity, blahut_arimoto, BaOptions};
use crate::channel::{
    end_to_end_closed_form_for_inputs, make_context, ChannelParams, ThetaContext, TRUNC_EPS,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Binary inputs are provably optimal (in the Poisson regime) whenever
/// `m_rho * theta_rho` is below this constant.
pub const BINARY_OPTIMALITY_PRODUCT: f64 = 3.3679;

/// How a capacity point is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// Closed-form capacity of the `{0, m_rho}` input restriction.
    BinaryClosedForm,
    /// Blahut–Arimoto over the (possibly subsampled) full alphabet.
    BlahutArimoto,
}

impl SolveMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveMode::BinaryClosedForm => "binary",
            SolveMode::BlahutArimoto => "ba",
        }
    }
}

impl std::fmt::Display for SolveMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Capacity of one operating point.
#[derive(Debug, Clone)]
pub struct CapacityPoint<F> {
    pub rho: F,
    /// Symbol interval `F_T^{-1}(rho)`, seconds.
    pub tau: F,
    /// End-to-end per-particle success at this point.
    pub theta: F,
    pub m_rho: u64,
    /// Bits per channel use (for BA: the certified achievable lower bound).
    pub mi_bits: F,
    /// `mi_bits / tau`, bits per second.
    pub rate: F,
    /// Solver bracket width in bits (0 for the closed form).
    pub gap_bits: F,
    pub converged: bool,
    /// Sparse input distribution as `(symbol, mass)` pairs, ascending;
    /// symbols `0` and `m_rho` are always present, other entries below the
    /// solver's keep threshold are dropped.
    pub pmf: Vec<(u64, F)>,
    pub mode: SolveMode,
}

impl<F: Scalar> CapacityPoint<F> {
    /// Mass at a literal input symbol.
    pub fn pmf_mass_at(&self, symbol: u64) -> F {
        self.pmf
            .iter()
            .find(|(s, _)| *s == symbol)
            .map(|&(_, p)| p)
            .unwrap_or_else(F::zero)
    }

    /// Total mass on symbols other than `0` and `m_rho`.
    pub fn interior_mass(&self) -> F {
        self.pmf
            .iter()
            .filter(|(s, _)| *s != 0 && *s != self.m_rho)
            .map(|&(_, p)| p)
            .sum()
    }
}

/// Knobs shared by [`capacity_at_with`], [`sweep`], and the comparison and
/// invariance drivers.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions<F> {
    pub ba: BaOptions<F>,
    /// Input-alphabet cap for the solver; larger alphabets are subsampled to
    /// this many symbols (endpoints always included).
    pub max_inputs: usize,
    /// Cap on total stored matrix entries; shrinks the subsampled alphabet
    /// further when rows are wide.
    pub entry_budget: u64,
    /// Golden-section refinement of the sweep argmax within its
    /// constant-`m_rho` segment.
    pub refine: bool,
    /// Extra capacity evaluations the refinement may spend.
    pub refine_evals: u32,
    /// Pmf entries below this mass are dropped from reports (endpoints are
    /// always kept).
    pub pmf_keep_eps: f64,
}

impl<F: Scalar> Default for SolveOptions<F> {
    fn default() -> Self {
        SolveOptions {
            ba: BaOptions::default(),
            max_inputs: 5001,
            entry_budget: 4_000_000,
            refine: true,
            refine_evals: 32,
            pmf_keep_eps: 1e-12,
        }
    }
}

/// Input symbols the solver will use for an alphabet of bound `m`: the full
/// `0..=m` when affordable, otherwise an even subsample always containing `0`
/// and `m`. The endpoints provably carry mass at the optimum, so they are
/// never sacrificed; dropping interior symbols makes the result a certified
/// lower bound on the unrestricted capacity.
pub fn ba_input_symbols<F: Scalar>(
    ctx: &ThetaContext<F>,
    max_inputs: usize,
    entry_budget: u64,
) -> Vec<u64> {
    let m = ctx.m_rho;
    let full = m + 1;
    // worst-case stored row width from the truncation window at the largest
    // row variance (bounded by m*theta)
    let l = (4.0 / TRUNC_EPS).ln();
    let sigma2 = m as f64 * ctx.theta.f64();
    let width = 2.0 * (l / 3.0 + (l * l / 9.0 + 2.0 * sigma2 * l).sqrt()) + 3.0;
    let k_budget = ((entry_budget as f64 / width).floor() as u64).max(2);
    let k = full.min(max_inputs as u64).min(k_budget);
    if k == full {
        return (0..=m).collect();
    }
    let mut symbols: Vec<u64> = (0..k)
        .map(|i| ((i as f64) * (m as f64) / ((k - 1) as f64)).round() as u64)
        .collect();
    symbols.dedup();
    debug_assert_eq!(symbols[0], 0);
    debug_assert_eq!(*symbols.last().unwrap(), m);
    symbols
}

/// Solve one operating point with default options.
pub fn capacity_at<F: Scalar>(
    params: &ChannelParams<F>,
    rho: F,
    mode: SolveMode,
) -> Result<CapacityPoint<F>> {
    capacity_at_with(params, rho, mode, &SolveOptions::default())
}

/// Solve one operating point: resolve the context, build the end-to-end
/// channel, run the requested solver, and divide by `tau`.
pub fn capacity_at_with<F: Scalar>(
    params: &ChannelParams<F>,
    rho: F,
    mode: SolveMode,
    opts: &SolveOptions<F>,
) -> Result<CapacityPoint<F>> {
    let ctx = make_context(params, rho)?;
    if ctx.m_rho == 0 {
        return Ok(CapacityPoint {
            rho,
            tau: ctx.tau,
            theta: ctx.theta,
            m_rho: 0,
            mi_bits: F::zero(),
            rate: F::zero(),
            gap_bits: F::zero(),
            converged: true,
            pmf: vec![(0, F::one())],
            mode,
        });
    }
    match mode {
        SolveMode::BinaryClosedForm => {
            let bc = binary_capacity(&ctx);
            Ok(CapacityPoint {
                rho,
                tau: ctx.tau,
                theta: ctx.theta,
                m_rho: ctx.m_rho,
                mi_bits: bc.mi_bits,
                rate: bc.rate_bits_per_sec,
                gap_bits: F::zero(),
                converged: true,
                pmf: vec![(0, F::one() - bc.xi_star), (ctx.m_rho, bc.xi_star)],
                mode,
            })
        }
        SolveMode::BlahutArimoto => {
            let symbols = ba_input_symbols(&ctx, opts.max_inputs, opts.entry_budget);
            let ch = end_to_end_closed_form_for_inputs(&ctx, &symbols)?;
            let r = blahut_arimoto(&ch, &opts.ba)?;
            let keep = F::of(opts.pmf_keep_eps);
            let pmf: Vec<(u64, F)> = symbols
                .iter()
                .zip(&r.pmf.probs)
                .filter(|&(&s, &p)| s == 0 || s == ctx.m_rho || p > keep)
                .map(|(&s, &p)| (s, p))
                .collect();
            Ok(CapacityPoint {
                rho,
                tau: ctx.tau,
                theta: ctx.theta,
                m_rho: ctx.m_rho,
                mi_bits: r.mi_bits,
                rate: r.mi_bits / ctx.tau,
                gap_bits: r.gap,
                converged: r.converged,
                pmf,
                mode,
            })
        }
    }
}

/// A strictly increasing grid of `rho` values.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoGrid<F> {
    values: Vec<F>,
}

impl<F: Scalar> RhoGrid<F> {
    /// Geometric spacing from `lo` to `hi` inclusive, `n >= 1` points.
    pub fn log_spaced(lo: F, hi: F, n: usize) -> Result<Self> {
        if !(lo > F::zero() && hi > lo) {
            return Err(Error::domain(format!(
                "need 0 < lo < hi, got lo={lo} hi={hi}"
            )));
        }
        if n == 0 {
            return Err(Error::domain("grid needs at least one point"));
        }
        if n == 1 {
            return Ok(RhoGrid { values: vec![lo] });
        }
        let (llo, lhi) = (lo.f64().ln(), hi.f64().ln());
        let values = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                F::of((llo + t * (lhi - llo)).exp())
            })
            .collect();
        Ok(RhoGrid { values })
    }

    /// The default study grid for a law with capture probability `eta`:
    /// 200 log-spaced points spanning `(1e-4 eta, (1 - 1e-4) eta)`.
    pub fn default_for(eta: F) -> Self {
        let lo = F::of(1e-4) * eta;
        let hi = (F::one() - F::of(1e-4)) * eta;
        Self::log_spaced(lo, hi, 200).expect("default grid bounds are valid")
    }

    /// Explicit values; must be strictly increasing and positive.
    pub fn explicit(values: Vec<F>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("grid needs at least one point"));
        }
        if !(values[0] > F::zero()) || !values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain(
                "grid values must be positive and strictly increasing",
            ));
        }
        Ok(RhoGrid { values })
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A sweep over a `rho` grid with its argmax.
#[derive(Debug, Clone)]
pub struct SweepResult<F> {
    /// Points in ascending `rho` order (the refined point, if any, is
    /// inserted in order).
    pub points: Vec<CapacityPoint<F>>,
    /// Index of the maximum-rate point.
    pub best: usize,
}

impl<F: Scalar> SweepResult<F> {
    pub fn best_point(&self) -> &CapacityPoint<F> {
        &self.points[self.best]
    }
}

fn argmax_rate<F: Scalar>(points: &[CapacityPoint<F>]) -> usize {
    let mut best = 0usize;
    for (i, p) in points.iter().enumerate() {
        if p.rate > points[best].rate {
            best = i;
        }
    }
    best
}

/// Evaluate the rate curve on a grid (grid points solve concurrently), find
/// the argmax, and optionally refine it by golden-section search inside the
/// `rho` interval where `m_rho` keeps its argmax value.
pub fn sweep<F: Scalar>(
    params: &ChannelParams<F>,
    grid: &RhoGrid<F>,
    mode: SolveMode,
    opts: &SolveOptions<F>,
) -> Result<SweepResult<F>> {
    if grid.is_empty() {
        return Err(Error::domain("sweep grid is empty"));
    }
    let mut points: Vec<CapacityPoint<F>> = grid
        .values()
        .par_iter()
        .map(|&rho| capacity_at_with(params, rho, mode, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut best = argmax_rate(&points);
    if opts.refine && points[best].rate > F::zero() {
        if let Some(candidate) = refine_argmax(params, &points[best], mode, opts)? {
            if candidate.rate > points[best].rate {
                let at = points.partition_point(|p| p.rho < candidate.rho);
                points.insert(at, candidate);
                best = argmax_rate(&points);
            }
        }
    }
    Ok(SweepResult { points, best })
}

// Golden-section maximization of the rate over the constant-m_rho interval
// containing the argmax: m_rho = m exactly when tau lands in [m/lambda,
// (m+1)/lambda), so the rho interval is the image of that under the arrival
// CDF. Returns the best evaluated point, if any evaluation succeeded.
fn refine_argmax<F: Scalar>(
    params: &ChannelParams<F>,
    seed: &CapacityPoint<F>,
    mode: SolveMode,
    opts: &SolveOptions<F>,
) -> Result<Option<CapacityPoint<F>>> {
    let m = seed.m_rho;
    if m == 0 || opts.refine_evals < 4 {
        return Ok(None);
    }
    let mf = F::of(m as f64);
    let lam = params.lambda;
    let rho_lo = params.arrival.cdf(mf / lam);
    let rho_hi = params.arrival.cdf((mf + F::one()) / lam);
    // tiny margins keep the floor from flickering at the edges
    let span = rho_hi - rho_lo;
    if !(span > F::zero()) {
        return Ok(None);
    }
    let margin = span * F::of(1e-9);
    let mut a = rho_lo + margin;
    let mut b = rho_hi - margin;
    if !(a < b) {
        return Ok(None);
    }
    let gr = F::of((5.0f64.sqrt() - 1.0) / 2.0);
    let mut evals_left = opts.refine_evals;
    let mut best: Option<CapacityPoint<F>> = None;
    let eval = |rho: F, best: &mut Option<CapacityPoint<F>>| -> Result<F> {
        let pt = capacity_at_with(params, rho, mode, opts)?;
        let rate = pt.rate;
        if best.as_ref().map_or(true, |b| rate > b.rate) {
            *best = Some(pt);
        }
        Ok(rate)
    };
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = eval(c, &mut best)?;
    let mut fd = eval(d, &mut best)?;
    evals_left = evals_left.saturating_sub(2);
    while evals_left > 0 && (b - a).abs() > span * F::of(1e-12) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = eval(c, &mut best)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = eval(d, &mut best)?;
        }
        evals_left -= 1;
    }
    Ok(best)
}

/// The binary-optimality product `m_rho * theta_rho` and whether it falls
/// below [`BINARY_OPTIMALITY_PRODUCT`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdCheck<F> {
    pub product: F,
    pub binary_expected_optimal: bool,
}

/// Evaluate the binary-optimality product for a context. Whether the Poisson
/// regime applies (large `m_rho`, small `theta`) is the caller's judgment.
pub fn binary_optimality_threshold<F: Scalar>(ctx: &ThetaContext<F>) -> ThresholdCheck<F> {
    let product = F::of(ctx.m_rho as f64) * ctx.theta;
    ThresholdCheck {
        product,
        binary_expected_optimal: product < F::of(BINARY_OPTIMALITY_PRODUCT),
    }
}

/// One grid row of the binary-vs-optimal comparison.
#[derive(Debug, Clone, Copy)]
pub struct CompareRow<F> {
    pub rho: F,
    pub m_rho: u64,
    /// `m_rho * theta_rho`.
    pub product: F,
    pub rate_binary: F,
    pub rate_optimal: F,
    /// Solver mass outside `{0, m_rho}`.
    pub interior_mass: F,
}

/// Binary-vs-optimal rates across a grid, with the threshold crossing.
#[derive(Debug, Clone)]
pub struct CompareTable<F> {
    pub rows: Vec<CompareRow<F>>,
    /// First grid `rho` whose product reaches [`BINARY_OPTIMALITY_PRODUCT`],
    /// if any.
    pub threshold_rho: Option<F>,
}

/// Compare the closed-form binary rate against the Blahut–Arimoto rate at
/// every grid point.
pub fn compare_binary_vs_optimal<F: Scalar>(
    params: &ChannelParams<F>,
    grid: &RhoGrid<F>,
    opts: &SolveOptions<F>,
) -> Result<CompareTable<F>> {
    if grid.is_empty() {
        return Err(Error::domain("comparison grid is empty"));
    }
    let rows: Vec<CompareRow<F>> = grid
        .values()
        .par_iter()
        .map(|&rho| {
            let b = capacity_at_with(params, rho, SolveMode::BinaryClosedForm, opts)?;
            let o = capacity_at_with(params, rho, SolveMode::BlahutArimoto, opts)?;
            let ctx = ThetaContext {
                rho,
                theta: b.theta,
                m_rho: b.m_rho,
                tau: b.tau,
            };
            let check = binary_optimality_threshold(&ctx);
            Ok(CompareRow {
                rho,
                m_rho: b.m_rho,
                product: check.product,
                rate_binary: b.rate,
                rate_optimal: o.rate,
                interior_mass: o.interior_mass(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let threshold_rho = rows
        .iter()
        .find(|r| r.product >= F::of(BINARY_OPTIMALITY_PRODUCT))
        .map(|r| r.rho);
    Ok(CompareTable {
        rows,
        threshold_rho,
    })
}

/// Outcome of the scaling-covariance check.
#[derive(Debug, Clone, Copy)]
pub struct InvarianceReport<F> {
    pub scale: F,
    pub base_best: usize,
    pub scaled_best: usize,
    pub argmax_unchanged: bool,
    /// Worst relative deviation of `rate_scaled / (scale * rate_base)` from 1
    /// over points with positive base rate.
    pub max_rate_rel_err: F,
    /// Worst elementwise difference between base and scaled pmfs.
    pub max_pmf_abs_diff: F,
    /// Grid points whose `m_rho` disagreed (0 when the covariance is exact).
    pub m_rho_mismatches: usize,
}

/// Check the diffusion-speed covariance on a grid.
///
/// Speeding transport up by `scale` (diffusion coefficient `d -> scale * d`,
/// so `c -> c / scale`) is a pure change of time unit; expressing the
/// generation rate in the same rescaled unit (`lambda -> scale * lambda`)
/// must multiply every rate by exactly `scale` while leaving `m_rho`, the
/// per-use mutual information, the optimal pmf, and the argmax grid index
/// unchanged. Refinement is disabled internally so indices stay comparable.
pub fn invariance_checks<F: Scalar>(
    params: &ChannelParams<F>,
    grid: &RhoGrid<F>,
    mode: SolveMode,
    scale: F,
    opts: &SolveOptions<F>,
) -> Result<InvarianceReport<F>> {
    if !(scale > F::zero()) || !scale.is_finite() {
        return Err(Error::domain(format!(
            "scale must be positive and finite, got {scale}"
        )));
    }
    let mut flat = *opts;
    flat.refine = false;
    let base = sweep(params, grid, mode, &flat)?;
    let scaled_params = ChannelParams {
        alpha: params.alpha,
        beta: params.beta,
        lambda: params.lambda * scale,
        arrival: params.arrival.time_scaled(scale),
    };
    let scaled = sweep(&scaled_params, grid, mode, &flat)?;
    let mut max_rate_rel_err = F::zero();
    let mut max_pmf_abs_diff = F::zero();
    let mut m_rho_mismatches = 0usize;
    for (b, s) in base.points.iter().zip(&scaled.points) {
        if b.m_rho != s.m_rho {
            m_rho_mismatches += 1;
            continue;
        }
        if b.rate > F::zero() {
            let err = (s.rate / (scale * b.rate) - F::one()).abs();
            max_rate_rel_err = max_rate_rel_err.max(err);
        }
        let symbols: Vec<u64> = b
            .pmf
            .iter()
            .map(|&(x, _)| x)
            .chain(s.pmf.iter().map(|&(x, _)| x))
            .collect();
        for x in symbols {
            let diff = (b.pmf_mass_at(x) - s.pmf_mass_at(x)).abs();
            max_pmf_abs_diff = max_pmf_abs_diff.max(diff);
        }
    }
    Ok(InvarianceReport {
        scale,
        base_best: base.best,
        scaled_best: scaled.best,
        argmax_unchanged: base.best == scaled.best,
        max_rate_rel_err,
        max_pmf_abs_diff,
        m_rho_mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrival::ScaledLevy;
    use std::sync::Arc;

    fn params(alpha: f64, beta: f64, lambda: f64, eta: f64, c: f64) -> ChannelParams<f64> {
        ChannelParams::new(
            alpha,
            beta,
            lambda,
            Arc::new(ScaledLevy::new(eta, c).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn binary_point_reference_rate() {
        // m_rho = 2198, theta = 0.1: phi underflows toward 0, MI -> 1 bit,
        // so the rate is 1/tau with tau the inverse CDF at rho/eta = 0.5
        let p = params(1.0, 1.0, 1000.0, 0.2, 1.0);
        let pt = capacity_at(&p, 0.1, SolveMode::BinaryClosedForm).unwrap();
        assert_eq!(pt.m_rho, 2198);
        assert!((pt.mi_bits - 1.0).abs() < 1e-12);
        assert!(
            (pt.rate - 0.45493642311957275).abs() < 1e-12,
            "rate = {}",
            pt.rate
        );
        assert_eq!(pt.rate, pt.mi_bits / pt.tau, "rate is the literal quotient");
    }

    #[test]
    fn degenerate_alphabet_is_zero_rate() {
        let p = params(1.0, 1.0, 1e-6, 1.0, 1.0);
        let pt = capacity_at(&p, 0.5, SolveMode::BlahutArimoto).unwrap();
        assert_eq!(pt.m_rho, 0);
        assert_eq!(pt.rate, 0.0);
        assert_eq!(pt.mi_bits, 0.0);
        assert_eq!(pt.pmf, vec![(0, 1.0)]);
    }

    #[test]
    fn ba_point_dominates_binary_point() {
        let p = params(1.0, 1.0, 50.0, 1.0, 1.0);
        for rho in [0.05, 0.2, 0.6] {
            let b = capacity_at(&p, rho, SolveMode::BinaryClosedForm).unwrap();
            let o = capacity_at(&p, rho, SolveMode::BlahutArimoto).unwrap();
            assert!(
                o.mi_bits >= b.mi_bits - 1e-9 - o.gap_bits,
                "rho={rho}: ba {} < binary {}",
                o.mi_bits,
                b.mi_bits
            );
        }
    }

    #[test]
    fn subsampled_alphabet_keeps_endpoints() {
        let ctx = ThetaContext {
            rho: 0.5,
            theta: 0.5,
            m_rho: 1_000_000,
            tau: 1.0,
        };
        let symbols = ba_input_symbols(&ctx, 5001, 4_000_000);
        assert!(symbols.len() <= 5001);
        assert_eq!(symbols[0], 0);
        assert_eq!(*symbols.last().unwrap(), 1_000_000);
        assert!(symbols.windows(2).all(|w| w[0] < w[1]));
        // entry budget binds harder when rows are wide
        let est_width = 2.0 * (35.7f64 / 3.0 + (35.7f64 * 35.7 / 9.0 + 2.0 * 500_000.0 * 35.7).sqrt());
        assert!((symbols.len() as f64) * est_width < 4_100_000.0);
        // small alphabets stay exact
        let small = ThetaContext {
            rho: 0.5,
            theta: 0.5,
            m_rho: 40,
            tau: 1.0,
        };
        assert_eq!(ba_input_symbols(&small, 5001, 4_000_000).len(), 41);
    }

    #[test]
    fn sweep_single_point_grid() {
        let p = params(1.0, 1.0, 10.0, 1.0, 1.0);
        let grid = RhoGrid::explicit(vec![0.3]).unwrap();
        let opts = SolveOptions {
            refine: false,
            ..SolveOptions::default()
        };
        let s = sweep(&p, &grid, SolveMode::BinaryClosedForm, &opts).unwrap();
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.best, 0);
    }

    #[test]
    fn sweep_refinement_beats_coarse_grid() {
        let p = params(1.0, 1.0, 5.0, 1.0, 1.0);
        let grid = RhoGrid::log_spaced(0.01, 0.95, 25).unwrap();
        let flat = SolveOptions {
            refine: false,
            ..SolveOptions::default()
        };
        let coarse = sweep(&p, &grid, SolveMode::BinaryClosedForm, &flat).unwrap();
        let refined = sweep(
            &p,
            &grid,
            SolveMode::BinaryClosedForm,
            &SolveOptions::default(),
        )
        .unwrap();
        let c_best = coarse.best_point();
        let r_best = refined.best_point();
        assert!(r_best.rate >= c_best.rate, "refinement lost ground");
        // refined point stays inside the constant-m segment of the argmax
        assert_eq!(r_best.m_rho, c_best.m_rho);
        // order maintained after insertion
        assert!(refined
            .points
            .windows(2)
            .all(|w| w[0].rho < w[1].rho));
    }

    #[test]
    fn sweep_boundary_rates_collapse() {
        let p = params(1.0, 1.0, 10.0, 1.0, 1.0);
        let grid = RhoGrid::default_for(1.0);
        let opts = SolveOptions {
            refine: false,
            ..SolveOptions::default()
        };
        let s = sweep(&p, &grid, SolveMode::BinaryClosedForm, &opts).unwrap();
        let best = s.best_point().rate;
        let first = s.points.first().unwrap().rate;
        let last = s.points.last().unwrap().rate;
        assert!(best > 0.0);
        assert!(first < 0.05 * best, "low-rho end: {first} vs best {best}");
        assert!(last < 0.05 * best, "high-rho end: {last} vs best {best}");
        assert_eq!(first, 0.0, "m_rho = 0 below one generation period");
    }

    #[test]
    fn threshold_product_examples() {
        let check = binary_optimality_threshold(&ThetaContext::<f64> {
            rho: 0.1,
            theta: 0.1,
            m_rho: 2198,
            tau: 1.0,
        });
        assert!((check.product - 219.8).abs() < 1e-12);
        assert!(!check.binary_expected_optimal);
        let check = binary_optimality_threshold(&ThetaContext::<f64> {
            rho: 0.1,
            theta: 0.1,
            m_rho: 2,
            tau: 1.0,
        });
        assert!((check.product - 0.2).abs() < 1e-15);
        assert!(check.binary_expected_optimal);
    }

    #[test]
    fn compare_table_reports_threshold_and_dominance() {
        let p = params(1.0, 1.0, 40.0, 1.0, 1.0);
        let grid = RhoGrid::log_spaced(0.02, 0.7, 8).unwrap();
        let t = compare_binary_vs_optimal(&p, &grid, &SolveOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 8);
        for r in &t.rows {
            assert!(
                r.rate_optimal >= r.rate_binary - 1e-9,
                "rho={}: optimal {} below binary {}",
                r.rho,
                r.rate_optimal,
                r.rate_binary
            );
        }
        // products grow along the grid, so the crossing is the first row
        // at or above the constant
        let crossing = t.rows.iter().find(|r| r.product >= BINARY_OPTIMALITY_PRODUCT);
        assert_eq!(t.threshold_rho, crossing.map(|r| r.rho));
        assert!(t.threshold_rho.is_some(), "this grid crosses the threshold");
    }

    #[test]
    fn invariance_under_time_rescaling() {
        let p = params(1.0, 1.0, 20.0, 0.5, 1.0);
        let grid = RhoGrid::log_spaced(0.005, 0.49, 40).unwrap();
        let report = invariance_checks(
            &p,
            &grid,
            SolveMode::BinaryClosedForm,
            10.0,
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(report.m_rho_mismatches, 0);
        assert!(report.argmax_unchanged);
        assert!(
            report.max_rate_rel_err < 1e-12,
            "rate covariance error {}",
            report.max_rate_rel_err
        );
        assert!(report.max_pmf_abs_diff < 1e-12);
        // scale = 1 is the identity
        let id = invariance_checks(
            &p,
            &grid,
            SolveMode::BinaryClosedForm,
            1.0,
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(id.max_rate_rel_err, 0.0);
        assert_eq!(id.max_pmf_abs_diff, 0.0);
    }
}
