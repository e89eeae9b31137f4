//! First-arrival time models.
//!
//! A released particle reaches the receiver after a random transport time
//! `T`, or never. The law of `T` is allowed to be defective: its total mass
//! is the capture probability `eta <= 1`. The fraction of released particles
//! that arrive within a symbol interval of length `tau` is `rho = F_T(tau)`,
//! so interval design works through `F_T` and its inverse.

use std::sync::Arc;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::special::{erfc, erfcinv};

/// A (possibly defective) first-arrival time law on `(0, inf)`.
pub trait FirstArrival<F: Scalar>: Send + Sync {
    /// `P(T <= t)`. Zero for `t <= 0`; approaches the capture probability as
    /// `t -> inf`.
    fn cdf(&self, t: F) -> F;

    /// Smallest `t` with `cdf(t) = rho`. Defined for
    /// `0 < rho < capture_probability()`; `rho` at or beyond the capture
    /// probability has no finite preimage and is a domain error.
    fn icdf(&self, rho: F) -> Result<F>;

    /// Total arrival probability `sup_t cdf(t)`.
    fn capture_probability(&self) -> F;

    /// Draw one arrival time; `None` means the particle never arrives.
    fn sample(&self, rng: &mut dyn RngCore) -> Option<F>;

    /// The law of `T / s`, i.e. the same transport process described on a
    /// time axis compressed by `s > 0`.
    fn time_scaled(&self, s: F) -> Arc<dyn FirstArrival<F>>;
}

/// First-arrival law of diffusive transport: a scaled Lévy distribution with
/// an atom at infinity.
///
/// `cdf(t) = eta * erfc(sqrt(c / (2 t)))`, with `eta` in `(0, 1]` the capture
/// probability and `c > 0` the diffusion time constant. For transport over
/// distance `l` with diffusion coefficient `d`, `c = l^2 / (2 d)`; degrading
/// drift-free capture at a partially absorbing boundary at backward rate
/// ratio `r` gives `eta = r / (l + r)` in the reduced units used here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledLevy<F> {
    eta: F,
    c: F,
}

impl<F: Scalar> ScaledLevy<F> {
    /// Law with capture probability `eta` in `(0, 1]` and time constant
    /// `c > 0`.
    pub fn new(eta: F, c: F) -> Result<Self> {
        if !(eta > F::zero() && eta <= F::one()) {
            return Err(Error::domain(format!(
                "capture probability eta must lie in (0, 1], got {eta}"
            )));
        }
        if !(c > F::zero()) || !c.is_finite() {
            return Err(Error::domain(format!(
                "time constant c must be positive and finite, got {c}"
            )));
        }
        Ok(ScaledLevy { eta, c })
    }

    /// Law for diffusion over distance `l` with coefficient `d` and
    /// absorption ratio `r` (all positive): `eta = r / (l + r)`,
    /// `c = l^2 / (2 d)`.
    pub fn from_geometry(l: F, d: F, r: F) -> Result<Self> {
        if !(l > F::zero()) || !(d > F::zero()) || !(r > F::zero()) {
            return Err(Error::domain(format!(
                "geometry requires l > 0, d > 0, r > 0, got l={l} d={d} r={r}"
            )));
        }
        let two = F::of(2.0);
        Self::new(r / (l + r), l * l / (two * d))
    }

    /// Perfectly absorbing receiver (`eta = 1`) at distance `l` with
    /// diffusion coefficient `d`.
    pub fn one_dimensional(l: F, d: F) -> Result<Self> {
        if !(l > F::zero()) || !(d > F::zero()) {
            return Err(Error::domain(format!(
                "geometry requires l > 0, d > 0, got l={l} d={d}"
            )));
        }
        let two = F::of(2.0);
        Self::new(F::one(), l * l / (two * d))
    }

    /// Capture probability `eta`.
    pub fn eta(&self) -> F {
        self.eta
    }

    /// Diffusion time constant `c`.
    pub fn c(&self) -> F {
        self.c
    }
}

impl<F: Scalar> FirstArrival<F> for ScaledLevy<F> {
    fn cdf(&self, t: F) -> F {
        if t <= F::zero() {
            return F::zero();
        }
        let two = F::of(2.0);
        let arg = (self.c / (two * t)).sqrt();
        self.eta * F::of(erfc(arg.f64()))
    }

    fn icdf(&self, rho: F) -> Result<F> {
        if !(rho > F::zero()) {
            return Err(Error::domain(format!(
                "icdf needs rho > 0, got {rho}"
            )));
        }
        if rho >= self.eta {
            return Err(Error::domain(format!(
                "rho = {rho} is not below the capture probability eta = {}; \
                 no finite interval reaches it",
                self.eta
            )));
        }
        let u = (rho / self.eta).f64();
        let x = erfcinv(u);
        let two = F::of(2.0);
        Ok(self.c / (two * F::of(x * x)))
    }

    fn capture_probability(&self) -> F {
        self.eta
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<F> {
        use rand::distributions::{Distribution, Open01};
        let v: f64 = Open01.sample(rng);
        if v >= self.eta.f64() {
            return None;
        }
        let x = erfcinv(v / self.eta.f64());
        Some(self.c / F::of(2.0 * x * x))
    }

    fn time_scaled(&self, s: F) -> Arc<dyn FirstArrival<F>> {
        assert!(s > F::zero(), "time scale must be positive");
        Arc::new(ScaledLevy {
            eta: self.eta,
            c: self.c / s,
        })
    }
}
