//! Floating-point scalar abstraction.
//!
//! All numerics are generic over [`Scalar`] so the toolkit can run in f32 or
//! f64. Special functions (erfc and friends) are evaluated by f64 kernels and
//! converted at the boundary; the f64 instantiation is the precision-bearing
//! one and the one every documented tolerance refers to.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

/// Real scalar the toolkit computes with.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from an f64 kernel result.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Scalar")
    }

    /// Conversion into the f64 kernels.
    fn f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }

    /// Tolerance for "this row of probabilities sums to one" checks at this
    /// precision.
    fn row_tol() -> Self;
}

impl Scalar for f32 {
    fn row_tol() -> Self {
        1e-4
    }
}

impl Scalar for f64 {
    fn row_tol() -> Self {
        1e-12
    }
}
