//! Capacity of the particle-intensity channel.
//!
//! A transmitter releases up to `m` particles per symbol interval; each is
//! released with probability `alpha`, arrives within the interval with
//! probability `rho` (set by a first-arrival time law), and is registered by
//! the receiver with probability `beta`. The end-to-end law for the count the
//! receiver sees is a binomial thinning of the released count, and the
//! achievable information rate depends on the interval length through both
//! the per-symbol capacity and the symbol rate.
//!
//! The crate provides:
//! - first-arrival time models ([`arrival`]),
//! - exact stagewise and end-to-end channel matrices ([`channel`]),
//! - mutual information and a certified Blahut–Arimoto solver ([`capacity`]),
//! - closed-form binary-input capacity ([`capacity::binary_capacity`]),
//! - interval-length optimization and rate sweeps ([`optimize`]),
//! - Monte Carlo validation ([`simulate`], [`stats`]),
//! - report serialization ([`io`]).
//!
//! Numeric code is generic over the scalar type via [`Scalar`]; `f64` is the
//! tested default and `f32` is available for storage-bound experiments.

// frozen reference values keep the full precision their oracle printed
#![allow(clippy::excessive_precision)]
// `!(x > 0)`-style guards deliberately treat NaN as out of domain
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrival;
pub mod capacity;
pub mod channel;
pub mod error;
pub mod io;
pub mod optimize;
pub mod scalar;
pub mod simulate;
pub mod special;
pub mod stats;

pub use arrival::{FirstArrival, ScaledLevy};
pub use capacity::{
    binary_capacity, binary_mi, blahut_arimoto, mutual_information, BaOptions, BaResult,
    BinaryCapacity, InputPmf,
};
pub use channel::{
    end_to_end_closed_form, make_context, ChannelParams, DiscreteChannel, Row, ThetaContext,
};
pub use error::{Error, Result};
pub use optimize::{
    capacity_at, compare_binary_vs_optimal, invariance_checks, sweep, CapacityPoint, CompareTable,
    InvarianceReport, RhoGrid, SolveMode, SolveOptions, SweepResult, BINARY_OPTIMALITY_PRODUCT,
};
pub use scalar::Scalar;
pub use simulate::{empirical_channel, EmpiricalChannel, SamplingPath, SimConfig};

/// The toolkit's default concrete scalar.
pub type F64 = f64;
/// Reduced-precision scalar for storage-bound experiments.
pub type F32 = f32;
