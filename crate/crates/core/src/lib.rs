//! Steady-state analysis of a single transmission branch with frequency as
//! an explicit variable.
//!
//! * [`line_model`]: exact and lumped Π two-port models and Π-model error.
//! * [`power_flow`]: per-unit branch flows, the 0 Hz limit and limit checks.
//! * [`max_transfer`]: maximum active power transfer and frequency sweeps.
//! * [`power_circle`]: power circles and the feasible `(P, Q)` region.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

// `!(x > 0)` style guards deliberately reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod line_model;
pub mod max_transfer;
pub mod power_circle;
pub mod power_flow;
pub mod scalar;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Scalar;

pub type ComplexValue = num_complex::Complex64;
pub type Hz = units::Frequency<f64>;
pub type Base = units::PerUnitBase<f64>;
pub type Line = line_model::DistributedLineParams<f64>;
pub type Abcd = line_model::AbcdMatrix<f64>;
pub type PiBranch = line_model::LumpedPiBranch<f64>;
pub type Admittance = power_flow::BranchAdmittance<f64>;
pub type Limits = power_flow::OperatingLimits<f64>;
pub type Operating = power_flow::OperatingPoint<f64>;
pub type Flow = power_flow::FlowResult<f64>;
pub type Study = max_transfer::TransferStudy<f64>;
pub type TransferPoint = max_transfer::MaxTransferPoint<f64>;
pub type Sweep = max_transfer::SweepResult<f64>;
pub type Circle = power_circle::PowerCircle<f64>;
pub type Region = power_circle::FeasibleRegion<f64>;
