//! Genetic-algorithm PID tuning for first-order-lag-plus-dead-time plants.
//!
//! The numerical core ([`lti`], [`delay`], [`metrics`], [`tuners`]) is generic
//! over the real scalar type; the optimizer ([`ga`]) and the experiment
//! harness ([`experiment`]) run in `f64`.

// `!(x > 0)` style guards are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod delay;
pub mod error;
pub mod experiment;
pub mod ga;
pub mod lti;
pub mod metrics;
mod scalar;
pub mod tuners;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Polynomial64 = lti::Polynomial<f64>;
pub type Polynomial32 = lti::Polynomial<f32>;
pub type TransferFunction64 = lti::TransferFunction<f64>;
pub type TransferFunction32 = lti::TransferFunction<f32>;
pub type StateSpace64 = lti::StateSpace<f64>;
pub type StateSpace32 = lti::StateSpace<f32>;
pub type StepResponse64 = lti::StepResponse<f64>;
pub type StepResponse32 = lti::StepResponse<f32>;
pub type DelayApprox64 = delay::DelayApprox<f64>;
pub type PerformanceIndices64 = metrics::PerformanceIndices<f64>;
pub type StandardMeasures64 = metrics::StandardMeasures<f64>;
pub type PidGains64 = tuners::PidGains<f64>;
pub type PlantFolpd64 = tuners::PlantFolpd<f64>;
pub type GeneBounds64 = tuners::GeneBounds<f64>;
