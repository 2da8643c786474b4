//! Rate-distortion bounds for remote source coding of a continuous source
//! observed in additive Gaussian noise, for one encoder or many.
//!
//! The crate computes, for an arbitrary continuous source of finite
//! differential entropy:
//!
//! - differential entropy, entropy power, Fisher information, and the
//!   derivative of the entropy power under Gaussian smoothing
//!   ([`density`]);
//! - the single-encoder (remote) rate-distortion sandwich and its
//!   entropy-power-inequality refinements ([`remote`]);
//! - the multi-agent sum-rate region: outer-bound feasibility and minimum
//!   sum rate, the achievable inner bound, equal-variance closed forms,
//!   gap bounds between them, and the distributed-vs-centralized rate
//!   loss ([`region`]);
//! - the analog amplify-and-forward sensor network against the digital
//!   distortion floor, with a Monte Carlo check of the analog closed form
//!   ([`jscc`]).
//!
//! Throughout, lower bounds are built from entropy powers and upper
//! bounds from variances; replacing the source by a Gaussian of the same
//! variance maps each lower-bound formula onto its upper-bound partner.
//! All rates are natural-log (nats). Every bound is returned as a
//! [`bound::BoundResult`] carrying the value, a validity verdict for the
//! formula's domain condition, and a stable formula identifier that
//! resolves to the documentation table in the README.
//!
//! Core numerics are generic over the scalar type via [`scalar::Real`];
//! the `*64`/`*32` aliases below pick a concrete precision. The tight
//! default tolerances are meaningful at `f64`; `f32` instances run with
//! epsilon-scaled targets.

pub mod bound;
pub mod density;
pub mod error;
pub mod jscc;
pub mod mc;
pub mod quad;
pub mod region;
pub mod remote;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use scalar::{log_plus, Real};

/// Source density at double precision.
pub type Density64 = density::SourceDensity<f64>;
/// Source density at single precision.
pub type Density32 = density::SourceDensity<f32>;
/// Numeric tolerances at double precision.
pub type NumericConfig64 = density::NumericConfig<f64>;
/// Numeric tolerances at single precision.
pub type NumericConfig32 = density::NumericConfig<f32>;
/// Bound value at double precision.
pub type Bound64 = bound::BoundResult<f64>;
/// Rate-distortion hook at double precision.
pub type RdfHook64 = bound::RdfHook<f64>;
/// Multi-agent problem at double precision.
pub type CeoProblem64 = region::CeoProblem<f64>;
/// Sensor-network scenario at double precision.
pub type JsccScenario64 = jscc::JsccScenario<f64>;
/// Optimizer settings at double precision.
pub type OptimizerConfig64 = region::OptimizerConfig<f64>;
