//! Error type shared by all numerical routines.
//!
//! Payloads are stored as `f64` regardless of the scalar the computation
//! ran at, so the enum stays non-generic.

use thiserror::Error;

/// Errors surfaced by density evaluation, bound computation, the region
/// machinery, and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Tail truncation or quadrature refinement failed to reach tolerance.
    #[error("density integral did not converge: {0}")]
    NonIntegrableDensity(String),

    /// Gaussian smoothing kernel narrower than the tabulated grid spacing.
    #[error("smoothing kernel std {kernel_std:.3e} under-resolves grid step {grid_step:.3e}")]
    ConvolutionUnderresolved { kernel_std: f64, grid_step: f64 },

    /// The two entropy-power derivative routes disagree beyond tolerance.
    #[error(
        "entropy-power derivative unstable: finite-difference {finite_difference:.6e} vs \
         de Bruijn {de_bruijn:.6e} (relative tolerance {tolerance:.1e})"
    )]
    DerivativeUnstable {
        finite_difference: f64,
        de_bruijn: f64,
        tolerance: f64,
    },

    /// Posterior mass fell below the floating-point floor.
    #[error("posterior mass underflowed at y = {y}")]
    PosteriorUnderflow { y: f64 },

    /// A subset of agents must be nonempty.
    #[error("empty agent subset")]
    EmptySubset,

    /// Subset member index outside `0..m`.
    #[error("agent index {index} out of range for m = {m}")]
    AgentIndexOutOfRange { index: usize, m: usize },

    /// A logarithm argument fell below its guaranteed floor, which signals
    /// a numerical defect in the inputs rather than a domain condition.
    #[error("log argument {value:.6e} below floor {floor:.6e}")]
    LogDomain { value: f64, floor: f64 },

    /// No auxiliary rates make the outer-bound constraint set consistent;
    /// the requested distortion is below what the observation model allows.
    #[error("outer bound infeasible: no auxiliary rates reach distortion {d}")]
    Infeasible { d: f64 },

    /// Distortion below the full-cooperation noisy-observation floor.
    #[error("distortion {d} not reachable; floor is {floor}")]
    DistortionUnreachable { d: f64, floor: f64 },

    /// The smoothed-entropy-power derivative needed by this bound is not
    /// available for the density.
    #[error("kappa unavailable: {0}")]
    KappaUnavailable(String),

    /// Rate-loss parameter outside its admissible interval.
    #[error("alpha = {alpha} outside (1, {max}]")]
    AlphaOutOfRange { alpha: f64, max: f64 },

    /// The density family has no sampler (tabulated data without a usable
    /// inverse-CDF grid).
    #[error("no sampler available for this density")]
    SamplerUnavailable,

    /// Subset enumeration is capped; only closed-form paths work beyond it.
    #[error("m = {m} exceeds the subset-enumeration cap {cap}")]
    TooManyAgents { m: usize, cap: usize },

    /// Malformed tabulated density file.
    #[error("tabulated density file: {0}")]
    TabulatedFormat(String),

    /// Parameter validation failure.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
