//! Bound values with validity verdicts, formula identifiers, and the
//! rate-distortion hook that feeds the general-distortion bounds.

use std::fmt;
use std::sync::Arc;

use crate::density::{SourceDensity, SourceSummary};
use crate::scalar::{log_plus, Real};

/// Whether a value bounds the quantity from below or above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Lower,
    Upper,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
        })
    }
}

/// Stable identifier of the formula behind a bound value.
///
/// The string ids returned by [`FormulaId::id`] appear in CSV/JSON output
/// and resolve to the documentation table in the repository README.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    ShannonLower,
    ShannonUpper,
    RemoteSandwichLower,
    RemoteSandwichUpper,
    RemoteExplicitLower,
    RemoteExplicitUpper,
    EpiRemoteLower,
    EpiRemoteUpper,
    CeoSumRateLower,
    CeoSumRateLowerMse,
    CeoSumRateUpperMse,
    CeoOuterMinSumRate,
    CeoInnerSumRate,
    GapConstantDistortion,
    GapScaledDistortion,
    RateLossLower,
    JsccDigitalFloor,
    JsccAnalogClosedForm,
    JsccAnalogSimulated,
    SmoothedEntropyPower,
    KappaFiniteDifference,
    KappaDeBruijn,
}

impl FormulaId {
    pub fn id(self) -> &'static str {
        match self {
            FormulaId::ShannonLower => "shannon-lower",
            FormulaId::ShannonUpper => "shannon-upper",
            FormulaId::RemoteSandwichLower => "remote-sandwich-lower",
            FormulaId::RemoteSandwichUpper => "remote-sandwich-upper",
            FormulaId::RemoteExplicitLower => "remote-explicit-lower",
            FormulaId::RemoteExplicitUpper => "remote-explicit-upper",
            FormulaId::EpiRemoteLower => "epi-remote-lower",
            FormulaId::EpiRemoteUpper => "epi-remote-upper",
            FormulaId::CeoSumRateLower => "ceo-sum-lower",
            FormulaId::CeoSumRateLowerMse => "ceo-sum-lower-mse",
            FormulaId::CeoSumRateUpperMse => "ceo-sum-upper-mse",
            FormulaId::CeoOuterMinSumRate => "ceo-outer-min",
            FormulaId::CeoInnerSumRate => "ceo-inner-achievable",
            FormulaId::GapConstantDistortion => "gap-constant-d",
            FormulaId::GapScaledDistortion => "gap-scaled-d",
            FormulaId::RateLossLower => "rate-loss-lower",
            FormulaId::JsccDigitalFloor => "jscc-digital-floor",
            FormulaId::JsccAnalogClosedForm => "jscc-analog-closed",
            FormulaId::JsccAnalogSimulated => "jscc-analog-sim",
            FormulaId::SmoothedEntropyPower => "smoothed-entropy-power",
            FormulaId::KappaFiniteDifference => "kappa-finite-difference",
            FormulaId::KappaDeBruijn => "kappa-de-bruijn",
        }
    }

    /// One-line description, mirrored in the README formula table.
    pub fn describe(self) -> &'static str {
        match self {
            FormulaId::ShannonLower => "entropy-power lower bound on the direct rate-distortion function",
            FormulaId::ShannonUpper => "max-entropy (variance) upper bound on the direct rate-distortion function",
            FormulaId::RemoteSandwichLower => "remote RDF lower bound through V = E[X|Y] and D0",
            FormulaId::RemoteSandwichUpper => "remote RDF upper bound through V = E[X|Y] and D0",
            FormulaId::RemoteExplicitLower => "explicit additive-noise remote lower bound (entropy powers)",
            FormulaId::RemoteExplicitUpper => "explicit additive-noise remote upper bound (variances)",
            FormulaId::EpiRemoteLower => "entropy-power-inequality remote lower bound through R_X(D)",
            FormulaId::EpiRemoteUpper => "forward-channel remote upper bound (variances)",
            FormulaId::CeoSumRateLower => "equal-variance sum-rate lower bound through R_X(D)",
            FormulaId::CeoSumRateLowerMse => "equal-variance sum-rate lower bound, squared-error form",
            FormulaId::CeoSumRateUpperMse => "equal-variance achievable sum rate, squared-error form",
            FormulaId::CeoOuterMinSumRate => "minimum sum rate consistent with the subset outer bound",
            FormulaId::CeoInnerSumRate => "achievable sum rate from Gaussian auxiliaries",
            FormulaId::GapConstantDistortion => "large-M gap bound at constant distortion",
            FormulaId::GapScaledDistortion => "gap bound for distortion scaling as d/M",
            FormulaId::RateLossLower => "lower bound on distributed-vs-centralized rate loss",
            FormulaId::JsccDigitalFloor => "distortion floor of digital (separate) coding",
            FormulaId::JsccAnalogClosedForm => "distortion of analog amplify-and-forward",
            FormulaId::JsccAnalogSimulated => "Monte Carlo distortion of analog amplify-and-forward",
            FormulaId::SmoothedEntropyPower => "entropy power of the source plus N(0, s)",
            FormulaId::KappaFiniteDifference => "entropy-power derivative at s=0, finite-difference route",
            FormulaId::KappaDeBruijn => "entropy-power derivative at s=0, de Bruijn route",
        }
    }
}

/// A bound value plus its validity verdict.
#[derive(Debug, Clone)]
pub struct BoundResult<T> {
    /// Value in nats, always nonnegative; meaningful only when `valid`.
    pub value: T,
    pub kind: BoundKind,
    /// False when the formula's domain condition fails at these inputs.
    pub valid: bool,
    /// The domain condition that was checked, instantiated with numbers.
    pub domain_note: String,
    pub formula: FormulaId,
}

impl<T: Real> BoundResult<T> {
    pub fn ok(formula: FormulaId, kind: BoundKind, value: T, domain_note: impl Into<String>) -> Self {
        BoundResult {
            value: value.max(T::zero()),
            kind,
            valid: true,
            domain_note: domain_note.into(),
            formula,
        }
    }

    pub fn out_of_domain(formula: FormulaId, kind: BoundKind, domain_note: impl Into<String>) -> Self {
        BoundResult {
            value: T::zero(),
            kind,
            valid: false,
            domain_note: domain_note.into(),
            formula,
        }
    }
}

/// Evaluator of the direct rate-distortion function `D -> R_X(D)` used by
/// the general-distortion bounds.
#[derive(Clone)]
pub enum RdfHook<T> {
    /// `log+(N(X)/D)/2`: valid lower envelope under squared error.
    ShannonLbMse,
    /// `log+(var(X)/D)/2`: exact for Gaussian sources under squared error.
    GaussianExact,
    /// Caller-supplied evaluator for other distortion measures.
    UserSupplied(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Real> RdfHook<T> {
    /// `GaussianExact` for Gaussian sources, `ShannonLbMse` otherwise.
    pub fn default_for(density: &SourceDensity<T>) -> Self {
        match density {
            SourceDensity::Gaussian { .. } => RdfHook::GaussianExact,
            _ => RdfHook::ShannonLbMse,
        }
    }

    pub fn rate(&self, source: &SourceSummary<T>, d: T) -> T {
        match self {
            RdfHook::ShannonLbMse => log_plus(source.entropy_power / d) * T::of(0.5),
            RdfHook::GaussianExact => log_plus(source.variance / d) * T::of(0.5),
            RdfHook::UserSupplied(f) => f(d),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            RdfHook::ShannonLbMse => "shannon-lb-mse",
            RdfHook::GaussianExact => "gaussian-exact",
            RdfHook::UserSupplied(_) => "user-supplied",
        }
    }
}

impl<T> fmt::Debug for RdfHook<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RdfHook::ShannonLbMse => "RdfHook::ShannonLbMse",
            RdfHook::GaussianExact => "RdfHook::GaussianExact",
            RdfHook::UserSupplied(_) => "RdfHook::UserSupplied(..)",
        })
    }
}
