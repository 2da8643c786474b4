//! Point-to-point bounds: the direct rate-distortion sandwich, the remote
//! sandwich through `V = E[X|Y]`, its explicit additive-noise weakenings,
//! and the entropy-power-inequality route.
//!
//! Lower bounds take entropy powers where upper bounds take variances;
//! each side is transcribed independently so the Gaussian-collapse tests
//! genuinely compare two code paths.

use crate::bound::{BoundKind, BoundResult, FormulaId, RdfHook};
use crate::density::{remote_stats, NumericConfig, RemoteStats, SourceDensity, SourceSummary};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Formula layer: plain functions of the statistics each equation needs.
/// The wrappers below attach validity checks and identifiers.
pub mod formula {
    use crate::scalar::{log_plus, Real};

    pub fn shannon_lower<T: Real>(n_x: T, d: T) -> T {
        log_plus(n_x / d) * T::of(0.5)
    }

    pub fn shannon_upper<T: Real>(var_x: T, d: T) -> T {
        log_plus(var_x / d) * T::of(0.5)
    }

    pub fn sandwich_lower<T: Real>(n_v: T, d0: T, d: T) -> T {
        log_plus(n_v / (d - d0)) * T::of(0.5)
    }

    pub fn sandwich_upper<T: Real>(var_v: T, d0: T, d: T) -> T {
        log_plus(var_v / (d - d0)) * T::of(0.5)
    }

    /// Explicit lower bound: the sandwich with `D0` replaced by its
    /// entropy-power floor `n_x n_z / n_y`. The clamp applies to the whole
    /// product — clamping the two factors separately is not a valid lower
    /// bound once one factor drops below 1. Needs `d > n_x n_z / n_y`.
    pub fn remote_explicit_lower<T: Real>(n_v: T, n_x: T, n_y: T, n_z: T, d: T) -> T {
        log_plus(n_v / d * (n_y / (n_y - n_x / d * n_z))) * T::of(0.5)
    }

    /// Explicit upper bound: the sandwich with `D0` replaced by its
    /// variance ceiling `var_x var_z / var_y`.
    /// Needs `d > var_x var_z / var_y`.
    pub fn remote_explicit_upper<T: Real>(var_v: T, var_x: T, var_y: T, var_z: T, d: T) -> T {
        log_plus(var_v / d * (var_y / (var_y - var_x / d * var_z))) * T::of(0.5)
    }

    /// EPI-route lower bound for a given direct rate `r = R_X(D)`. When the
    /// EPI term's denominator closes, the bound falls back to `r` itself.
    pub fn epi_lower<T: Real>(n_x: T, n_y: T, var_z: T, r: T) -> T {
        let denom = n_y - var_z * (T::of(2.0) * r).exp();
        if denom > T::zero() {
            r + log_plus(n_x / denom) * T::of(0.5)
        } else {
            r
        }
    }

    /// Forward-channel upper bound under squared error;
    /// needs `d > var_x var_z / var_y`.
    pub fn epi_upper<T: Real>(var_x: T, var_y: T, var_z: T, d: T) -> T {
        log_plus(var_x / d) * T::of(0.5)
            + log_plus(var_x / (var_y - var_x / d * var_z)) * T::of(0.5)
    }
}

/// A density paired with its observation channel, with every statistic the
/// point-to-point bounds need computed once.
#[derive(Debug, Clone)]
pub struct RemoteInstance<T> {
    pub source: SourceSummary<T>,
    pub stats: RemoteStats<T>,
}

impl<T: Real> RemoteInstance<T> {
    pub fn new(density: &SourceDensity<T>, noise_var: T, cfg: &NumericConfig<T>) -> Result<Self> {
        Ok(RemoteInstance {
            source: SourceSummary::of(density, cfg)?,
            stats: remote_stats(density, noise_var, cfg)?,
        })
    }

    pub fn var_y(&self) -> T {
        self.source.variance + self.stats.noise_var
    }
}

/// Direct-source sandwich: entropy-power lower, variance upper. Both are
/// valid at any `d > 0`.
pub fn shannon_bounds<T: Real>(
    source: &SourceSummary<T>,
    d: T,
) -> Result<(BoundResult<T>, BoundResult<T>)> {
    if !(d > T::zero()) {
        return Err(Error::InvalidParameter("distortion must be positive".into()));
    }
    let note = format!("d = {} > 0", d.as_f64());
    Ok((
        BoundResult::ok(
            FormulaId::ShannonLower,
            BoundKind::Lower,
            formula::shannon_lower(source.entropy_power, d),
            note.clone(),
        ),
        BoundResult::ok(
            FormulaId::ShannonUpper,
            BoundKind::Upper,
            formula::shannon_upper(source.variance, d),
            note,
        ),
    ))
}

/// Remote sandwich through the conditional mean: valid only for `d > D0`.
pub fn remote_sandwich<T: Real>(
    stats: &RemoteStats<T>,
    d: T,
) -> (BoundResult<T>, BoundResult<T>) {
    if !(d > stats.d0) {
        let note = format!("requires d > D0: d = {}, D0 = {}", d.as_f64(), stats.d0.as_f64());
        return (
            BoundResult::out_of_domain(FormulaId::RemoteSandwichLower, BoundKind::Lower, note.clone()),
            BoundResult::out_of_domain(FormulaId::RemoteSandwichUpper, BoundKind::Upper, note),
        );
    }
    let note = format!("d = {} > D0 = {}", d.as_f64(), stats.d0.as_f64());
    (
        BoundResult::ok(
            FormulaId::RemoteSandwichLower,
            BoundKind::Lower,
            formula::sandwich_lower(stats.entropy_power_v, stats.d0, d),
            note.clone(),
        ),
        BoundResult::ok(
            FormulaId::RemoteSandwichUpper,
            BoundKind::Upper,
            formula::sandwich_upper(stats.var_v, stats.d0, d),
            note,
        ),
    )
}

/// Explicit additive-noise bounds; each side has its own distortion
/// threshold, reported in the domain note when violated.
pub fn remote_explicit_from_stats<T: Real>(
    inst: &RemoteInstance<T>,
    d: T,
) -> (BoundResult<T>, BoundResult<T>) {
    let n_x = inst.source.entropy_power;
    let n_y = inst.stats.entropy_power_y;
    let n_z = inst.stats.noise_var; // Gaussian noise: N(Z) = var(Z)
    let var_x = inst.source.variance;
    let var_y = inst.var_y();
    let var_z = inst.stats.noise_var;

    let lower_floor = n_x * n_z / n_y;
    let lower = if d > lower_floor {
        BoundResult::ok(
            FormulaId::RemoteExplicitLower,
            BoundKind::Lower,
            formula::remote_explicit_lower(inst.stats.entropy_power_v, n_x, n_y, n_z, d),
            format!("d = {} > N(X)N(Z)/N(Y) = {}", d.as_f64(), lower_floor.as_f64()),
        )
    } else {
        BoundResult::out_of_domain(
            FormulaId::RemoteExplicitLower,
            BoundKind::Lower,
            format!("requires d > N(X)N(Z)/N(Y) = {}, got d = {}", lower_floor.as_f64(), d.as_f64()),
        )
    };

    let upper_floor = var_x * var_z / var_y;
    let upper = if d > upper_floor {
        BoundResult::ok(
            FormulaId::RemoteExplicitUpper,
            BoundKind::Upper,
            formula::remote_explicit_upper(inst.stats.var_v, var_x, var_y, var_z, d),
            format!("d = {} > var(X)var(Z)/var(Y) = {}", d.as_f64(), upper_floor.as_f64()),
        )
    } else {
        BoundResult::out_of_domain(
            FormulaId::RemoteExplicitUpper,
            BoundKind::Upper,
            format!("requires d > var(X)var(Z)/var(Y) = {}, got d = {}", upper_floor.as_f64(), d.as_f64()),
        )
    };
    (lower, upper)
}

/// Spec-shaped wrapper computing the stats in place.
pub fn remote_explicit<T: Real>(
    density: &SourceDensity<T>,
    noise_var: T,
    d: T,
    cfg: &NumericConfig<T>,
) -> Result<(BoundResult<T>, BoundResult<T>)> {
    let inst = RemoteInstance::new(density, noise_var, cfg)?;
    Ok(remote_explicit_from_stats(&inst, d))
}

/// EPI-route lower bound on the remote rate-distortion function, for the
/// distortion measure embodied by `rdf`. Always valid: when the EPI term's
/// condition fails the bound degrades to `R_X(D)` itself.
pub fn epi_remote_lower_from_stats<T: Real>(
    inst: &RemoteInstance<T>,
    d: T,
    rdf: &RdfHook<T>,
) -> BoundResult<T> {
    let r = rdf.rate(&inst.source, d);
    let n_y = inst.stats.entropy_power_y;
    let var_z = inst.stats.noise_var;
    let active = var_z * (T::of(2.0) * r).exp() < n_y;
    let note = if active {
        format!(
            "var(Z) e^(2 R_X(D)) = {} < N(Y) = {}",
            (var_z * (T::of(2.0) * r).exp()).as_f64(),
            n_y.as_f64()
        )
    } else {
        format!(
            "EPI term inactive (var(Z) e^(2 R_X(D)) >= N(Y) = {}); bound falls back to R_X(D)",
            n_y.as_f64()
        )
    };
    BoundResult::ok(
        FormulaId::EpiRemoteLower,
        BoundKind::Lower,
        formula::epi_lower(inst.source.entropy_power, n_y, var_z, r),
        note,
    )
}

/// Spec-shaped wrapper computing the stats in place.
pub fn epi_remote_lower<T: Real>(
    density: &SourceDensity<T>,
    noise_var: T,
    d: T,
    rdf: &RdfHook<T>,
    cfg: &NumericConfig<T>,
) -> Result<BoundResult<T>> {
    let inst = RemoteInstance::new(density, noise_var, cfg)?;
    Ok(epi_remote_lower_from_stats(&inst, d, rdf))
}

/// Forward-channel upper bound under squared error; uses only variances so
/// it needs no quadrature.
pub fn epi_remote_upper<T: Real>(density: &SourceDensity<T>, noise_var: T, d: T) -> BoundResult<T> {
    let var_x = density.variance();
    let var_y = var_x + noise_var;
    let floor = var_x * noise_var / var_y;
    if d > floor {
        BoundResult::ok(
            FormulaId::EpiRemoteUpper,
            BoundKind::Upper,
            formula::epi_upper(var_x, var_y, noise_var, d),
            format!("d = {} > var(X)var(Z)/var(Y) = {}", d.as_f64(), floor.as_f64()),
        )
    } else {
        BoundResult::out_of_domain(
            FormulaId::EpiRemoteUpper,
            BoundKind::Upper,
            format!("requires d > var(X)var(Z)/var(Y) = {}, got d = {}", floor.as_f64(), d.as_f64()),
        )
    }
}
