//! Multi-agent sum-rate region machinery: subset sufficient statistics,
//! the auxiliary-rate outer bound and its minimum sum rate, the achievable
//! inner bound, equal-variance closed forms, gap bounds, and the
//! distributed-vs-centralized rate loss.

mod lp;
mod optimize;
mod waterfill;

pub use lp::{min_sum_rate_lp, LpSolution};
pub use optimize::{
    inner_sum_rate, outer_min_sum_rate, region_check, OptimizerConfig, OuterSolution,
    RegionQuery, RegionVerdict,
};
pub(crate) use waterfill::{inner_precision_split, max_log_under_budget};

use crate::bound::{BoundKind, BoundResult, FormulaId, RdfHook};
use crate::density::{
    kappa_value, smoothed_entropy_power, NumericConfig, SourceDensity, SourceSummary,
};
use crate::error::{Error, Result};
use crate::scalar::{log_plus, Real};

/// Enumerating 2^m subsets caps the agent count for the region paths;
/// closed-form equal-variance paths have no such cap.
pub const MAX_ENUMERATED_AGENTS: usize = 12;

/// Pure formula layer; wrappers below attach domain checks.
pub mod formula {
    use crate::scalar::{log_plus, Real};

    /// Equal-variance sum-rate lower bound through the direct rate `r`;
    /// `None` outside its domain `var_z e^{2r} < m N(Y(M))`.
    pub fn ceo_lower_general<T: Real>(r: T, n_x: T, n_ym: T, var_z: T, m: usize) -> Option<T> {
        let mf = T::of(m as f64);
        let denom = mf * n_ym - var_z * (T::of(2.0) * r).exp();
        if denom <= T::zero() {
            return None;
        }
        Some(r + mf * T::of(0.5) * log_plus(mf * n_x / denom))
    }

    /// Squared-error specialization of the sum-rate lower bound
    /// (entropy powers); domain `d > n_x var_z / (m n_ym)`.
    pub fn ceo_lower_mse<T: Real>(n_x: T, n_ym: T, var_z: T, m: usize, d: T) -> T {
        let mf = T::of(m as f64);
        log_plus(n_x / d) * T::of(0.5)
            + mf * T::of(0.5) * log_plus(mf * n_x / (mf * n_ym - n_x / d * var_z))
    }

    /// Achievable sum rate with Gaussian auxiliaries (variances);
    /// domain `d > var_x var_z / (m var_ym)`.
    pub fn ceo_upper_mse<T: Real>(var_x: T, var_ym: T, var_z: T, m: usize, d: T) -> T {
        let mf = T::of(m as f64);
        log_plus(var_x / d) * T::of(0.5)
            + mf * T::of(0.5) * log_plus(mf * var_x / (mf * var_ym - var_x / d * var_z))
    }

    /// Gap bound shared shape: `ln(var/N)/2 + (kappa var - N) var_z /
    /// (2 var N scale)` where `scale` is 1 for the constant-distortion
    /// limit and `1 - var_z/d` for distortion `d/M`.
    pub fn gap_bound<T: Real>(var_x: T, n_x: T, kappa: T, var_z: T, scale: T) -> T {
        (var_x / n_x).ln() * T::of(0.5)
            + (kappa * var_x - n_x) * var_z / (T::of(2.0) * var_x * n_x * scale)
    }

    /// Rate-loss lower bound before its nonnegativity clamp.
    pub fn rate_loss<T: Real>(gamma: T, alpha: T, kappa: T, var_z: T, n_x: T, m: usize) -> T {
        let mf = T::of(m as f64);
        let ag = alpha * gamma;
        let first = mf
            * T::of(0.5)
            * log_plus(ag / ((ag - T::one()) * (T::one() + kappa * var_z / (mf * n_x))));
        let second = (gamma * gamma * alpha / (alpha - T::one())).ln() * T::of(0.5);
        first - second
    }
}

/// One multi-agent problem instance: the source, per-agent Gaussian
/// observation noises, the direct rate-distortion hook, and the target
/// distortion.
#[derive(Debug, Clone)]
pub struct CeoProblem<T: Real> {
    pub density: SourceDensity<T>,
    pub noise_vars: Vec<T>,
    pub rdf: RdfHook<T>,
    pub distortion: T,
}

impl<T: Real> CeoProblem<T> {
    pub fn new(
        density: SourceDensity<T>,
        noise_vars: Vec<T>,
        rdf: RdfHook<T>,
        distortion: T,
    ) -> Result<Self> {
        if noise_vars.is_empty() {
            return Err(Error::InvalidParameter("need at least one agent".into()));
        }
        if noise_vars.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidParameter("noise variances must be positive".into()));
        }
        if !(distortion > T::zero()) {
            return Err(Error::InvalidParameter("distortion must be positive".into()));
        }
        Ok(CeoProblem {
            density,
            noise_vars,
            rdf,
            distortion,
        })
    }

    pub fn m(&self) -> usize {
        self.noise_vars.len()
    }

    /// The common noise variance, when all agents share one.
    pub fn equal_variance(&self) -> Option<T> {
        let v0 = self.noise_vars[0];
        if self.noise_vars.iter().all(|&v| v == v0) {
            Some(v0)
        } else {
            None
        }
    }

    /// Precompute everything the region evaluations reuse.
    pub fn prepare(&self, cfg: &NumericConfig<T>) -> Result<PreparedCeo<'_, T>> {
        PreparedCeo::new(self, cfg)
    }
}

/// Agent subset as a bitmask over `0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subset(pub u32);

impl Subset {
    pub fn from_indices(indices: &[usize], m: usize) -> Result<Self> {
        let mut mask = 0u32;
        for &i in indices {
            if i >= m {
                return Err(Error::AgentIndexOutOfRange { index: i, m });
            }
            mask |= 1 << i;
        }
        Ok(Subset(mask))
    }

    pub fn full(m: usize) -> Self {
        Subset(((1u64 << m) - 1) as u32)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn complement(self, m: usize) -> Self {
        Subset(Self::full(m).0 & !self.0)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn indices(self, m: usize) -> Vec<usize> {
        (0..m).filter(|&i| self.contains(i)).collect()
    }
}

/// Sufficient-statistic data of one agent subset.
#[derive(Debug, Clone, Copy)]
pub struct SubsetStats<T> {
    pub subset: Subset,
    /// Harmonic mean of the member noise variances.
    pub harmonic_var: T,
    pub size: usize,
    /// Entropy power of `Y(A) = X + Z(A)`, where `Z(A)` is Gaussian with
    /// variance `harmonic_var / |A|`.
    pub entropy_power_ya: T,
}

/// Combiner statistics for a subset of agents.
pub fn subset_stats<T: Real>(
    problem: &CeoProblem<T>,
    subset: Subset,
    cfg: &NumericConfig<T>,
) -> Result<SubsetStats<T>> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let m = problem.m();
    if subset.0 >> m != 0 {
        return Err(Error::AgentIndexOutOfRange {
            index: 31 - subset.0.leading_zeros() as usize,
            m,
        });
    }
    let size = subset.len();
    let inv_sum = (0..m)
        .filter(|&i| subset.contains(i))
        .map(|i| T::one() / problem.noise_vars[i])
        .fold(T::zero(), |a, b| a + b);
    let harmonic_var = T::of(size as f64) / inv_sum;
    let s = harmonic_var / T::of(size as f64);
    let entropy_power_ya = smoothed_entropy_power(&problem.density, s, cfg)?.entropy_power;
    Ok(SubsetStats {
        subset,
        harmonic_var,
        size,
        entropy_power_ya,
    })
}

/// A problem with its per-subset statistics precomputed: `c[mask]` is
/// `N(Y(A)) |A| / harmonic_var(A)`, the auxiliary-rate-independent part of
/// the outer-bound log argument.
#[derive(Debug, Clone)]
pub struct PreparedCeo<'a, T: Real> {
    pub problem: &'a CeoProblem<T>,
    pub source: SourceSummary<T>,
    /// Direct rate `R_X(D)` from the hook.
    pub r_x_d: T,
    pub inv_noise: Vec<T>,
    c_mask: Vec<T>,
    /// Entropy power of the all-agent combiner `Y(M)`.
    pub entropy_power_ym: T,
}

impl<'a, T: Real> PreparedCeo<'a, T> {
    fn new(problem: &'a CeoProblem<T>, cfg: &NumericConfig<T>) -> Result<Self> {
        let m = problem.m();
        if m > MAX_ENUMERATED_AGENTS {
            return Err(Error::TooManyAgents {
                m,
                cap: MAX_ENUMERATED_AGENTS,
            });
        }
        let source = SourceSummary::of(&problem.density, cfg)?;
        let r_x_d = problem.rdf.rate(&source, problem.distortion);
        let inv_noise: Vec<T> = problem.noise_vars.iter().map(|&v| T::one() / v).collect();

        let full = (1usize << m) - 1;
        let mut wsum = vec![T::zero(); full + 1];
        for mask in 1..=full {
            let lsb = mask & mask.wrapping_neg();
            let i = lsb.trailing_zeros() as usize;
            wsum[mask] = wsum[mask ^ lsb] + inv_noise[i];
        }
        // N(Y(A)) depends on the subset only through s = 1/wsum; equal
        // variances collapse the 2^m quadratures to m distinct ones.
        let mut cache: Vec<(T, T)> = Vec::new();
        let mut c_mask = vec![T::zero(); full + 1];
        for mask in 1..=full {
            let s = T::one() / wsum[mask];
            let n = match cache.iter().find(|(cs, _)| *cs == s) {
                Some((_, n)) => *n,
                None => {
                    let n = smoothed_entropy_power(&problem.density, s, cfg)?.entropy_power;
                    cache.push((s, n));
                    n
                }
            };
            c_mask[mask] = n * wsum[mask];
        }
        let entropy_power_ym = c_mask[full] / wsum[full];
        Ok(PreparedCeo {
            problem,
            source,
            r_x_d,
            inv_noise,
            c_mask,
            entropy_power_ym,
        })
    }

    pub fn m(&self) -> usize {
        self.problem.m()
    }

    fn full_mask(&self) -> usize {
        (1usize << self.m()) - 1
    }

    /// Log argument of the outer constraint for complement mask `cmask`:
    /// `c[cmask] - N(X) sum_{i in cmask} e^{-2 r_i} / var(Z_i)`.
    fn log_argument(&self, cmask: usize, r: &[T]) -> T {
        let mut sum = T::zero();
        for i in 0..self.m() {
            if cmask & (1 << i) != 0 {
                sum += (T::of(-2.0) * r[i]).exp() * self.inv_noise[i];
            }
        }
        self.c_mask[cmask] - self.source.entropy_power * sum
    }

    /// Log argument of the outer-bound constraint for a strict subset `A`:
    /// `N(Y(A^c)) |A^c| / harmonic_var(A^c) - N(X) sum_{i in A^c}
    /// e^{-2 r_i} / var(Z_i)`. Guaranteed to stay at or above 1 for every
    /// `r >= 0`, with equality reached by Gaussian sources at `r = 0`.
    pub fn outer_log_argument(&self, subset: Subset, r: &[T]) -> Result<T> {
        let m = self.m();
        if r.len() != m {
            return Err(Error::InvalidParameter(format!(
                "r has {} entries for m = {m}",
                r.len()
            )));
        }
        let full = self.full_mask();
        let mask = subset.0 as usize;
        if mask >= full {
            return Err(Error::InvalidParameter(
                "log argument defined for strict subsets only".into(),
            ));
        }
        Ok(self.log_argument(full ^ mask, r))
    }

    /// Right side of the outer-bound constraint for subset `A` at auxiliary
    /// rates `r`: the full set yields `R_X(D) + sum r_i`; the empty set
    /// yields the pure feasibility value that must be nonpositive.
    pub fn outer_constraint(&self, subset: Subset, r: &[T]) -> Result<T> {
        let m = self.m();
        if r.len() != m {
            return Err(Error::InvalidParameter(format!(
                "r has {} entries for m = {m}",
                r.len()
            )));
        }
        if r.iter().any(|&x| !(x >= T::zero())) {
            return Err(Error::InvalidParameter("auxiliary rates must be >= 0".into()));
        }
        if subset.0 as usize > self.full_mask() {
            return Err(Error::AgentIndexOutOfRange {
                index: 31 - subset.0.leading_zeros() as usize,
                m,
            });
        }
        let mask = subset.0 as usize;
        let full = self.full_mask();
        let sum_r_a: T = (0..m)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| r[i])
            .fold(T::zero(), |a, b| a + b);
        if mask == full {
            return Ok(self.r_x_d + sum_r_a);
        }
        let cmask = full ^ mask;
        let arg = self.log_argument(cmask, r);
        let floor = T::one() - T::of(1e-9);
        if arg < floor {
            return Err(Error::LogDomain {
                value: arg.as_f64(),
                floor: 1.0,
            });
        }
        Ok(self.r_x_d - arg.max(T::one()).ln() * T::of(0.5) + sum_r_a)
    }

    /// All constraint right sides at once: index by subset mask, entry 0
    /// holding the empty-set feasibility value.
    pub(crate) fn constraint_vector(&self, r: &[T]) -> Result<Vec<T>> {
        let m = self.m();
        let full = self.full_mask();
        let mut decay = vec![T::zero(); full + 1];
        let mut sum_r = vec![T::zero(); full + 1];
        for mask in 1..=full {
            let lsb = mask & mask.wrapping_neg();
            let i = lsb.trailing_zeros() as usize;
            decay[mask] = decay[mask ^ lsb] + (T::of(-2.0) * r[i]).exp() * self.inv_noise[i];
            sum_r[mask] = sum_r[mask ^ lsb] + r[i];
        }
        let mut f = vec![T::zero(); full + 1];
        let floor = T::one() - T::of(1e-9);
        for mask in 0..=full {
            if mask == full {
                f[mask] = self.r_x_d + sum_r[full];
            } else {
                let cmask = full ^ mask;
                let arg = self.c_mask[cmask] - self.source.entropy_power * decay[cmask];
                if arg < floor {
                    return Err(Error::LogDomain {
                        value: arg.as_f64(),
                        floor: 1.0,
                    });
                }
                f[mask] = self.r_x_d - arg.max(T::one()).ln() * T::of(0.5) + sum_r[mask];
            }
        }
        let _ = m;
        Ok(f)
    }

    /// Mirror of [`Self::outer_constraint`] with every entropy power
    /// replaced by the corresponding variance: the achievable-region
    /// constraint with Gaussian auxiliaries.
    pub fn inner_constraint(&self, subset: Subset, r: &[T]) -> Result<T> {
        let m = self.m();
        if r.len() != m {
            return Err(Error::InvalidParameter(format!(
                "r has {} entries for m = {m}",
                r.len()
            )));
        }
        let mask = subset.0 as usize;
        let full = self.full_mask();
        let var_x = self.source.variance;
        let r_var = log_plus(var_x / self.problem.distortion) * T::of(0.5);
        let sum_r_a: T = (0..m)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| r[i])
            .fold(T::zero(), |a, b| a + b);
        if mask == full {
            return Ok(r_var + sum_r_a);
        }
        let cmask = full ^ mask;
        let mut wsum = T::zero();
        let mut decay = T::zero();
        for i in 0..m {
            if cmask & (1 << i) != 0 {
                wsum += self.inv_noise[i];
                decay += (T::of(-2.0) * r[i]).exp() * self.inv_noise[i];
            }
        }
        // var(Y(A^c)) |A^c| / harmonic = var_x wsum + 1 for every subset.
        let arg = var_x * wsum + T::one() - var_x * decay;
        Ok(r_var - arg.max(T::of(1e-300)).ln() * T::of(0.5) + sum_r_a)
    }
}

/// Equal-variance sum-rate lower bound through the rate-distortion hook.
pub fn ceo_sum_rate_lower<T: Real>(prepared: &PreparedCeo<'_, T>) -> Result<BoundResult<T>> {
    let Some(var_z) = prepared.problem.equal_variance() else {
        return Err(Error::InvalidParameter(
            "sum-rate lower bound requires equal noise variances".into(),
        ));
    };
    let m = prepared.m();
    let mf = T::of(m as f64);
    let r = prepared.r_x_d;
    let n_ym = prepared.entropy_power_ym;
    let threshold = var_z * (T::of(2.0) * r).exp();
    if threshold >= mf * n_ym {
        return Ok(BoundResult::out_of_domain(
            FormulaId::CeoSumRateLower,
            BoundKind::Lower,
            format!(
                "requires var(Z) e^(2 R_X(D)) < M N(Y(M)): {} >= {}",
                threshold.as_f64(),
                (mf * n_ym).as_f64()
            ),
        ));
    }
    let value = formula::ceo_lower_general(r, prepared.source.entropy_power, n_ym, var_z, m)
        .expect("domain checked above");
    Ok(BoundResult::ok(
        FormulaId::CeoSumRateLower,
        BoundKind::Lower,
        value,
        format!(
            "var(Z) e^(2 R_X(D)) = {} < M N(Y(M)) = {}",
            threshold.as_f64(),
            (mf * n_ym).as_f64()
        ),
    ))
}

/// Both large-M gap bounds: at constant distortion and at distortion
/// scaling as `d_scaled / M`.
pub fn gap_bounds<T: Real>(
    density: &SourceDensity<T>,
    noise_var: T,
    m: usize,
    d_const: T,
    d_scaled: T,
    cfg: &NumericConfig<T>,
) -> Result<(T, T)> {
    let var_x = density.variance();
    if !(d_const > T::zero()) || d_const >= var_x {
        return Err(Error::InvalidParameter(
            "constant-distortion gap regime needs 0 < d < var(X)".into(),
        ));
    }
    if !(d_scaled > noise_var) {
        return Err(Error::InvalidParameter(
            "scaled-distortion gap bound needs d > var(Z)".into(),
        ));
    }
    // The scaled bound dominates the true gap for M > d_scaled / var(X);
    // the expression itself is well defined for any m (and m-free), so the
    // companion sweep can evaluate it at every point it plots.
    let _ = m;
    let kappa = kappa_value(density, cfg).map_err(|e| match e {
        Error::KappaUnavailable(s) => Error::KappaUnavailable(s),
        other => Error::KappaUnavailable(other.to_string()),
    })?;
    let n_x = density.entropy_power(cfg)?;
    let constant = formula::gap_bound(var_x, n_x, kappa, noise_var, T::one());
    let scaled = formula::gap_bound(var_x, n_x, kappa, noise_var, T::one() - noise_var / d_scaled);
    Ok((constant, scaled))
}

/// Lower bound on the distributed-vs-centralized rate penalty at
/// distortion `alpha * var(X) var(Z) / (M var(X) + var(Z))`.
pub fn rate_loss_lower<T: Real>(
    density: &SourceDensity<T>,
    noise_var: T,
    m: usize,
    alpha: T,
    cfg: &NumericConfig<T>,
) -> Result<BoundResult<T>> {
    let mf = T::of(m as f64);
    let var_x = density.variance();
    let n_x = density.entropy_power(cfg)?;
    let n_ym = smoothed_entropy_power(density, noise_var / mf, cfg)?.entropy_power;
    let alpha_max = (mf * var_x / noise_var + T::one())
        .min(mf * n_x * n_ym / (noise_var * var_x));
    if !(alpha > T::one()) || alpha > alpha_max {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha.as_f64(),
            max: alpha_max.as_f64(),
        });
    }
    let kappa = kappa_value(density, cfg).map_err(|e| match e {
        Error::KappaUnavailable(s) => Error::KappaUnavailable(s),
        other => Error::KappaUnavailable(other.to_string()),
    })?;
    let gamma = var_x / n_x;
    let raw = formula::rate_loss(gamma, alpha, kappa, noise_var, n_x, m);
    Ok(BoundResult::ok(
        FormulaId::RateLossLower,
        BoundKind::Lower,
        raw.max(T::zero()),
        format!("alpha = {} in (1, {}]", alpha.as_f64(), alpha_max.as_f64()),
    ))
}
