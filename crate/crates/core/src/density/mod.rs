//! Continuous source densities and their information-theoretic statistics.
//!
//! Closed forms are used wherever the family admits them (entropy of
//! Gaussian/Laplace/Uniform, Gaussian-smoothed pdfs of every analytic
//! family); everything else falls back to adaptive quadrature on a
//! truncated support that keeps all but `tail_mass` of the probability.

mod posterior;
mod smooth;
mod tabulated;

pub use posterior::{d0_monte_carlo, lmmse, remote_stats, RemoteStats};
pub use smooth::{kappa, kappa_value, smoothed_entropy_power, KappaEstimate, Smoothed, SmoothedStats};
pub use tabulated::Tabulated;

use rand::distr::uniform::SampleUniform;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};
use crate::scalar::Real;
use crate::special;

/// Tolerances shared by every numerical routine in the crate.
#[derive(Debug, Clone, Copy)]
pub struct NumericConfig<T> {
    pub quad: QuadConfig<T>,
    /// Probability mass allowed outside the truncated support.
    pub tail_mass: T,
    /// Smoothing ladder for the entropy-power derivative, as fractions of
    /// the source variance.
    pub kappa_ladder: [T; 3],
    /// Relative step of the one-sided finite difference on the ladder.
    pub kappa_fd_step: T,
    /// Relative agreement required between the two derivative routes.
    pub kappa_agree_tol: T,
}

impl<T: Real> Default for NumericConfig<T> {
    fn default() -> Self {
        NumericConfig {
            quad: QuadConfig::default(),
            tail_mass: T::of(1e-12),
            kappa_ladder: [T::of(1e-2), T::of(1e-3), T::of(1e-4)],
            kappa_fd_step: T::of(1e-3),
            kappa_agree_tol: T::of(1e-3),
        }
    }
}

/// One Gaussian mixture component.
#[derive(Debug, Clone, Copy)]
pub struct MixtureComponent<T> {
    pub weight: T,
    pub mean: T,
    pub variance: T,
}

/// A continuous source density.
#[derive(Debug, Clone)]
pub enum SourceDensity<T: Real> {
    Gaussian { mean: T, variance: T },
    Laplace { location: T, scale: T },
    Uniform { lo: T, hi: T },
    GaussianMixture { components: Vec<MixtureComponent<T>> },
    Tabulated(Tabulated<T>),
}

impl<T: Real> SourceDensity<T> {
    pub fn gaussian(mean: T, variance: T) -> Result<Self> {
        if !(variance > T::zero()) || !variance.is_finite() {
            return Err(Error::InvalidParameter("Gaussian variance must be positive".into()));
        }
        Ok(SourceDensity::Gaussian { mean, variance })
    }

    pub fn laplace(location: T, scale: T) -> Result<Self> {
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(Error::InvalidParameter("Laplace scale must be positive".into()));
        }
        Ok(SourceDensity::Laplace { location, scale })
    }

    pub fn uniform(lo: T, hi: T) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter("Uniform needs lo < hi, both finite".into()));
        }
        Ok(SourceDensity::Uniform { lo, hi })
    }

    /// Mixture of Gaussians; weights are renormalized to sum to one.
    pub fn gaussian_mixture(components: Vec<MixtureComponent<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("mixture needs at least one component".into()));
        }
        let mut total = T::zero();
        for c in &components {
            if !(c.weight > T::zero()) || !(c.variance > T::zero()) {
                return Err(Error::InvalidParameter(
                    "mixture weights and variances must be positive".into(),
                ));
            }
            total += c.weight;
        }
        let components = components
            .into_iter()
            .map(|c| MixtureComponent {
                weight: c.weight / total,
                ..c
            })
            .collect();
        Ok(SourceDensity::GaussianMixture { components })
    }

    pub fn tabulated(t: Tabulated<T>) -> Self {
        SourceDensity::Tabulated(t)
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            SourceDensity::Gaussian { .. } => "gaussian",
            SourceDensity::Laplace { .. } => "laplace",
            SourceDensity::Uniform { .. } => "uniform",
            SourceDensity::GaussianMixture { .. } => "gaussian-mixture",
            SourceDensity::Tabulated(_) => "tabulated",
        }
    }

    pub fn mean(&self) -> T {
        match self {
            SourceDensity::Gaussian { mean, .. } => *mean,
            SourceDensity::Laplace { location, .. } => *location,
            SourceDensity::Uniform { lo, hi } => (*lo + *hi) * T::of(0.5),
            SourceDensity::GaussianMixture { components } => components
                .iter()
                .map(|c| c.weight * c.mean)
                .fold(T::zero(), |a, b| a + b),
            SourceDensity::Tabulated(t) => t.mean(),
        }
    }

    pub fn variance(&self) -> T {
        match self {
            SourceDensity::Gaussian { variance, .. } => *variance,
            SourceDensity::Laplace { scale, .. } => T::of(2.0) * *scale * *scale,
            SourceDensity::Uniform { lo, hi } => {
                let w = *hi - *lo;
                w * w / T::of(12.0)
            }
            SourceDensity::GaussianMixture { components } => {
                let mean = self.mean();
                components
                    .iter()
                    .map(|c| c.weight * (c.variance + c.mean * c.mean))
                    .fold(T::zero(), |a, b| a + b)
                    - mean * mean
            }
            SourceDensity::Tabulated(t) => t.variance(),
        }
    }

    pub fn pdf(&self, x: T) -> T {
        match self {
            SourceDensity::Gaussian { mean, variance } => special::gauss_pdf(x - *mean, *variance),
            SourceDensity::Laplace { location, scale } => {
                (-(x - *location).abs() / *scale).exp() / (T::of(2.0) * *scale)
            }
            SourceDensity::Uniform { lo, hi } => {
                if x >= *lo && x <= *hi {
                    T::one() / (*hi - *lo)
                } else {
                    T::zero()
                }
            }
            SourceDensity::GaussianMixture { components } => components
                .iter()
                .map(|c| c.weight * special::gauss_pdf(x - c.mean, c.variance))
                .fold(T::zero(), |a, b| a + b),
            SourceDensity::Tabulated(t) => t.pdf(x),
        }
    }

    /// `ln pdf(x)`, `-inf` outside the support.
    pub fn ln_pdf(&self, x: T) -> T {
        match self {
            SourceDensity::Gaussian { mean, variance } => {
                let z = x - *mean;
                -z * z / (T::of(2.0) * *variance) - (T::TAU() * *variance).ln() * T::of(0.5)
            }
            SourceDensity::Laplace { location, scale } => {
                -(x - *location).abs() / *scale - (T::of(2.0) * *scale).ln()
            }
            _ => {
                let p = self.pdf(x);
                if p > T::zero() {
                    p.ln()
                } else {
                    T::neg_infinity()
                }
            }
        }
    }

    /// Interval holding all but `cfg.tail_mass` of the probability.
    pub fn truncated_support(&self, cfg: &NumericConfig<T>) -> (T, T) {
        let tail = cfg.tail_mass;
        match self {
            SourceDensity::Gaussian { mean, variance } => {
                let r = gaussian_tail_radius(tail) * variance.sqrt();
                (*mean - r, *mean + r)
            }
            SourceDensity::Laplace { location, scale } => {
                // Tail mass beyond r is exp(-r/b); one extra scale of margin.
                let r = *scale * ((T::one() / tail).ln() + T::one());
                (*location - r, *location + r)
            }
            SourceDensity::Uniform { lo, hi } => (*lo, *hi),
            SourceDensity::GaussianMixture { components } => {
                let mut lo = T::infinity();
                let mut hi = T::neg_infinity();
                for c in components {
                    let r = gaussian_tail_radius(tail) * c.variance.sqrt();
                    lo = lo.min(c.mean - r);
                    hi = hi.max(c.mean + r);
                }
                (lo, hi)
            }
            SourceDensity::Tabulated(t) => (t.lo(), t.hi()),
        }
    }

    /// Interior feature points worth pinning to quadrature panel edges.
    pub(crate) fn quad_points(&self, lo: T, hi: T) -> Vec<T> {
        let mut pts = vec![lo];
        let mut push = |x: T| {
            if x > lo && x < hi {
                pts.push(x);
            }
        };
        match self {
            SourceDensity::Gaussian { mean, .. } => push(*mean),
            SourceDensity::Laplace { location, .. } => push(*location),
            SourceDensity::Uniform { .. } => {}
            SourceDensity::GaussianMixture { components } => {
                for c in components {
                    push(c.mean);
                }
            }
            SourceDensity::Tabulated(t) => {
                // Cell kinks are tiny; a capped subset of grid nodes seeds
                // the panels and adaptive refinement does the rest.
                let stride = t.grid().len().div_ceil(64).max(1);
                for &x in t.grid().iter().step_by(stride) {
                    if x > lo && x < hi {
                        pts.push(x);
                    }
                }
            }
        }
        pts.push(hi);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts
    }

    /// Differential entropy in nats. Analytic families use closed forms,
    /// tabulated pdfs integrate exactly cell by cell, and mixtures fall
    /// back to quadrature.
    pub fn entropy(&self, cfg: &NumericConfig<T>) -> Result<T> {
        match self {
            SourceDensity::Gaussian { variance, .. } => {
                Ok((T::two_pi_e() * *variance).ln() * T::of(0.5))
            }
            SourceDensity::Laplace { scale, .. } => Ok(T::one() + (T::of(2.0) * *scale).ln()),
            SourceDensity::Uniform { lo, hi } => Ok((*hi - *lo).ln()),
            SourceDensity::Tabulated(t) => Ok(t.entropy_exact()),
            SourceDensity::GaussianMixture { .. } => self.entropy_quadrature(cfg),
        }
    }

    /// Differential entropy by quadrature regardless of family; the
    /// independent route used to cross-check the analytic one.
    pub fn entropy_quadrature(&self, cfg: &NumericConfig<T>) -> Result<T> {
        let (lo, hi) = self.truncated_support(cfg);
        let pts = self.quad_points(lo, hi);
        quad::integrate_checked(
            &|x| quad::neg_p_log_p(self.pdf(x)),
            &pts,
            &cfg.quad,
            "entropy",
        )
    }

    /// Entropy power `exp(2 h) / (2 pi e)`; equals the variance exactly for
    /// Gaussian densities.
    pub fn entropy_power(&self, cfg: &NumericConfig<T>) -> Result<T> {
        if let SourceDensity::Gaussian { variance, .. } = self {
            return Ok(*variance);
        }
        Ok((T::of(2.0) * self.entropy(cfg)?).exp() / T::two_pi_e())
    }

    /// Draw one sample.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T
    where
        T: SampleUniform,
        StandardNormal: Distribution<T>,
    {
        match self {
            SourceDensity::Gaussian { mean, variance } => {
                let z: T = rng.sample(StandardNormal);
                *mean + variance.sqrt() * z
            }
            SourceDensity::Laplace { location, scale } => {
                let u: T = rng.random_range(T::of(-0.5)..T::of(0.5));
                let mag = (T::one() - T::of(2.0) * u.abs()).ln();
                *location - *scale * u.signum() * mag
            }
            SourceDensity::Uniform { lo, hi } => rng.random_range(*lo..*hi),
            SourceDensity::GaussianMixture { components } => {
                let mut u: T = rng.random_range(T::zero()..T::one());
                let mut chosen = components[components.len() - 1];
                for c in components {
                    if u < c.weight {
                        chosen = *c;
                        break;
                    }
                    u -= c.weight;
                }
                let z: T = rng.sample(StandardNormal);
                chosen.mean + chosen.variance.sqrt() * z
            }
            SourceDensity::Tabulated(t) => {
                let u: T = rng.random_range(T::zero()..T::one());
                t.inverse_cdf(u)
            }
        }
    }
}

/// Radius r with standard normal tail mass below `tail` beyond ±r.
fn gaussian_tail_radius<T: Real>(tail: T) -> T {
    ((T::one() / tail).ln() * T::of(2.0)).sqrt() + T::one()
}

/// Precomputed variance / entropy / entropy power of one density.
#[derive(Debug, Clone, Copy)]
pub struct SourceSummary<T> {
    pub variance: T,
    pub entropy: T,
    pub entropy_power: T,
}

impl<T: Real> SourceSummary<T> {
    pub fn of(density: &SourceDensity<T>, cfg: &NumericConfig<T>) -> Result<Self> {
        let entropy = density.entropy(cfg)?;
        let entropy_power = if let SourceDensity::Gaussian { variance, .. } = density {
            *variance
        } else {
            (T::of(2.0) * entropy).exp() / T::two_pi_e()
        };
        Ok(SourceSummary {
            variance: density.variance(),
            entropy,
            entropy_power,
        })
    }
}
