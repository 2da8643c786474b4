//! Gaussian smoothing: densities of `X + sqrt(s) G`, their entropy power,
//! Fisher information, and the derivative of the entropy power at `s = 0`.
//!
//! Every analytic family convolves in closed form (the Laplace case via the
//! scaled complementary error function, which stays stable for any `s`);
//! tabulated densities convolve cell-by-cell, which is exact for a
//! piecewise-linear pdf.

use crate::error::{Error, Result};
use crate::quad;
use crate::scalar::Real;
use crate::special::{erfc, erfcx, gauss_pdf, norm_cdf};

use super::{NumericConfig, SourceDensity};

/// Entropy, entropy power, and Fisher information of `X + sqrt(s) G`.
#[derive(Debug, Clone, Copy)]
pub struct SmoothedStats<T> {
    pub s: T,
    pub entropy: T,
    pub entropy_power: T,
    /// Fisher information; `+inf` for densities with hard edges at `s = 0`.
    pub fisher: T,
}

/// View of a density smoothed by an independent `N(0, s)` addend.
#[derive(Debug, Clone, Copy)]
pub struct Smoothed<'a, T: Real> {
    base: &'a SourceDensity<T>,
    s: T,
}

impl<'a, T: Real> Smoothed<'a, T> {
    pub fn new(base: &'a SourceDensity<T>, s: T) -> Result<Self> {
        if !(s >= T::zero()) || !s.is_finite() {
            return Err(Error::InvalidParameter("smoothing variance must be >= 0".into()));
        }
        if let SourceDensity::Tabulated(t) = base {
            if s > T::zero() && s.sqrt() < t.min_step() {
                return Err(Error::ConvolutionUnderresolved {
                    kernel_std: s.sqrt().as_f64(),
                    grid_step: t.min_step().as_f64(),
                });
            }
        }
        Ok(Smoothed { base, s })
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn pdf(&self, y: T) -> T {
        if self.s == T::zero() {
            return self.base.pdf(y);
        }
        let s = self.s;
        match self.base {
            SourceDensity::Gaussian { mean, variance } => gauss_pdf(y - *mean, *variance + s),
            SourceDensity::Laplace { location, scale } => laplace_smoothed_pdf(y - *location, *scale, s),
            SourceDensity::Uniform { lo, hi } => {
                let r = s.sqrt();
                (norm_cdf((y - *lo) / r) - norm_cdf((y - *hi) / r)) / (*hi - *lo)
            }
            SourceDensity::GaussianMixture { components } => components
                .iter()
                .map(|c| c.weight * gauss_pdf(y - c.mean, c.variance + s))
                .fold(T::zero(), |a, b| a + b),
            SourceDensity::Tabulated(t) => tabulated_smoothed_pdf(t, y, s),
        }
    }

    /// d/dy of the smoothed pdf. At `s = 0` this is the classical pdf
    /// derivative (defined almost everywhere; zero inside Uniform supports).
    pub fn dpdf(&self, y: T) -> T {
        let s = self.s;
        if s == T::zero() {
            return match self.base {
                SourceDensity::Gaussian { mean, variance } => {
                    -(y - *mean) / *variance * self.base.pdf(y)
                }
                SourceDensity::Laplace { location, scale } => {
                    -(y - *location).signum() / *scale * self.base.pdf(y)
                }
                SourceDensity::Uniform { .. } => T::zero(),
                SourceDensity::GaussianMixture { components } => components
                    .iter()
                    .map(|c| {
                        -c.weight * (y - c.mean) / c.variance * gauss_pdf(y - c.mean, c.variance)
                    })
                    .fold(T::zero(), |a, b| a + b),
                SourceDensity::Tabulated(t) => t.dpdf(y),
            };
        }
        match self.base {
            SourceDensity::Gaussian { mean, variance } => {
                let v = *variance + s;
                -(y - *mean) / v * gauss_pdf(y - *mean, v)
            }
            SourceDensity::Laplace { location, scale } => {
                laplace_smoothed_dpdf(y - *location, *scale, s)
            }
            SourceDensity::Uniform { lo, hi } => {
                (gauss_pdf(y - *lo, s) - gauss_pdf(y - *hi, s)) / (*hi - *lo)
            }
            SourceDensity::GaussianMixture { components } => components
                .iter()
                .map(|c| {
                    let v = c.variance + s;
                    -c.weight * (y - c.mean) / v * gauss_pdf(y - c.mean, v)
                })
                .fold(T::zero(), |a, b| a + b),
            SourceDensity::Tabulated(t) => tabulated_smoothed_dpdf(t, y, s),
        }
    }

    /// Support truncated to all but `cfg.tail_mass` of the smoothed mass.
    pub fn truncated_support(&self, cfg: &NumericConfig<T>) -> (T, T) {
        let s = self.s;
        if s == T::zero() {
            return self.base.truncated_support(cfg);
        }
        let g = ((T::one() / cfg.tail_mass).ln() * T::of(2.0)).sqrt() + T::one();
        match self.base {
            SourceDensity::Gaussian { mean, variance } => {
                let r = g * (*variance + s).sqrt();
                (*mean - r, *mean + r)
            }
            SourceDensity::Laplace { location, scale } => {
                // The convolved tail turns over at s/b before decaying like
                // the original exponential; cover both regimes.
                let r = *scale * ((T::one() / cfg.tail_mass).ln() + T::one())
                    + s / *scale
                    + g * s.sqrt();
                (*location - r, *location + r)
            }
            SourceDensity::Uniform { lo, hi } => (*lo - g * s.sqrt(), *hi + g * s.sqrt()),
            SourceDensity::GaussianMixture { components } => {
                let mut lo = T::infinity();
                let mut hi = T::neg_infinity();
                for c in components {
                    let r = g * (c.variance + s).sqrt();
                    lo = lo.min(c.mean - r);
                    hi = hi.max(c.mean + r);
                }
                (lo, hi)
            }
            SourceDensity::Tabulated(t) => (t.lo() - g * s.sqrt(), t.hi() + g * s.sqrt()),
        }
    }

    fn quad_points(&self, cfg: &NumericConfig<T>) -> Vec<T> {
        let (lo, hi) = self.truncated_support(cfg);
        let mut pts = self.base.quad_points(lo, hi);
        // Pin panels around features whose width is the kernel scale, so
        // they are never invisible to the initial Kronrod nodes.
        if self.s > T::zero() {
            let w = T::of(4.0) * self.s.sqrt();
            let mut features = Vec::new();
            match self.base {
                SourceDensity::Uniform { lo: a, hi: b } => features.extend([*a, *b]),
                SourceDensity::Laplace { location, .. } => features.push(*location),
                SourceDensity::Tabulated(t) => features.extend([t.lo(), t.hi()]),
                _ => {}
            }
            for x in features {
                for p in [x - w, x, x + w] {
                    if p > lo && p < hi {
                        pts.push(p);
                    }
                }
            }
            pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
            pts.dedup_by(|a, b| *a == *b);
        }
        pts
    }

    pub fn entropy(&self, cfg: &NumericConfig<T>) -> Result<T> {
        if self.s == T::zero() {
            return self.base.entropy(cfg);
        }
        if let SourceDensity::Gaussian { variance, .. } = self.base {
            return Ok((T::two_pi_e() * (*variance + self.s)).ln() * T::of(0.5));
        }
        let pts = self.quad_points(cfg);
        quad::integrate_checked(
            &|y| quad::neg_p_log_p(self.pdf(y)),
            &pts,
            &cfg.quad,
            "smoothed entropy",
        )
    }

    /// Fisher information of the smoothed variable by quadrature of
    /// `(f')^2 / f`.
    pub fn fisher(&self, cfg: &NumericConfig<T>) -> Result<T> {
        if self.s == T::zero() {
            match self.base {
                SourceDensity::Gaussian { variance, .. } => return Ok(T::one() / *variance),
                SourceDensity::Laplace { scale, .. } => return Ok(T::one() / (*scale * *scale)),
                // Hard support edges carry infinite score.
                SourceDensity::Uniform { .. } => return Ok(T::infinity()),
                SourceDensity::Tabulated(t) => return Ok(t.fisher_exact()),
                SourceDensity::GaussianMixture { .. } => {}
            }
        } else if let SourceDensity::Gaussian { variance, .. } = self.base {
            return Ok(T::one() / (*variance + self.s));
        }
        let floor = T::min_positive_value() * T::of(1e16);
        let pts = self.quad_points(cfg);
        quad::integrate_checked(
            &|y| {
                let f = self.pdf(y);
                if f > floor {
                    let d = self.dpdf(y);
                    d * d / f
                } else {
                    T::zero()
                }
            },
            &pts,
            &cfg.quad,
            "fisher information",
        )
    }

    pub fn stats(&self, cfg: &NumericConfig<T>) -> Result<SmoothedStats<T>> {
        let entropy = self.entropy(cfg)?;
        let entropy_power = if let SourceDensity::Gaussian { variance, .. } = self.base {
            *variance + self.s
        } else {
            (T::of(2.0) * entropy).exp() / T::two_pi_e()
        };
        Ok(SmoothedStats {
            s: self.s,
            entropy,
            entropy_power,
            fisher: self.fisher(cfg)?,
        })
    }

    /// Entropy power only (skips the Fisher quadrature).
    pub fn entropy_power(&self, cfg: &NumericConfig<T>) -> Result<T> {
        if let SourceDensity::Gaussian { variance, .. } = self.base {
            return Ok(*variance + self.s);
        }
        Ok((T::of(2.0) * self.entropy(cfg)?).exp() / T::two_pi_e())
    }
}

/// Entropy, entropy power, and Fisher information of `X + sqrt(s) G`.
pub fn smoothed_entropy_power<T: Real>(
    density: &SourceDensity<T>,
    s: T,
    cfg: &NumericConfig<T>,
) -> Result<SmoothedStats<T>> {
    Smoothed::new(density, s)?.stats(cfg)
}

/// Laplace(0, b) + N(0, s) pdf, stable for every argument.
///
/// For `t = (s/b - |z|)/sqrt(2s) >= 0` both terms use the scaled erfc so no
/// `exp` overflows; otherwise the plain-erfc branch decays like the original
/// exponential tail.
fn laplace_smoothed_pdf<T: Real>(z: T, b: T, s: T) -> T {
    let az = z.abs();
    let rt = (T::of(2.0) * s).sqrt();
    let t = (s / b - az) / rt;
    let u = (s / b + az) / rt;
    let gauss_exp = (-az * az / (T::of(2.0) * s)).exp();
    let e2 = erfcx(u) * gauss_exp;
    let e1 = if t >= T::zero() {
        erfcx(t) * gauss_exp
    } else {
        (s / (T::of(2.0) * b * b) - az / b).exp() * erfc(t)
    };
    (e1 + e2) / (T::of(4.0) * b)
}

/// Derivative of the Laplace-plus-Gaussian pdf: `(T2 - T1)/b` on `z >= 0`,
/// extended as an odd function.
fn laplace_smoothed_dpdf<T: Real>(z: T, b: T, s: T) -> T {
    let az = z.abs();
    let rt = (T::of(2.0) * s).sqrt();
    let t = (s / b - az) / rt;
    let u = (s / b + az) / rt;
    let gauss_exp = (-az * az / (T::of(2.0) * s)).exp();
    let e2 = erfcx(u) * gauss_exp;
    let e1 = if t >= T::zero() {
        erfcx(t) * gauss_exp
    } else {
        (s / (T::of(2.0) * b * b) - az / b).exp() * erfc(t)
    };
    let d = (e2 - e1) / (T::of(4.0) * b * b);
    if z >= T::zero() {
        d
    } else {
        -d
    }
}

/// Exact convolution of a piecewise-linear pdf with `N(0, s)`.
fn tabulated_smoothed_pdf<T: Real>(t: &super::Tabulated<T>, y: T, s: T) -> T {
    let r = s.sqrt();
    let window = T::of(12.0) * r;
    let xs = t.grid();
    let ps = t.values();
    let mut acc = T::zero();
    for k in 0..xs.len() - 1 {
        let (x0, x1) = (xs[k], xs[k + 1]);
        if x1 < y - window || x0 > y + window {
            continue;
        }
        let f0 = ps[k];
        let slope = (ps[k + 1] - f0) / (x1 - x0);
        let dphi = norm_cdf((x1 - y) / r) - norm_cdf((x0 - y) / r);
        let dpdf = gauss_pdf(x0 - y, s) - gauss_pdf(x1 - y, s);
        acc += (f0 + slope * (y - x0)) * dphi + slope * s * dpdf;
    }
    acc.max(T::zero())
}

/// d/dy of the tabulated convolution: slope terms plus the two support-edge
/// steps.
fn tabulated_smoothed_dpdf<T: Real>(t: &super::Tabulated<T>, y: T, s: T) -> T {
    let r = s.sqrt();
    let window = T::of(12.0) * r;
    let xs = t.grid();
    let ps = t.values();
    let n = xs.len();
    let mut acc = ps[0] * gauss_pdf(y - xs[0], s) - ps[n - 1] * gauss_pdf(y - xs[n - 1], s);
    for k in 0..n - 1 {
        let (x0, x1) = (xs[k], xs[k + 1]);
        if x1 < y - window || x0 > y + window {
            continue;
        }
        let slope = (ps[k + 1] - ps[k]) / (x1 - x0);
        acc += slope * (norm_cdf((y - x0) / r) - norm_cdf((y - x1) / r));
    }
    acc
}

/// Dual-route estimate of the entropy-power derivative at `s = 0`.
#[derive(Debug, Clone, Copy)]
pub struct KappaEstimate<T> {
    /// Finite-difference route (the returned value).
    pub value: T,
    /// Same value, kept under its route name for reporting.
    pub finite_difference: T,
    /// De Bruijn route: `N_s * J_s` extrapolated along the same ladder;
    /// its limit is `N(X) * J(X)` when the Fisher information converges.
    pub de_bruijn: T,
    /// Relative disagreement between the routes.
    pub rel_gap: T,
    /// Set when the derivative estimates blow up as `s` shrinks (hard
    /// support edges); the value is then a ladder artifact, not a limit.
    pub diverging: bool,
}

/// Derivative of `N(X + sqrt(s) G)` at `s = 0`, computed two ways and
/// cross-checked.
///
/// Route (a) takes a one-sided finite difference of the entropy power at
/// each rung of a shrinking ladder; route (b) evaluates `N_s * J_s`, which
/// equals the same derivative by the de Bruijn identity. Both rung
/// sequences are extrapolated to `s = 0` with an exact fit of
/// `k + b sqrt(s) + c s` (the sqrt term carries the leading error for
/// densities with kinks). Disagreement beyond `cfg.kappa_agree_tol`
/// returns [`Error::DerivativeUnstable`].
pub fn kappa<T: Real>(density: &SourceDensity<T>, cfg: &NumericConfig<T>) -> Result<KappaEstimate<T>> {
    let var = density.variance();
    let eta = cfg.kappa_fd_step;
    let mut fd = [T::zero(); 3];
    let mut db = [T::zero(); 3];
    let mut ss = [T::zero(); 3];
    for (j, &frac) in cfg.kappa_ladder.iter().enumerate() {
        let s = frac * var;
        ss[j] = s;
        let base = Smoothed::new(density, s)?;
        let stats = base.stats(cfg)?;
        let bumped = Smoothed::new(density, s * (T::one() + eta))?.entropy_power(cfg)?;
        fd[j] = (bumped - stats.entropy_power) / (s * eta);
        db[j] = stats.entropy_power * stats.fisher;
    }
    let value = extrapolate_sqrt(&ss, &fd);
    let de_bruijn = extrapolate_sqrt(&ss, &db);
    let scale = de_bruijn.abs().max(T::of(1e-12));
    let rel_gap = (value - de_bruijn).abs() / scale;
    if rel_gap > cfg.kappa_agree_tol {
        return Err(Error::DerivativeUnstable {
            finite_difference: value.as_f64(),
            de_bruijn: de_bruijn.as_f64(),
            tolerance: cfg.kappa_agree_tol.as_f64(),
        });
    }
    // A converging ladder moves by at most a few percent per decade of s;
    // doubling flags the 1/sqrt(s) blow-up of edge-supported densities.
    let diverging = db[2].abs() > T::of(2.0) * db[0].abs();
    Ok(KappaEstimate {
        value,
        finite_difference: value,
        de_bruijn,
        rel_gap,
        diverging,
    })
}

/// Kappa as a plain number, refusing ladders that diverge.
pub fn kappa_value<T: Real>(density: &SourceDensity<T>, cfg: &NumericConfig<T>) -> Result<T> {
    let est = kappa(density, cfg)?;
    if est.diverging {
        return Err(Error::KappaUnavailable(format!(
            "entropy-power derivative grows without bound as s -> 0 \
             (ladder values {:.3e} .. {:.3e})",
            est.de_bruijn.as_f64(),
            est.value.as_f64()
        )));
    }
    Ok(est.value)
}

/// Exact solve of `g(s) = k + b sqrt(s) + c s` through three rungs;
/// returns `k`.
fn extrapolate_sqrt<T: Real>(ss: &[T; 3], gs: &[T; 3]) -> T {
    let mut a = [[T::zero(); 4]; 3];
    for i in 0..3 {
        a[i][0] = T::one();
        a[i][1] = ss[i].sqrt();
        a[i][2] = ss[i];
        a[i][3] = gs[i];
    }
    // Gaussian elimination with partial pivoting on the 3x4 tableau.
    for col in 0..3 {
        let mut piv = col;
        for row in col + 1..3 {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        a.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                let sub = f * a[col][k];
                a[row][k] -= sub;
            }
        }
    }
    let x2 = a[2][3] / a[2][2];
    let x1 = (a[1][3] - a[1][2] * x2) / a[1][1];
    (a[0][3] - a[0][2] * x2 - a[0][1] * x1) / a[0][0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::MixtureComponent;
    use approx::assert_relative_eq;

    fn cfg() -> NumericConfig<f64> {
        NumericConfig::default()
    }

    fn mixture() -> SourceDensity<f64> {
        SourceDensity::gaussian_mixture(vec![
            MixtureComponent { weight: 0.5, mean: -2.0, variance: 1.0 },
            MixtureComponent { weight: 0.5, mean: 2.0, variance: 1.0 },
        ])
        .unwrap()
    }

    #[test]
    fn gaussian_plus_gaussian() {
        let c = cfg();
        let g = SourceDensity::gaussian(0.0, 1.0).unwrap();
        let st = smoothed_entropy_power(&g, 0.5, &c).unwrap();
        assert_eq!(st.entropy_power, 1.5);
        assert_relative_eq!(st.fisher, 1.0 / 1.5, max_relative = 1e-14);
    }

    #[test]
    fn s_zero_is_identity() {
        let c = cfg();
        for d in [
            SourceDensity::laplace(0.0, 1.0).unwrap(),
            SourceDensity::uniform(0.0, 1.0).unwrap(),
            mixture(),
        ] {
            let st = smoothed_entropy_power(&d, 0.0, &c).unwrap();
            assert_relative_eq!(
                st.entropy_power,
                d.entropy_power(&c).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn smoothed_mass_stays_one() {
        let c = cfg();
        let grid: Vec<f64> = (0..=400).map(|i| -1.0 + i as f64 * 0.0075).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| (1.0 - x.abs()).max(0.0) + 0.1).collect();
        let tab = super::super::Tabulated::from_points(grid, vals).unwrap();
        for d in [
            SourceDensity::laplace(0.5, 0.8).unwrap(),
            SourceDensity::uniform(-1.0, 2.0).unwrap(),
            mixture(),
            SourceDensity::tabulated(tab),
        ] {
            for s in [1e-4, 0.3, 4.0] {
                let sm = Smoothed::new(&d, s).unwrap();
                let pts = sm.quad_points(&c);
                let mass = quad::integrate_segments(&|y| sm.pdf(y), &pts, &c.quad);
                assert!(
                    (mass.value - 1.0).abs() < 1e-9,
                    "{} s={s}: mass {}",
                    d.family_name(),
                    mass.value
                );
            }
        }
    }

    #[test]
    fn laplace_smoothed_matches_direct_convolution() {
        // Brute-force convolution oracle at a few points.
        let b = 0.7;
        let s = 0.4;
        let c = cfg();
        for y in [0.0, 0.3, 1.5, 6.0, -2.2] {
            let direct = quad::integrate(
                |x: f64| (-(x.abs()) / b).exp() / (2.0 * b) * gauss_pdf(y - x, s),
                -40.0,
                40.0,
                &c.quad,
            );
            assert_relative_eq!(
                laplace_smoothed_pdf(y, b, s),
                direct.value,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn laplace_smoothed_huge_s_stable() {
        // s/(2b^2) = 5e5 overflows any naive exp-erfc product.
        let v = laplace_smoothed_pdf(0.0f64, 1.0, 1e6);
        let gauss_like = gauss_pdf(0.0f64, 1e6 + 2.0);
        assert!(v.is_finite() && v > 0.0);
        assert_relative_eq!(v, gauss_like, max_relative = 1e-2);
    }

    #[test]
    fn derivative_consistent_with_finite_difference() {
        let c = cfg();
        let grid: Vec<f64> = (0..=12).map(|i| -1.0 + i as f64 * 0.25).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&x| if x <= 0.0 { x + 1.0 } else { (2.0 - x) * 0.5 })
            .collect();
        let tab = super::super::Tabulated::from_points(grid, vals).unwrap();
        for d in [
            SourceDensity::laplace(0.0, 1.0).unwrap(),
            SourceDensity::uniform(0.0, 1.0).unwrap(),
            mixture(),
            SourceDensity::tabulated(tab),
        ] {
            let sm = Smoothed::new(&d, 0.2).unwrap();
            let h = 1e-6;
            for y in [-1.3, 0.1, 0.9, 2.4] {
                let fd = (sm.pdf(y + h) - sm.pdf(y - h)) / (2.0 * h);
                let an = sm.dpdf(y);
                assert!(
                    (fd - an).abs() <= 1e-6 * (1.0 + an.abs()),
                    "{} at {y}: fd {fd} vs {an}",
                    d.family_name()
                );
            }
        }
        let _ = c;
    }

    #[test]
    fn epi_with_gaussian_addend() {
        // N(X + sqrt(s) G) >= N(X) + s, equality iff X Gaussian.
        let c = cfg();
        for d in [
            SourceDensity::laplace(0.0, 1.0).unwrap(),
            SourceDensity::uniform(0.0, 1.0).unwrap(),
            mixture(),
        ] {
            let n0 = d.entropy_power(&c).unwrap();
            for s in [0.01, 0.1, 1.0] {
                let ns = smoothed_entropy_power(&d, s, &c).unwrap().entropy_power;
                assert!(ns > n0 + s, "{}: N_s {ns} vs {}", d.family_name(), n0 + s);
            }
        }
        let g = SourceDensity::gaussian(0.0, 2.0).unwrap();
        let ns = smoothed_entropy_power(&g, 0.7, &c).unwrap().entropy_power;
        assert_relative_eq!(ns, 2.7, max_relative = 1e-14);
    }

    #[test]
    fn uniform_small_s_bracket() {
        // For Uniform[0,1] with s = 0.01: N_s between the EPI floor and the
        // max-entropy ceiling var + s.
        let c = cfg();
        let u = SourceDensity::uniform(0.0, 1.0).unwrap();
        let st = smoothed_entropy_power(&u, 0.01, &c).unwrap();
        let n0 = u.entropy_power(&c).unwrap();
        assert!(st.entropy_power >= n0 + 0.01);
        assert!(st.entropy_power <= 1.0 / 12.0 + 0.01);
    }

    #[test]
    fn smoothed_concave_in_s() {
        let c = cfg();
        for d in [
            SourceDensity::laplace(0.0, 1.0).unwrap(),
            SourceDensity::uniform(0.0, 1.0).unwrap(),
            mixture(),
        ] {
            let ladder: Vec<f64> = (0..7).map(|k| 0.02 * 2f64.powi(k)).collect();
            let ns: Vec<f64> = ladder
                .iter()
                .map(|&s| smoothed_entropy_power(&d, s, &c).unwrap().entropy_power)
                .collect();
            for k in 1..ladder.len() - 1 {
                let t = (ladder[k] - ladder[k - 1]) / (ladder[k + 1] - ladder[k - 1]);
                let chord = ns[k - 1] * (1.0 - t) + ns[k + 1] * t;
                assert!(
                    ns[k] >= chord - 1e-8,
                    "{}: concavity violated at {}",
                    d.family_name(),
                    ladder[k]
                );
            }
        }
    }

    #[test]
    fn tabulated_underresolved_kernel() {
        let t = super::super::Tabulated::from_points(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let d = SourceDensity::tabulated(t);
        let err = Smoothed::new(&d, 1e-4).unwrap_err();
        assert!(matches!(err, Error::ConvolutionUnderresolved { .. }));
    }

    #[test]
    fn kappa_gaussian_is_one() {
        let c = cfg();
        let g = SourceDensity::gaussian(0.0, 1.7).unwrap();
        let k = kappa(&g, &c).unwrap();
        assert!((k.value - 1.0).abs() < 1e-6, "kappa = {}", k.value);
        assert!(!k.diverging);
    }

    #[test]
    fn kappa_laplace_de_bruijn() {
        // N(X) * J(X) = (2e/pi) * 1 for a unit Laplace.
        let c = cfg();
        let l = SourceDensity::laplace(0.0, 1.0).unwrap();
        let k = kappa(&l, &c).unwrap();
        let truth = 2.0 * std::f64::consts::E / std::f64::consts::PI;
        assert!(
            (k.value - truth).abs() / truth < 1e-3,
            "kappa = {} vs {truth}",
            k.value
        );
        assert!(!k.diverging);
        assert!(kappa_value(&l, &c).is_ok());
    }

    #[test]
    fn kappa_mixture_dual_route() {
        let c = cfg();
        let k = kappa(&mixture(), &c).unwrap();
        // Independent oracle: N(X) * J(X) by direct quadrature.
        assert!((k.value - 2.572_037_256_5).abs() / 2.572 < 1e-3, "kappa = {}", k.value);
        assert!(k.rel_gap < 1e-3);
    }

    #[test]
    fn kappa_uniform_routes_agree_but_diverge() {
        let c = cfg();
        let u = SourceDensity::uniform(0.0, 1.0).unwrap();
        let k = kappa(&u, &c).unwrap();
        assert!(k.rel_gap < 1e-3, "gap = {}", k.rel_gap);
        assert!(k.diverging);
        assert!(k.value.is_finite());
        assert!(matches!(kappa_value(&u, &c), Err(Error::KappaUnavailable(_))));
    }

    #[test]
    fn raw_fisher_values() {
        let c = cfg();
        let l = SourceDensity::laplace(0.0, 0.5).unwrap();
        assert_relative_eq!(
            Smoothed::new(&l, 0.0).unwrap().fisher(&c).unwrap(),
            4.0,
            max_relative = 1e-12
        );
        let u = SourceDensity::uniform(0.0, 1.0).unwrap();
        assert!(Smoothed::new(&u, 0.0).unwrap().fisher(&c).unwrap().is_infinite());
    }
}
