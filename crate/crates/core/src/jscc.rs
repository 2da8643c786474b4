//! Analog-vs-digital sensor network: the distortion floor of digital
//! (compress-then-communicate) architectures, the closed-form distortion
//! of analog amplify-and-forward, a Monte Carlo check of that closed form,
//! and the scaling sweep over the number of agents.

use rand::distr::uniform::SampleUniform;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

pub use crate::mc::MonteCarloEstimate;
use crate::density::{kappa_value, NumericConfig, SourceDensity};
use crate::error::{Error, Result};
use crate::mc::{merge_tree, RunningMoments};
use crate::scalar::Real;

/// One sensor-network operating point: `m` encoders observe the source
/// through Gaussian noise and share a Gaussian multiple-access channel
/// under a per-encoder power constraint.
#[derive(Debug, Clone)]
pub struct JsccScenario<T: Real> {
    pub density: SourceDensity<T>,
    pub m: usize,
    pub obs_noise_var: T,
    /// Per-encoder average transmit power.
    pub power: T,
    pub channel_noise_var: T,
    pub samples: u64,
    pub seed: u64,
}

impl<T: Real> JsccScenario<T> {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("need at least one encoder".into()));
        }
        for (name, v) in [
            ("observation noise variance", self.obs_noise_var),
            ("power", self.power),
            ("channel noise variance", self.channel_noise_var),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("need at least one sample".into()));
        }
        Ok(())
    }

    fn with_m(&self, m: usize) -> Self {
        JsccScenario {
            m,
            ..self.clone()
        }
    }
}

/// Formula layer shared by the scenario wrappers and the sweep analysis.
pub mod formula {
    use crate::scalar::Real;

    /// Distortion floor of any digital strategy:
    /// `N var_z / (N ln(1 + m^2 p / var_ch) + kappa var_z)`.
    pub fn digital_floor<T: Real>(n_x: T, kappa: T, var_z: T, m: f64, p: T, var_ch: T) -> T {
        let cap = (T::one() + T::of(m * m) * p / var_ch).ln();
        n_x * var_z / (n_x * cap + kappa * var_z)
    }

    /// Distortion of the analog amplify-and-forward scheme.
    pub fn analog_distortion<T: Real>(var_x: T, var_z: T, m: f64, p: T, var_ch: T) -> T {
        let mf = T::of(m);
        let centralized = var_x * var_z / (mf * var_x + var_z);
        let mac_gain = (mf * var_x + var_z) / (var_x + var_z) * mf * p + var_ch;
        centralized * (T::one() + mf * (var_x * var_ch / var_z) / mac_gain)
    }
}

/// Lower bound on the distortion of a digital (source-channel separated)
/// architecture at this operating point.
pub fn digital_distortion_floor<T: Real>(
    scenario: &JsccScenario<T>,
    cfg: &NumericConfig<T>,
) -> Result<T> {
    scenario.validate()?;
    let kappa = kappa_value(&scenario.density, cfg).map_err(|e| match e {
        Error::KappaUnavailable(s) => Error::KappaUnavailable(s),
        other => Error::KappaUnavailable(other.to_string()),
    })?;
    let n_x = scenario.density.entropy_power(cfg)?;
    Ok(formula::digital_floor(
        n_x,
        kappa,
        scenario.obs_noise_var,
        scenario.m as f64,
        scenario.power,
        scenario.channel_noise_var,
    ))
}

/// Exact distortion of analog amplify-and-forward with the matched linear
/// decoder; depends on the source only through its variance.
pub fn analog_distortion_closed_form<T: Real>(scenario: &JsccScenario<T>) -> Result<T> {
    scenario.validate()?;
    Ok(formula::analog_distortion(
        scenario.density.variance(),
        scenario.obs_noise_var,
        scenario.m as f64,
        scenario.power,
        scenario.channel_noise_var,
    ))
}

const BATCH: u64 = 8192;

/// Monte Carlo distortion of the analog scheme.
///
/// Per symbol: each encoder transmits its centered observation scaled by
/// `sqrt(p / (var_x + var_z))`, the channel sums the transmissions and
/// adds Gaussian noise, and the decoder applies the linear estimator
/// matched to the second-order statistics. Centering keeps the power
/// constraint exact for sources with nonzero mean; the closed form is a
/// second-order quantity, so the estimate must land on it for every
/// source family.
///
/// Sampling is split into fixed batches; batch `b` of sweep point `k`
/// draws from ChaCha stream `(k << 32) | b` under the master seed, so
/// results are reproducible and independent of evaluation order.
pub fn simulate_analog<T: Real>(
    scenario: &JsccScenario<T>,
    cfg: &NumericConfig<T>,
) -> Result<MonteCarloEstimate<T>>
where
    T: SampleUniform,
    StandardNormal: Distribution<T>,
{
    simulate_analog_stream(scenario, cfg, 0)
}

fn simulate_analog_stream<T: Real>(
    scenario: &JsccScenario<T>,
    _cfg: &NumericConfig<T>,
    stream_base: u64,
) -> Result<MonteCarloEstimate<T>>
where
    T: SampleUniform,
    StandardNormal: Distribution<T>,
{
    scenario.validate()?;
    let var_x = scenario.density.variance();
    let var_z = scenario.obs_noise_var;
    let var_ch = scenario.channel_noise_var;
    let mf = T::of(scenario.m as f64);
    let mean_x = scenario.density.mean();
    let gain = (scenario.power / (var_x + var_z)).sqrt();
    // LMMSE coefficient for v = gain (m x + sum z) + w, all centered.
    let coeff = gain * mf * var_x
        / (gain * gain * (mf * mf * var_x + mf * var_z) + var_ch);

    let n_batches = scenario.samples.div_ceil(BATCH);
    let mut stats = Vec::with_capacity(n_batches as usize);
    let mut remaining = scenario.samples;
    for b in 0..n_batches {
        let mut rng = ChaCha12Rng::seed_from_u64(scenario.seed);
        rng.set_stream(stream_base | b);
        let mut acc = RunningMoments::default();
        let count = remaining.min(BATCH);
        remaining -= count;
        let sd_z = var_z.sqrt();
        let sd_ch = var_ch.sqrt();
        for _ in 0..count {
            let x = scenario.density.sample(&mut rng);
            let mut v = T::zero();
            for _ in 0..scenario.m {
                let z: T = rng.sample(StandardNormal);
                v += gain * (x - mean_x + sd_z * z);
            }
            let w: T = rng.sample(StandardNormal);
            v += sd_ch * w;
            let estimate = mean_x + coeff * v;
            let err = x - estimate;
            acc.push(err * err);
        }
        stats.push(acc);
    }
    Ok(merge_tree(stats).estimate())
}

/// One row of the scaling sweep.
#[derive(Debug, Clone)]
pub struct ScalingRow<T> {
    pub m: usize,
    pub digital_floor: T,
    pub analog_closed_form: T,
    pub analog_simulated: MonteCarloEstimate<T>,
}

/// Evaluate both architectures at each agent count. Kappa is computed
/// once; simulation batch `b` of row `k` draws from ChaCha stream
/// `(k << 32) | b`.
pub fn scaling_sweep<T: Real>(
    template: &JsccScenario<T>,
    m_values: &[usize],
    cfg: &NumericConfig<T>,
) -> Result<Vec<ScalingRow<T>>>
where
    T: SampleUniform,
    StandardNormal: Distribution<T>,
{
    if m_values.is_empty() {
        return Err(Error::InvalidParameter("empty sweep".into()));
    }
    if m_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("m values must be increasing".into()));
    }
    template.validate()?;
    let kappa = kappa_value(&template.density, cfg).map_err(|e| match e {
        Error::KappaUnavailable(s) => Error::KappaUnavailable(s),
        other => Error::KappaUnavailable(other.to_string()),
    })?;
    let n_x = template.density.entropy_power(cfg)?;
    let var_x = template.density.variance();
    let mut rows = Vec::with_capacity(m_values.len());
    for (k, &m) in m_values.iter().enumerate() {
        let scenario = template.with_m(m);
        let digital = formula::digital_floor(
            n_x,
            kappa,
            scenario.obs_noise_var,
            m as f64,
            scenario.power,
            scenario.channel_noise_var,
        );
        let analog = formula::analog_distortion(
            var_x,
            scenario.obs_noise_var,
            m as f64,
            scenario.power,
            scenario.channel_noise_var,
        );
        let sim = simulate_analog_stream(&scenario, cfg, (k as u64) << 32)?;
        rows.push(ScalingRow {
            m,
            digital_floor: digital,
            analog_closed_form: analog,
            analog_simulated: sim,
        });
    }
    Ok(rows)
}

/// Asymptotic fits and the agent counts each architecture needs to reach a
/// target distortion.
#[derive(Debug, Clone, Copy)]
pub struct ScalingFit<T> {
    /// Least-squares `c` in `digital ~ c / ln m` over the sweep rows.
    pub c_digital: T,
    /// Least-squares `c` in `analog ~ c / m`.
    pub c_analog: T,
}

/// Fit the two scaling laws to sweep rows (rows at `m = 1` are skipped for
/// the logarithmic fit).
pub fn fit_scaling_laws<T: Real>(rows: &[ScalingRow<T>]) -> ScalingFit<T> {
    let mut sxy_d = T::zero();
    let mut sxx_d = T::zero();
    let mut sxy_a = T::zero();
    let mut sxx_a = T::zero();
    for row in rows {
        let mf = T::of(row.m as f64);
        if row.m > 1 {
            let x = T::one() / mf.ln();
            sxy_d += x * row.digital_floor;
            sxx_d += x * x;
        }
        let xa = T::one() / mf;
        sxy_a += xa * row.analog_closed_form;
        sxx_a += xa * xa;
    }
    ScalingFit {
        c_digital: sxy_d / sxx_d,
        c_analog: sxy_a / sxx_a,
    }
}

const AGENT_SEARCH_CAP: u64 = 1 << 40;

/// Smallest agent count whose digital floor reaches `target`, by bisection
/// on the monotone closed form.
pub fn agents_needed_digital<T: Real>(
    n_x: T,
    kappa: T,
    var_z: T,
    p: T,
    var_ch: T,
    target: T,
) -> Option<u64> {
    let reaches = |m: u64| formula::digital_floor(n_x, kappa, var_z, m as f64, p, var_ch) <= target;
    bisect_first(reaches)
}

/// Smallest agent count whose analog distortion reaches `target`.
pub fn agents_needed_analog<T: Real>(var_x: T, var_z: T, p: T, var_ch: T, target: T) -> Option<u64> {
    let reaches = |m: u64| formula::analog_distortion(var_x, var_z, m as f64, p, var_ch) <= target;
    bisect_first(reaches)
}

fn bisect_first(reaches: impl Fn(u64) -> bool) -> Option<u64> {
    if reaches(1) {
        return Some(1);
    }
    let mut hi = 2u64;
    while !reaches(hi) {
        hi *= 2;
        if hi > AGENT_SEARCH_CAP {
            return None;
        }
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if reaches(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> NumericConfig<f64> {
        NumericConfig::default()
    }

    fn all_ones(m: usize, density: SourceDensity<f64>) -> JsccScenario<f64> {
        JsccScenario {
            density,
            m,
            obs_noise_var: 1.0,
            power: 1.0,
            channel_noise_var: 1.0,
            samples: 100_000,
            seed: 7,
        }
    }

    #[test]
    fn digital_floor_gaussian_anchor() {
        // All parameters 1, m = 4: 1 / (ln 17 + 1).
        let c = cfg();
        let s = all_ones(4, SourceDensity::gaussian(0.0, 1.0).unwrap());
        let d = digital_distortion_floor(&s, &c).unwrap();
        assert_relative_eq!(d, 1.0 / (17.0f64.ln() + 1.0), max_relative = 1e-9);
    }

    #[test]
    fn digital_floor_laplace_cancellation() {
        // For Laplace, kappa = N J with J = 1/b^2, so kappa/N cancels to the
        // same value as the unit Gaussian when b = 1.
        let c = cfg();
        let s = all_ones(4, SourceDensity::laplace(0.0, 1.0).unwrap());
        let d = digital_distortion_floor(&s, &c).unwrap();
        assert_relative_eq!(d, 1.0 / (17.0f64.ln() + 1.0), max_relative = 1e-4);
    }

    #[test]
    fn digital_floor_no_channel_limit() {
        // p -> 0: no information crosses and the floor tends to N(X)/kappa,
        // here 2/1 for a variance-2 Gaussian.
        let c = cfg();
        let mut s = all_ones(4, SourceDensity::gaussian(0.0, 2.0).unwrap());
        s.power = 1e-15;
        let d = digital_distortion_floor(&s, &c).unwrap();
        assert_relative_eq!(d, 2.0, max_relative = 1e-6);
    }

    #[test]
    fn digital_floor_gaussian_hand_formula() {
        let c = cfg();
        let mut s = all_ones(3, SourceDensity::gaussian(0.0, 2.0).unwrap());
        s.obs_noise_var = 0.5;
        s.power = 2.0;
        s.channel_noise_var = 0.25;
        let d = digital_distortion_floor(&s, &c).unwrap();
        let hand = 0.5 * 2.0 / (2.0 * (1.0f64 + 9.0 * 2.0 / 0.25).ln() + 0.5);
        assert_relative_eq!(d, hand, max_relative = 1e-9);
    }

    #[test]
    fn analog_anchor_values() {
        let s = all_ones(4, SourceDensity::gaussian(0.0, 1.0).unwrap());
        assert_relative_eq!(
            analog_distortion_closed_form(&s).unwrap(),
            3.0 / 11.0,
            max_relative = 1e-12
        );
        let s1 = all_ones(1, SourceDensity::gaussian(0.0, 1.0).unwrap());
        assert_relative_eq!(
            analog_distortion_closed_form(&s1).unwrap(),
            0.75,
            max_relative = 1e-12
        );
    }

    #[test]
    fn analog_noiseless_channel_is_centralized_floor() {
        let mut s = all_ones(4, SourceDensity::gaussian(0.0, 1.0).unwrap());
        s.channel_noise_var = 1e-12;
        assert_relative_eq!(
            analog_distortion_closed_form(&s).unwrap(),
            1.0 / 5.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn analog_factor_at_least_centralized() {
        for m in [1usize, 2, 8, 64] {
            let s = all_ones(m, SourceDensity::gaussian(0.0, 1.0).unwrap());
            let d = analog_distortion_closed_form(&s).unwrap();
            let floor = 1.0 / (m as f64 + 1.0);
            assert!(d >= floor, "m={m}: {d} < {floor}");
        }
    }

    #[test]
    fn monotone_in_agents_and_power() {
        let c = cfg();
        let mut prev_d = f64::INFINITY;
        let mut prev_a = f64::INFINITY;
        for m in [1usize, 2, 4, 8, 16] {
            let s = all_ones(m, SourceDensity::gaussian(0.0, 1.0).unwrap());
            let d = digital_distortion_floor(&s, &c).unwrap();
            let a = analog_distortion_closed_form(&s).unwrap();
            assert!(d < prev_d && a < prev_a, "not decreasing at m={m}");
            prev_d = d;
            prev_a = a;
        }
        let mut prev = f64::INFINITY;
        for p in [0.5, 1.0, 2.0, 4.0] {
            let mut s = all_ones(4, SourceDensity::gaussian(0.0, 1.0).unwrap());
            s.power = p;
            let d = digital_distortion_floor(&s, &c).unwrap();
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn simulation_matches_closed_form_gaussian() {
        let c = cfg();
        let s = all_ones(4, SourceDensity::gaussian(0.0, 1.0).unwrap());
        let est = simulate_analog(&s, &c).unwrap();
        let truth = 3.0 / 11.0;
        let tol = 4.0 * est.stderr.unwrap();
        assert!(
            (est.mean - truth).abs() <= tol,
            "mean {} vs {truth} (tol {tol})",
            est.mean
        );
    }

    #[test]
    fn simulation_is_second_order_only() {
        // Unit-variance Laplace and a shifted uniform both land on the
        // Gaussian value: the linear decoder sees only second moments.
        let c = cfg();
        let b = (0.5f64).sqrt();
        for density in [
            SourceDensity::laplace(0.0, b).unwrap(),
            SourceDensity::uniform(2.0 - (3.0f64).sqrt(), 2.0 + (3.0f64).sqrt()).unwrap(),
        ] {
            assert_relative_eq!(density.variance(), 1.0, max_relative = 1e-12);
            let s = all_ones(4, density);
            let est = simulate_analog(&s, &c).unwrap();
            let tol = 4.0 * est.stderr.unwrap();
            assert!(
                (est.mean - 3.0 / 11.0).abs() <= tol,
                "mean {} (tol {tol})",
                est.mean
            );
        }
    }

    #[test]
    fn simulation_single_sample() {
        let c = cfg();
        let mut s = all_ones(2, SourceDensity::gaussian(0.0, 1.0).unwrap());
        s.samples = 1;
        let est = simulate_analog(&s, &c).unwrap();
        assert_eq!(est.n, 1);
        assert!(est.stderr.is_none());
        assert!(est.mean.is_finite());
    }

    #[test]
    fn simulation_deterministic_given_seed() {
        let c = cfg();
        let s = all_ones(3, SourceDensity::laplace(0.0, 1.0).unwrap());
        let a = simulate_analog(&s, &c).unwrap();
        let b = simulate_analog(&s, &c).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.stderr, b.stderr);
    }

    #[test]
    fn sweep_single_row_consistency() {
        let c = cfg();
        let t = all_ones(4, SourceDensity::gaussian(0.0, 1.0).unwrap());
        let rows = scaling_sweep(&t, &[4], &c).unwrap();
        assert_eq!(rows.len(), 1);
        assert_relative_eq!(
            rows[0].digital_floor,
            digital_distortion_floor(&t, &c).unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            rows[0].analog_closed_form,
            analog_distortion_closed_form(&t).unwrap(),
            max_relative = 1e-12
        );
        assert!(scaling_sweep(&t, &[], &c).is_err());
        assert!(scaling_sweep(&t, &[4, 4], &c).is_err());
    }

    #[test]
    fn sweep_asymptotics() {
        let c = cfg();
        let mut t = all_ones(1, SourceDensity::gaussian(0.0, 1.0).unwrap());
        t.samples = 1; // closed forms only; keep the sweep cheap
        let ms: Vec<usize> = (1..=10).map(|k| 1 << k).collect();
        let rows = scaling_sweep(&t, &ms, &c).unwrap();
        // digital * ln(1 + m^2) climbs toward var(Z) = 1.
        let mut prev = 0.0;
        for row in &rows {
            let mf = row.m as f64;
            let v = row.digital_floor * (1.0 + mf * mf).ln();
            assert!(v > prev);
            prev = v;
        }
        assert!((prev - 1.0).abs() < 0.08, "digital asymptote {prev}");
        // analog * m likewise.
        let last = rows.last().unwrap();
        assert!((last.analog_closed_form * last.m as f64 - 1.0).abs() < 0.01);
        // ln(1 + m^2 p) ~ 2 ln m puts the digital constant near var(Z)/2.
        let fit = fit_scaling_laws(&rows);
        assert!(fit.c_digital > 0.2 && fit.c_digital < 0.8, "c_d = {}", fit.c_digital);
        assert!(fit.c_analog > 0.5 && fit.c_analog < 1.5, "c_a = {}", fit.c_analog);
    }

    #[test]
    fn agents_needed_anchor() {
        // Frozen by root-finding on the two closed forms at target 0.05.
        let md = agents_needed_digital(1.0, 1.0, 1.0, 1.0, 1.0, 0.05).unwrap();
        let ma = agents_needed_analog(1.0, 1.0, 1.0, 1.0, 0.05).unwrap();
        assert_eq!(md, 13_360);
        assert_eq!(ma, 21);
        assert!(md / ma > 100);
    }

    #[test]
    fn rejects_bad_scenarios() {
        let c = cfg();
        let mut s = all_ones(0, SourceDensity::gaussian(0.0, 1.0).unwrap());
        assert!(digital_distortion_floor(&s, &c).is_err());
        s.m = 2;
        s.samples = 0;
        assert!(simulate_analog(&s, &c).is_err());
    }
}
