//! Property tests for the structural invariants: the entropy power
//! inequality under Gaussian smoothing, the estimation sandwich, bound
//! ordering, and the power / entropy-power duality map.

use approx::assert_relative_eq;
use ceo_bounds::bound::RdfHook;
use ceo_bounds::density::{
    remote_stats, smoothed_entropy_power, MixtureComponent, NumericConfig, SourceDensity,
    SourceSummary,
};
use ceo_bounds::region::formula as region_formula;
use ceo_bounds::remote::formula as remote_formula;
use ceo_bounds::remote::{
    epi_remote_lower_from_stats, epi_remote_upper, remote_explicit_from_stats, remote_sandwich,
    RemoteInstance,
};
use proptest::prelude::*;

type D64 = SourceDensity<f64>;

fn cfg() -> NumericConfig<f64> {
    NumericConfig::default()
}

fn arb_density() -> impl Strategy<Value = D64> {
    prop_oneof![
        ((-2.0..2.0f64), (0.2..4.0f64))
            .prop_map(|(m, v)| D64::gaussian(m, v).unwrap()),
        ((-2.0..2.0f64), (0.3..2.0f64))
            .prop_map(|(m, b)| D64::laplace(m, b).unwrap()),
        ((-3.0..0.0f64), (0.5..4.0f64))
            .prop_map(|(lo, w)| D64::uniform(lo, lo + w).unwrap()),
        (
            (0.2..0.8f64),
            (-2.5..-0.5f64),
            (0.5..2.5f64),
            (0.4..2.0f64),
            (0.4..2.0f64),
        )
            .prop_map(|(w, m1, m2, v1, v2)| {
                D64::gaussian_mixture(vec![
                    MixtureComponent { weight: w, mean: m1, variance: v1 },
                    MixtureComponent { weight: 1.0 - w, mean: m2, variance: v2 },
                ])
                .unwrap()
            }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn entropy_power_at_most_variance(d in arb_density()) {
        let c = cfg();
        let n = d.entropy_power(&c).unwrap();
        prop_assert!(n > 0.0);
        prop_assert!(n <= d.variance() * (1.0 + 1e-10));
    }

    #[test]
    fn epi_with_gaussian_addend(d in arb_density(), s in 0.05..3.0f64) {
        let c = cfg();
        let n0 = d.entropy_power(&c).unwrap();
        let ns = smoothed_entropy_power(&d, s, &c).unwrap().entropy_power;
        prop_assert!(ns >= n0 + s - 1e-8, "N_s = {ns}, N0 + s = {}", n0 + s);
        if matches!(d, D64::Gaussian { .. }) {
            prop_assert!((ns - (n0 + s)).abs() < 1e-10);
        } else {
            prop_assert!(ns > n0 + s);
        }
    }

    #[test]
    fn shannon_bounds_ordered(d in arb_density(), dist in 0.01..5.0f64) {
        let c = cfg();
        let s = SourceSummary::of(&d, &c).unwrap();
        let lo = remote_formula::shannon_lower(s.entropy_power, dist);
        let hi = remote_formula::shannon_upper(s.variance, dist);
        prop_assert!(lo <= hi + 1e-12);
        prop_assert!(lo >= 0.0);
    }
}

proptest! {
    // The posterior quadrature is the expensive path; keep the case count
    // modest.
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn estimation_sandwich_and_orthogonality(d in arb_density(), noise in 0.2..2.0f64) {
        let c = cfg();
        let stats = remote_stats(&d, noise, &c).unwrap();
        let var_x = d.variance();
        // Orthogonality of the conditional expectation.
        prop_assert!((stats.d0 + stats.var_v - var_x).abs() <= 1e-6 * var_x);
        // Estimation sandwich through entropy powers and variances.
        let n_x = d.entropy_power(&c).unwrap();
        let lower = n_x * noise / stats.entropy_power_y;
        let upper = var_x * noise / (var_x + noise);
        prop_assert!(stats.d0 >= lower - 1e-7, "d0 {} < floor {lower}", stats.d0);
        prop_assert!(stats.d0 <= upper + 1e-7, "d0 {} > ceil {upper}", stats.d0);
    }

    #[test]
    fn remote_bounds_sandwich_consistent(d in arb_density(), noise in 0.2..2.0f64, frac in 0.05..0.95f64) {
        let c = cfg();
        let inst = RemoteInstance::new(&d, noise, &c).unwrap();
        let var_x = d.variance();
        let dist = inst.stats.d0 + (var_x - inst.stats.d0) * frac;
        let (sl, su) = remote_sandwich(&inst.stats, dist);
        let (el, eu) = remote_explicit_from_stats(&inst, dist);
        let epil = epi_remote_lower_from_stats(&inst, dist, &RdfHook::default_for(&d));
        let epiu = epi_remote_upper(&d, noise, dist);
        let lowers = [&sl, &el, &epil];
        let uppers = [&su, &eu, &epiu];
        for lo in lowers.iter().filter(|b| b.valid) {
            for hi in uppers.iter().filter(|b| b.valid) {
                prop_assert!(
                    lo.value <= hi.value + 1e-7,
                    "{:?} {} > {:?} {}",
                    lo.formula, lo.value, hi.formula, hi.value
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // Substituting a Gaussian of matched variance into each lower-bound
    // formula must reproduce its upper-bound partner exactly: for a
    // Gaussian, every entropy power equals the corresponding variance.
    #[test]
    fn duality_maps_lower_to_upper(
        var_x in 0.2..4.0f64,
        var_z in 0.2..4.0f64,
        dist in 0.05..5.0f64,
        m in 1usize..9,
    ) {
        let var_y = var_x + var_z;
        let var_v = var_x * var_x / var_y;
        let d0 = var_x * var_z / var_y;

        let lo = remote_formula::shannon_lower(var_x, dist);
        let hi = remote_formula::shannon_upper(var_x, dist);
        prop_assert!((lo - hi).abs() <= 1e-9);

        if dist > d0 {
            let lo = remote_formula::sandwich_lower(var_v, d0, dist);
            let hi = remote_formula::sandwich_upper(var_v, d0, dist);
            prop_assert!((lo - hi).abs() <= 1e-9);

            let lo = remote_formula::remote_explicit_lower(var_v, var_x, var_y, var_z, dist);
            let hi = remote_formula::remote_explicit_upper(var_v, var_x, var_y, var_z, dist);
            prop_assert!((lo - hi).abs() <= 1e-9);
        }

        let r = ceo_bounds::log_plus(var_x / dist) * 0.5;
        let lo = remote_formula::epi_lower(var_x, var_y, var_z, r);
        let hi = remote_formula::epi_upper(var_x, var_y, var_z, dist);
        if dist > var_x * var_z / var_y {
            prop_assert!((lo - hi).abs() <= 1e-9, "epi {lo} vs {hi}");
        }

        let var_ym = var_x + var_z / m as f64;
        if dist > var_x * var_z / (m as f64 * var_ym) {
            let lo = region_formula::ceo_lower_mse(var_x, var_ym, var_z, m, dist);
            let hi = region_formula::ceo_upper_mse(var_x, var_ym, var_z, m, dist);
            prop_assert!((lo - hi).abs() <= 1e-9, "ceo {lo} vs {hi}");
        }
    }

    #[test]
    fn rdf_hooks_nonincreasing(var_x in 0.2..4.0f64, d1 in 0.01..4.0f64, d2 in 0.01..4.0f64) {
        let summary = SourceSummary { variance: var_x, entropy: 0.0, entropy_power: var_x * 0.7 };
        let (lo_d, hi_d) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        for hook in [RdfHook::ShannonLbMse, RdfHook::GaussianExact] {
            prop_assert!(hook.rate(&summary, lo_d) >= hook.rate(&summary, hi_d));
        }
    }
}

#[test]
fn f32_instances_run_with_scaled_tolerances() {
    let c = NumericConfig::<f32>::default();
    let g = SourceDensity::<f32>::gaussian(0.0, 1.0).unwrap();
    assert_relative_eq!(g.entropy(&c).unwrap(), 1.418_938_5f32, max_relative = 1e-5);
    let l = SourceDensity::<f32>::laplace(0.0, 1.0).unwrap();
    let n = l.entropy_power(&c).unwrap();
    assert_relative_eq!(n, 2.0 * std::f32::consts::E / std::f32::consts::PI, max_relative = 1e-4);
    let ns = smoothed_entropy_power(&l, 0.5f32, &c).unwrap().entropy_power;
    assert!(ns > n + 0.5);
}
