//! Special functions used by the closed-form smoothed densities.
//!
//! Backed by `libm` in double precision; generic wrappers convert at the
//! boundary, which keeps `f32` instances as accurate as their type allows.

use crate::scalar::Real;

/// Error function.
pub fn erf<T: Real>(x: T) -> T {
    T::of(libm::erf(x.as_f64()))
}

/// Complementary error function.
pub fn erfc<T: Real>(x: T) -> T {
    T::of(libm::erfc(x.as_f64()))
}

/// Scaled complementary error function `exp(x^2) * erfc(x)`.
///
/// Stable for large positive `x` where `erfc` underflows and `exp(x^2)`
/// overflows. Negative arguments may overflow (callers keep `x >= 0`).
pub fn erfcx<T: Real>(x: T) -> T {
    T::of(erfcx_f64(x.as_f64()))
}

fn erfcx_f64(x: f64) -> f64 {
    if x < 0.0 {
        // erfcx(-x) = 2 exp(x^2) - erfcx(x); overflows to inf for x << 0.
        return 2.0 * (x * x).exp() - erfcx_f64(-x);
    }
    if x < 6.0 {
        // exp(36) ~ 4.3e15 and erfc(6) ~ 2.2e-17: both representable.
        (x * x).exp() * libm::erfc(x)
    } else {
        // Asymptotic series erfcx(x) ~ 1/(x sqrt(pi)) * sum (-1)^k (2k-1)!!/(2x^2)^k.
        let inv2x2 = 1.0 / (2.0 * x * x);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=8u32 {
            term *= -(2.0 * f64::from(k) - 1.0) * inv2x2;
            sum += term;
        }
        sum / (x * core::f64::consts::PI.sqrt())
    }
}

/// Standard normal CDF.
pub fn norm_cdf<T: Real>(x: T) -> T {
    let half = T::of(0.5);
    half * erfc(-x / T::SQRT_2())
}

/// Standard normal pdf.
pub fn norm_pdf<T: Real>(x: T) -> T {
    (-x * x * T::of(0.5)).exp() / T::TAU().sqrt()
}

/// Pdf of a zero-mean Gaussian with the given variance.
pub fn gauss_pdf<T: Real>(x: T, variance: T) -> T {
    norm_pdf(x / variance.sqrt()) / variance.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn erfcx_matches_direct_product_below_six() {
        for &x in &[0.0, 0.3, 1.0, 2.5, 5.9] {
            let direct = (x * x as f64).exp() * libm::erfc(x);
            assert_relative_eq!(erfcx_f64(x), direct, max_relative = 1e-13);
        }
    }

    #[test]
    fn erfcx_series_agrees_with_product_branch() {
        // Both branches are valid on [5.5, 8]; they must agree there.
        for &x in &[5.5, 6.2, 7.0, 8.0] {
            let product = (x * x as f64).exp() * libm::erfc(x);
            assert_relative_eq!(erfcx_f64(x), product, max_relative = 1e-8);
        }
    }

    #[test]
    fn erfcx_large_argument_asymptote() {
        // erfcx(x) ~ 1/(x sqrt(pi)) for large x.
        let x = 1e4;
        assert_relative_eq!(
            erfcx_f64(x),
            1.0 / (x * core::f64::consts::PI.sqrt()),
            max_relative = 1e-8
        );
    }

    #[test]
    fn norm_cdf_symmetry() {
        assert_relative_eq!(norm_cdf(0.0f64), 0.5, max_relative = 1e-15);
        assert_relative_eq!(norm_cdf(1.0f64) + norm_cdf(-1.0f64), 1.0, max_relative = 1e-14);
        assert_relative_eq!(norm_cdf(1.959_963_984_540_054f64), 0.975, max_relative = 1e-12);
    }

    #[test]
    fn gauss_pdf_normalizes() {
        // Riemann check of unit mass.
        let v = 2.3f64;
        let h = 1e-3;
        let mass: f64 = (-20_000..20_000)
            .map(|i| gauss_pdf(i as f64 * h, v) * h)
            .sum();
        assert_relative_eq!(mass, 1.0, max_relative = 1e-9);
    }
}
