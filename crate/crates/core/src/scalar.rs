//! Generic floating-point scalar the numerics are written against.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar type: `f32` or `f64`.
///
/// Everything downstream (densities, quadrature, bounds, the region
/// machinery, the Monte Carlo simulator) is generic over this trait.
/// Default tolerances scale with the type's epsilon, so `f32` instances
/// run with proportionally looser targets.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Conversion from an `f64` constant (lossy for `f32`).
    fn of(x: f64) -> Self;

    /// Lossy conversion to `f64`, used for error reporting and output.
    fn as_f64(self) -> f64;

    /// `2*pi*e`, the entropy-power normalizer.
    fn two_pi_e() -> Self {
        Self::TAU() * Self::E()
    }
}

impl Real for f64 {
    fn of(x: f64) -> f64 {
        x
    }
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    fn of(x: f64) -> f32 {
        x as f32
    }
    fn as_f64(self) -> f64 {
        f64::from(self)
    }
}

/// `max(0, ln x)`, the clamped logarithm every bound formula is stated with.
/// Non-positive arguments clamp to zero as well.
pub fn log_plus<T: Real>(x: T) -> T {
    if x > T::one() {
        x.ln()
    } else {
        T::zero()
    }
}
