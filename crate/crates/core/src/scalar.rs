//! Scalar abstraction shared by every numeric kernel in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar used throughout the crate.
///
/// Everything is written against this trait; `f64` is the working precision
/// (all published tolerances assume it), `f32` is supported for cheap
/// low-accuracy sweeps.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in scalar type")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }

    /// Reduces `x` into `[0, 1)`.
    #[inline]
    fn frac01(self) -> Self {
        let r = self - self.floor();
        // `x - floor(x)` can round up to exactly 1 for tiny negative x.
        if r >= Self::one() {
            Self::zero()
        } else {
            r
        }
    }

    /// Reduces `x` into `[-1/2, 1/2)`.
    #[inline]
    fn wrap_half(self) -> Self {
        let half = Self::lit(0.5);
        (self + half).frac01() - half
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Distance on the circle ℝ/ℤ between two phases given in revolutions.
#[inline]
pub fn circle_distance<T: Real>(a: T, b: T) -> T {
    (a - b).wrap_half().abs()
}
