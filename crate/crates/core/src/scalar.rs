//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point element type: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + fmt::LowerExp
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Converts from `f64`, rounding to the nearest representable value.
    fn of(x: f64) -> Self;

    /// Widens (or copies) to `f64`.
    fn to_f64_lossless(self) -> f64;

    /// Converts from a dump-format `f32`.
    fn of_f32(x: f32) -> Self;
}

impl Scalar for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64_lossless(self) -> f64 {
        self as f64
    }

    #[inline]
    fn of_f32(x: f32) -> Self {
        x
    }
}

impl Scalar for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64_lossless(self) -> f64 {
        self
    }

    #[inline]
    fn of_f32(x: f32) -> Self {
        x as f64
    }
}

/// Writes `x` in the shortest decimal form that parses back to the same value.
///
/// Plain notation is used in the usual magnitude range and exponent notation
/// outside it, so very large or tiny values do not expand into hundreds of
/// digits.
pub fn write_shortest<T: Scalar, W: fmt::Write>(out: &mut W, x: T) -> fmt::Result {
    let a = x.abs();
    if a.is_zero() || (a >= T::of(1e-5) && a < T::of(1e16)) {
        write!(out, "{}", x)
    } else {
        write!(out, "{:e}", x)
    }
}

/// Dot product accumulated in `T`.
#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Euclidean norm accumulated in `T`.
#[inline]
pub fn l2_norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
