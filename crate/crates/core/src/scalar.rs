//! Floating-point abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type the algorithms are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances quoted in the tests assume
/// `f64`; `f32` runs are supported but only meaningful at single precision.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + LinalgScalar
    + ScalarOperand
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn c(x: f64) -> Self;

    /// Widen to `f64` for reporting and serialization.
    fn f64(self) -> f64;

    /// Conversion from an index or count.
    fn from_usize_lossy(n: usize) -> Self {
        Self::c(n as f64)
    }
}

impl Scalar for f64 {
    #[inline]
    fn c(x: f64) -> Self {
        x
    }
    #[inline]
    fn f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    #[inline]
    fn c(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn f64(self) -> f64 {
        self as f64
    }
}
