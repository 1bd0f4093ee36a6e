//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point type the model is generic over.
///
/// Implemented for `f32` and `f64`. Tolerances that only make sense in
/// double precision are derived from [`Scalar::tol`], which clamps a requested
/// tolerance to a small multiple of machine epsilon.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Lossy for `f32`, which is the point.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts an index or count.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    /// `requested`, but never tighter than `64·ε`.
    #[inline]
    fn tol(requested: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(requested).max(floor)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Gudermannian function `gd(a) = ∫₀^a sech ξ dξ = atan(sinh a)`.
pub fn gudermannian<T: Scalar>(a: T) -> T {
    a.sinh().atan()
}

/// Relative error with a zero-safe denominator.
pub fn rel_err<T: Scalar>(value: T, reference: T) -> T {
    let scale = value.abs().max(reference.abs());
    if scale == T::zero() {
        T::zero()
    } else {
        (value - reference).abs() / scale
    }
}
