//! Scalar abstraction shared by the numerical kernels.
//!
//! Everything below the experiment layer is written against [`Real`], which
//! is implemented for `f32` and `f64`. The FFT backend imposes `FftNum`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use realfft::FftNum;

pub trait Real:
    Float
    + FloatConst
    + FftNum
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Display
    + LowerExp
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Sign with `sgn(0) = 0`.
    #[inline]
    fn sgn0(self) -> Self {
        if self > Self::zero() {
            Self::one()
        } else if self < Self::zero() {
            -Self::one()
        } else {
            Self::zero()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Integer power by repeated squaring; `powi` through an `i32` cast is fine
/// for the exponents used here but this keeps `u32` exponents exact.
#[inline]
pub fn ipow<T: Real>(x: T, e: u32) -> T {
    let mut base = x;
    let mut acc = T::one();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}
