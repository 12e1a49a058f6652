//! Scalar abstraction for the real field underlying all simulations.
//!
//! Every numerical module is generic over [`Scalar`], which is satisfied by
//! `f32` and `f64`. Concrete aliases for the common `f64` instantiation live
//! at the crate root.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type the whole crate is generic over.
///
/// The `faer::traits::RealField` bound is what lets the sparse and dense
/// factorizations run on `Complex<T>` for the same `T`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + faer::traits::RealField
    + Sum
    + Display
    + LowerExp
    + Debug
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + faer::traits::RealField
        + Sum
        + Display
        + LowerExp
        + Debug
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for converting an `f64` literal into the working scalar type.
#[inline]
pub fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must be representable in the scalar type")
}

/// Complex number with the given real part and zero imaginary part.
#[inline]
pub fn cplx<T: Scalar>(re: f64) -> Complex<T> {
    Complex::new(real(re), T::zero())
}
