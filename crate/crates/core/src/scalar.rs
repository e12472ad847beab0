//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the numerics are generic over: `f32` or `f64`.
///
/// Tolerances throughout the crate are stated for `f64`; an `f32`
/// instantiation runs the same algorithms at single-precision accuracy.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over a [`Scalar`].
pub type Cx<T> = Complex<T>;

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts a count into the working scalar.
#[inline]
pub fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

#[inline]
pub fn cx<T: Scalar>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub fn real<T: Scalar>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

/// The imaginary unit.
#[inline]
pub fn imag_unit<T: Scalar>() -> Cx<T> {
    Complex::new(T::zero(), T::one())
}

/// Lossy view of a scalar as `f64`, used for diagnostics and error payloads.
#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Lossy view of a complex scalar as `(re, im)` in `f64`.
#[inline]
pub fn cx_to_f64<T: Scalar>(z: Cx<T>) -> (f64, f64) {
    (to_f64(z.re), to_f64(z.im))
}

/// Square root of `value` on the branch closest to `reference`.
#[inline]
pub fn sqrt_near<T: Scalar>(value: Cx<T>, reference: Cx<T>) -> Cx<T> {
    let root = value.sqrt();
    if (root - reference).norm_sqr() <= (root + reference).norm_sqr() {
        root
    } else {
        -root
    }
}
