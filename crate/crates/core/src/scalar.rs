//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All geometry, quadrature and linear algebra is written against [`Real`],
//! which is implemented for `f32` and `f64`. Complex quantities are
//! `num_complex::Complex<T>` over the same scalar.

use std::fmt::{Debug, Display, LowerExp};
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar usable throughout the toolkit.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Default
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into this scalar.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

#[inline]
pub(crate) fn czero<T: Real>() -> Cplx<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cre<T: Real>(x: T) -> Cplx<T> {
    Complex::new(x, T::zero())
}

/// `e^{i theta}`.
#[inline]
pub(crate) fn cis<T: Real>(theta: T) -> Cplx<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

/// Euclidean norm of a complex vector.
pub fn norm2<T: Real>(v: &[Cplx<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Maximum modulus over a complex vector (zero for an empty slice).
pub fn max_modulus<T: Real>(v: &[Cplx<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
}
