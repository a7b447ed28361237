use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the whole engine is generic over. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + LowerExp + Send + Sync + Sum + 'static
{
    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which cannot happen for finite literals in f32/f64.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn ci<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

#[inline]
pub fn is_finite_c<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Squared modulus without the square root.
#[inline]
pub fn abs2<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}
