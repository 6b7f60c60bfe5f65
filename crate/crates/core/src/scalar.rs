//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign};

/// Real field used for the components of all complex coefficients (f32 or f64).
pub trait Real:
    Float + FloatConst + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative level at which accumulated error still counts as certified.
    fn trust_rel() -> Self {
        Self::epsilon().powf(Self::lit(0.625))
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn one<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn zero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn real<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// Integer power for complex base, including negative exponents.
#[inline]
pub fn cpow<T: Real>(z: C<T>, n: i64) -> C<T> {
    if n >= 0 {
        z.powu(n as u32)
    } else {
        let p = z.powu((-n) as u32);
        if p.norm() > T::min_positive_value().sqrt() {
            one::<T>() / p
        } else {
            // dividing by p would square a number near underflow
            (one::<T>() / z).powu((-n) as u32)
        }
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
#[inline]
pub fn rel_diff<T: Real>(a: C<T>, b: C<T>) -> T {
    let scale = a.norm().max(b.norm());
    if scale == T::zero() {
        T::zero()
    } else {
        (a - b).norm() / scale
    }
}

/// Ratio `num / scale`, zero when both vanish.
#[inline]
pub fn ratio_or_zero<T: Real>(num: T, scale: T) -> T {
    if num == T::zero() {
        T::zero()
    } else if scale == T::zero() {
        T::infinity()
    } else {
        num / scale
    }
}
