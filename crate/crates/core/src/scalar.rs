//! Scalar abstraction shared by every routine in the crate.
//!
//! All numerical code is written against [`Real`], so the same pipeline runs in
//! `f32`, `f64` or the extended-precision [`MpFloat`](crate::mp::MpFloat). Complex
//! values are `num_complex::Complex<T>`; the transcendental functions that
//! `num_complex` only offers for `Copy` floats are provided by [`ComplexExt`].

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Num, NumAssign};

/// Real scalar with the elementary functions needed by the symbol calculus.
///
/// Values are `Clone` rather than `Copy` so that heap-backed multiprecision
/// numbers can implement the trait.
pub trait Real: Clone + Debug + Display + PartialOrd + Num + NumAssign + Neg<Output = Self> + Send + Sync + 'static {
    /// Short tag used in reports ("f64", "mp256", ...).
    fn type_name() -> String;
    /// Distance from one to the next representable number.
    fn epsilon() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Parses a decimal literal at full working precision.
    fn parse_decimal(s: &str) -> Option<Self>;
    fn pi() -> Self;
    fn infinity() -> Self;
    fn neg_infinity() -> Self;
    fn is_finite(&self) -> bool;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    /// Natural logarithm; `ln(0)` is negative infinity.
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    /// Four-quadrant arctangent of `self / x`, in `(-pi, pi]`.
    fn atan2(&self, x: &Self) -> Self;
    fn powf(&self, e: &Self) -> Self;
    fn floor(&self) -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }

    fn two_pi() -> Self {
        Self::pi() * Self::from_f64(2.0)
    }

    fn powi(&self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    fn hypot(&self, other: &Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return big;
        }
        if !big.is_finite() {
            return Self::infinity();
        }
        let r = small / big.clone();
        big * (Self::one() + r.clone() * r).sqrt()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Reduces an angle into `(-pi, pi]`.
    fn wrap_angle(&self) -> Self {
        let two_pi = Self::two_pi();
        let mut x = self.clone() - two_pi.clone() * (self.clone() / two_pi.clone()).floor();
        // x in [0, 2pi)
        if x > Self::pi() {
            x -= two_pi;
        }
        x
    }

    /// The f64 noise floor `1e-13` rescaled to this type's precision.
    fn noise_floor() -> Self {
        Self::from_f64(1e-13) * Self::epsilon() / Self::from_f64(f64::EPSILON)
    }
}

/// Shorthand for lifting an `f64` literal into a generic scalar.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x)
}

macro_rules! impl_real_for_primitive {
    ($t:ty, $name:literal) => {
        impl Real for $t {
            fn type_name() -> String {
                $name.to_string()
            }
            fn epsilon() -> Self {
                <$t>::EPSILON
            }
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn parse_decimal(s: &str) -> Option<Self> {
                s.trim().parse::<$t>().ok()
            }
            fn pi() -> Self {
                std::f64::consts::PI as $t
            }
            fn infinity() -> Self {
                <$t>::INFINITY
            }
            fn neg_infinity() -> Self {
                <$t>::NEG_INFINITY
            }
            fn is_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }
            fn abs(&self) -> Self {
                <$t>::abs(*self)
            }
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn sin(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cos(&self) -> Self {
                <$t>::cos(*self)
            }
            fn atan2(&self, x: &Self) -> Self {
                <$t>::atan2(*self, *x)
            }
            fn powf(&self, e: &Self) -> Self {
                <$t>::powf(*self, *e)
            }
            fn powi(&self, n: i32) -> Self {
                <$t>::powi(*self, n)
            }
            fn floor(&self) -> Self {
                <$t>::floor(*self)
            }
            fn hypot(&self, other: &Self) -> Self {
                <$t>::hypot(*self, *other)
            }
        }
    };
}

impl_real_for_primitive!(f32, "f32");
impl_real_for_primitive!(f64, "f64");

/// Elementary functions on `Complex<T>` for any [`Real`] component type.
pub trait ComplexExt<T: Real> {
    fn modulus(&self) -> T;
    /// Principal argument in `(-pi, pi]`.
    fn phase(&self) -> T;
    fn cexp(&self) -> Complex<T>;
    /// Principal logarithm.
    fn clog(&self) -> Complex<T>;
    fn from_polar_parts(r: T, theta: T) -> Complex<T>;
    fn is_finite_c(&self) -> bool;
    fn to_c64(&self) -> Complex<f64>;
}

impl<T: Real> ComplexExt<T> for Complex<T> {
    fn modulus(&self) -> T {
        self.re.hypot(&self.im)
    }

    fn phase(&self) -> T {
        self.im.atan2(&self.re)
    }

    fn cexp(&self) -> Complex<T> {
        let r = self.re.exp();
        Complex::new(r.clone() * self.im.cos(), r * self.im.sin())
    }

    fn clog(&self) -> Complex<T> {
        Complex::new(self.modulus().ln(), self.phase())
    }

    fn from_polar_parts(r: T, theta: T) -> Complex<T> {
        Complex::new(r.clone() * theta.cos(), r * theta.sin())
    }

    fn is_finite_c(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn to_c64(&self) -> Complex<f64> {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// Lifts an `f64` complex number into `Complex<T>`.
pub fn complex<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from_f64(re), T::from_f64(im))
}
