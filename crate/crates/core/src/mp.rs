//! Fixed-precision binary floating point backed by `astro-float`.
//!
//! `MpFloat<BITS>` carries a `BITS`-bit mantissa. Every arithmetic result is
//! rounded to that precision (round-half-even), so values of one type never mix
//! precisions. Transcendental functions share a per-thread constant cache.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_traits::{Num, One, Zero};

use crate::scalar::Real;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Binary floating point number with a `BITS`-bit mantissa.
#[derive(Clone)]
pub struct MpFloat<const BITS: usize>(BigFloat);

/// 256-bit mantissa, about 77 significant decimal digits.
pub type Mp256 = MpFloat<256>;

impl<const BITS: usize> MpFloat<BITS> {
    pub fn from_big(x: BigFloat) -> Self {
        let mut x = x;
        if let Some(p) = x.precision() {
            if p != BITS {
                // precision changes never fail for finite values
                let _ = x.set_precision(BITS, RM);
            }
        }
        MpFloat(x)
    }

    pub fn as_big(&self) -> &BigFloat {
        &self.0
    }
}

impl<const BITS: usize> fmt::Debug for MpFloat<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const BITS: usize> fmt::Display for MpFloat<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const BITS: usize> PartialEq for MpFloat<BITS> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl<const BITS: usize> PartialOrd for MpFloat<BITS> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident, $body:expr) => {
        impl<const BITS: usize> $trait for MpFloat<BITS> {
            type Output = Self;
            fn $method(self, rhs: Self) -> Self {
                let f: fn(&BigFloat, &BigFloat, usize) -> BigFloat = $body;
                MpFloat(f(&self.0, &rhs.0, BITS))
            }
        }

        impl<const BITS: usize> $assign_trait for MpFloat<BITS> {
            fn $assign_method(&mut self, rhs: Self) {
                let f: fn(&BigFloat, &BigFloat, usize) -> BigFloat = $body;
                self.0 = f(&self.0, &rhs.0, BITS);
            }
        }
    };
}

binary_op!(Add, add, AddAssign, add_assign, |a, b, p| a.add(b, p, RM));
binary_op!(Sub, sub, SubAssign, sub_assign, |a, b, p| a.sub(b, p, RM));
binary_op!(Mul, mul, MulAssign, mul_assign, |a, b, p| a.mul(b, p, RM));
binary_op!(Div, div, DivAssign, div_assign, |a, b, p| a.div(b, p, RM));
binary_op!(Rem, rem, RemAssign, rem_assign, |a, b, _| a.rem(b));

impl<const BITS: usize> Neg for MpFloat<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        MpFloat(-self.0)
    }
}

impl<const BITS: usize> Zero for MpFloat<BITS> {
    fn zero() -> Self {
        MpFloat(BigFloat::from_f64(0.0, BITS))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<const BITS: usize> One for MpFloat<BITS> {
    fn one() -> Self {
        MpFloat(BigFloat::from_f64(1.0, BITS))
    }
}

impl<const BITS: usize> Num for MpFloat<BITS> {
    type FromStrRadixErr = String;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        Self::parse_decimal(s).ok_or_else(|| format!("invalid decimal literal {s:?}"))
    }
}

fn ldexp(mut v: f64, mut e: i64) -> f64 {
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

impl<const BITS: usize> Real for MpFloat<BITS> {
    fn type_name() -> String {
        format!("mp{BITS}")
    }

    fn epsilon() -> Self {
        MpFloat(BigFloat::from_f64(0.5, BITS).powi(BITS - 1, BITS, RM))
    }

    fn from_f64(x: f64) -> Self {
        MpFloat(BigFloat::from_f64(x, BITS))
    }

    fn to_f64(&self) -> f64 {
        let x = &self.0;
        if x.is_nan() {
            return f64::NAN;
        }
        if x.is_inf_pos() {
            return f64::INFINITY;
        }
        if x.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if x.is_zero() {
            return 0.0;
        }
        let Some((words, _, sign, exponent, _)) = x.as_raw_parts() else {
            return f64::NAN;
        };
        // value = 0.m * 2^exponent with the top word holding the leading bits
        let top = *words.last().expect("nonzero mantissa") as f64;
        let word_bits = (std::mem::size_of_val(&words[0]) * 8) as i64;
        let v = ldexp(top, exponent as i64 - word_bits);
        match sign {
            Sign::Neg => -v,
            Sign::Pos => v,
        }
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        let v = with_consts(|cc| BigFloat::parse(s.trim(), Radix::Dec, BITS, RM, cc));
        if v.is_nan() {
            None
        } else {
            Some(MpFloat(v))
        }
    }

    fn pi() -> Self {
        MpFloat(with_consts(|cc| cc.pi(BITS, RM)))
    }

    fn infinity() -> Self {
        MpFloat(astro_float::INF_POS)
    }

    fn neg_infinity() -> Self {
        MpFloat(astro_float::INF_NEG)
    }

    fn is_finite(&self) -> bool {
        !(self.0.is_nan() || self.0.is_inf())
    }

    fn abs(&self) -> Self {
        MpFloat(self.0.abs())
    }

    fn sqrt(&self) -> Self {
        MpFloat(self.0.sqrt(BITS, RM))
    }

    fn exp(&self) -> Self {
        MpFloat(with_consts(|cc| self.0.exp(BITS, RM, cc)))
    }

    fn ln(&self) -> Self {
        if self.0.is_zero() {
            return Self::neg_infinity();
        }
        MpFloat(with_consts(|cc| self.0.ln(BITS, RM, cc)))
    }

    fn sin(&self) -> Self {
        MpFloat(with_consts(|cc| self.0.sin(BITS, RM, cc)))
    }

    fn cos(&self) -> Self {
        MpFloat(with_consts(|cc| self.0.cos(BITS, RM, cc)))
    }

    fn atan2(&self, x: &Self) -> Self {
        let y = self;
        if x.is_zero() {
            return if y.0.is_positive() && !y.is_zero() {
                Self::pi() / Self::from_f64(2.0)
            } else if y.is_zero() {
                Self::zero()
            } else {
                -(Self::pi() / Self::from_f64(2.0))
            };
        }
        let base = MpFloat(with_consts(|cc| y.0.div(&x.0, BITS, RM).atan(BITS, RM, cc)));
        if x.0.is_positive() {
            base
        } else if y.0.is_negative() {
            base - Self::pi()
        } else {
            base + Self::pi()
        }
    }

    fn powf(&self, e: &Self) -> Self {
        if self.is_zero() {
            return if e.is_zero() { Self::one() } else { Self::zero() };
        }
        MpFloat(with_consts(|cc| self.0.pow(&e.0, BITS, RM, cc)))
    }

    fn floor(&self) -> Self {
        MpFloat(self.0.floor())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Mp256;

    #[test]
    fn arithmetic_carries_full_precision() {
        let third = M::one() / M::from_f64(3.0);
        let back = third.clone() * M::from_f64(3.0) - M::one();
        assert!(back.abs() < M::from_f64(1e-70));
        // f64 would lose this entirely
        let tiny = M::from_f64(1e-40);
        let sum = (M::one() + tiny.clone()) - M::one();
        assert!(((sum - tiny) / M::from_f64(1e-40)).abs() < M::from_f64(1e-30));
    }

    #[test]
    fn to_f64_round_trips_doubles() {
        for x in [1.0, -2.5, 3.0e-200, 7.25e150, 0.1, -1e-300, 1.7e308] {
            assert_eq!(M::from_f64(x).to_f64(), x, "{x}");
        }
        assert_eq!(M::zero().to_f64(), 0.0);
        assert_eq!(M::infinity().to_f64(), f64::INFINITY);
    }

    #[test]
    fn transcendental_functions_agree_with_f64() {
        let x = 0.731f64;
        let m = M::from_f64(x);
        assert!((m.exp().to_f64() - x.exp()).abs() < 1e-15);
        assert!((m.ln().to_f64() - x.ln()).abs() < 1e-15);
        assert!((m.sin().to_f64() - x.sin()).abs() < 1e-15);
        assert!((m.cos().to_f64() - x.cos()).abs() < 1e-15);
        assert!((m.sqrt().to_f64() - x.sqrt()).abs() < 1e-15);
        assert!((m.powf(&M::from_f64(1.5)).to_f64() - x.powf(1.5)).abs() < 1e-15);
        assert!((M::pi().to_f64() - std::f64::consts::PI).abs() < 1e-16);
    }

    #[test]
    fn atan2_covers_all_quadrants() {
        for (y, x) in [(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0), (0.0, -1.0), (1.0, 0.0), (-2.0, 0.0)] {
            let got = M::from_f64(y).atan2(&M::from_f64(x)).to_f64();
            assert!((got - f64::atan2(y, x)).abs() < 1e-15, "atan2({y},{x}) = {got}");
        }
    }

    #[test]
    fn decimal_parsing_is_exact_to_working_precision() {
        let a = M::parse_decimal("0.3").unwrap();
        let err = a * M::from_f64(10.0) - M::from_f64(3.0);
        assert!(err.abs() < M::from_f64(1e-70));
        assert!(M::parse_decimal("not a number").is_none());
    }

    #[test]
    fn generic_powi_and_wrap_angle() {
        let x = M::from_f64(1.1);
        let p = x.powi(-3).to_f64();
        assert!((p - 1.1f64.powi(-3)).abs() < 1e-15);
        let w = (M::pi() * M::from_f64(3.0) + M::from_f64(0.5)).wrap_angle();
        assert!((w + M::pi() - M::from_f64(0.5)).abs() < M::from_f64(1e-70));
    }

    #[test]
    fn epsilon_matches_mantissa_width() {
        let e = M::epsilon().to_f64();
        assert!((e - 2f64.powi(-255)).abs() < 1e-90);
    }
}
