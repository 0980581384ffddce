//! Arbitrary-precision real numbers.
//!
//! A thin wrapper over `astro_float::BigFloat` that carries the working
//! precision in a thread-local (default 256 bits) so values compose with the
//! usual operators and implement `num_traits::Num`, which lets
//! `num_complex::Complex<Real>` work unchanged.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_rational::BigRational;
use num_traits::{Num, One, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static PREC: Cell<usize> = const { Cell::new(256) };
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

/// Working precision in bits for the current thread.
pub fn precision() -> usize {
    PREC.with(|p| p.get())
}

pub fn set_precision(bits: usize) {
    PREC.with(|p| p.set(bits.max(64)));
}

/// Runs `f` at a temporary precision.
pub fn with_precision<T>(bits: usize, f: impl FnOnce() -> T) -> T {
    let old = precision();
    set_precision(bits);
    let out = f();
    set_precision(old);
    out
}

fn cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    pub fn from_i64(n: i64) -> Real {
        Real(BigFloat::from_i64(n, precision()))
    }

    pub fn from_f64(x: f64) -> Real {
        Real(BigFloat::from_f64(x, precision()))
    }

    fn from_decimal_integer(s: &str) -> Real {
        let p = precision();
        Real(cc(|c| BigFloat::parse(s, Radix::Dec, p, RM, c)))
    }

    pub fn from_rational(q: &BigRational) -> Real {
        let n = Real::from_decimal_integer(&q.numer().to_string());
        let d = Real::from_decimal_integer(&q.denom().to_string());
        n / d
    }

    /// Parses a decimal literal such as `-1.25e3`.
    pub fn parse(s: &str) -> Option<Real> {
        let s = s.trim();
        // the underlying parser stops silently at the first bad character
        if !s.bytes().any(|b| b.is_ascii_digit()) || !s.bytes().all(|b| b.is_ascii_digit() || b"+-.eE".contains(&b)) {
            return None;
        }
        let p = precision();
        let v = cc(|c| BigFloat::parse(s, Radix::Dec, p, RM, c));
        (!v.is_nan()).then_some(Real(v))
    }

    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        let s = cc(|c| self.0.format(Radix::Dec, RM, c)).unwrap_or_default();
        s.parse::<f64>().unwrap_or(f64::NAN)
    }

    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    pub fn pi() -> Real {
        let p = precision();
        Real(cc(|c| c.pi(p, RM)))
    }

    pub fn sqrt(&self) -> Real {
        Real(self.0.sqrt(precision(), RM))
    }

    pub fn exp(&self) -> Real {
        let p = precision();
        Real(cc(|c| self.0.exp(p, RM, c)))
    }

    pub fn ln(&self) -> Real {
        let p = precision();
        Real(cc(|c| self.0.ln(p, RM, c)))
    }

    pub fn sin(&self) -> Real {
        let p = precision();
        Real(cc(|c| self.0.sin(p, RM, c)))
    }

    pub fn cos(&self) -> Real {
        let p = precision();
        Real(cc(|c| self.0.cos(p, RM, c)))
    }

    pub fn atan(&self) -> Real {
        let p = precision();
        Real(cc(|c| self.0.atan(p, RM, c)))
    }

    /// Real power `self^e` for positive `self`.
    pub fn powf(&self, e: &Real) -> Real {
        let p = precision();
        Real(cc(|c| self.0.pow(&e.0, p, RM, c)))
    }

    pub fn powi(&self, n: i64) -> Real {
        let r = Real(self.0.powi(n.unsigned_abs() as usize, precision(), RM));
        if n < 0 {
            Real::one() / r
        } else {
            r
        }
    }

    pub fn abs(&self) -> Real {
        Real(self.0.abs())
    }

    pub fn is_positive(&self) -> bool {
        !self.0.is_zero() && self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        !self.0.is_zero() && self.0.is_negative()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    /// `|self - other| / max(|self|, |other|)`, or the absolute gap when both are zero-ish.
    pub fn rel_diff(&self, other: &Real) -> Real {
        let d = (self.clone() - other.clone()).abs();
        let m = if self.abs() > other.abs() { self.abs() } else { other.abs() };
        if m.is_zero() {
            d
        } else {
            d / m
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_string_digits(&self, digits: usize) -> String {
        let bits = ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + 8;
        let mut v = self.0.clone();
        if v.is_zero() {
            return "0".into();
        }
        let _ = v.set_precision(bits.max(64), RM);
        let s = cc(|c| v.format(Radix::Dec, RM, c)).unwrap_or_default();
        trim_mantissa(&s, digits)
    }
}

fn trim_mantissa(s: &str, digits: usize) -> String {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    let mut out = String::new();
    let mut count = 0;
    for ch in mant.chars() {
        if ch.is_ascii_digit() {
            if count >= digits {
                continue;
            }
            count += 1;
        }
        out.push(ch);
    }
    format!("{out}{exp}")
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.write_str(&self.to_string_digits(digits))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_string_digits(30))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                Real(self.0.$f(&rhs.0, precision(), RM))
            }
        }
        impl<'a> $tr<&'a Real> for &'a Real {
            type Output = Real;
            fn $m(self, rhs: &'a Real) -> Real {
                Real(self.0.$f(&rhs.0, precision(), RM))
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Rem for Real {
    type Output = Real;
    fn rem(self, rhs: Real) -> Real {
        Real(self.0.rem(&rhs.0))
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(BigFloat::neg(&self.0))
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(BigFloat::neg(&self.0))
    }
}

impl Zero for Real {
    fn zero() -> Real {
        Real::from_i64(0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Real {
    fn one() -> Real {
        Real::from_i64(1)
    }
}

impl Num for Real {
    type FromStrRadixErr = &'static str;
    fn from_str_radix(s: &str, radix: u32) -> Result<Real, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err("only radix 10 is supported");
        }
        Real::parse(s).ok_or("invalid decimal literal")
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Real {
        Real::from_i64(n)
    }
}
