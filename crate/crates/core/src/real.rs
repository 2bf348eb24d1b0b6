//! Scalar abstraction shared by the closed-form evaluators and the residual
//! harness.
//!
//! Everything that evaluates exact solutions is generic over [`Real`], which is
//! implemented for `f64` and for [`Ext`], a 128-bit binary float. Finite
//! difference residuals at small steps divide round-off by `h^3`, so the
//! verification paths run in [`Ext`] while production paths stay in `f64`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_complex::Complex;
use num_traits::{Num, One, Zero};

/// Real scalar with the elementary functions needed by the exact solutions.
pub trait Real:
    Clone + fmt::Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn exp(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn sqrt(&self) -> Self;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

/// Working precision of [`Ext`] in bits.
pub const EXT_PRECISION: usize = 128;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("allocating the astro-float constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// 128-bit binary floating point number (about 38 decimal digits).
#[derive(Clone)]
pub struct Ext(BigFloat);

impl Ext {
    pub fn new(v: f64) -> Self {
        Ext(BigFloat::from_f64(v, EXT_PRECISION))
    }

    /// Full decimal expansion, for diagnostics.
    pub fn to_decimal_string(&self) -> String {
        with_consts(|cc| self.0.format(Radix::Dec, RM, cc))
            .unwrap_or_else(|_| format!("{:e}", self.to_f64()))
    }
}

impl fmt::Debug for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ext({:e})", self.to_f64())
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl PartialEq for Ext {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! ext_binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl $tr for Ext {
            type Output = Ext;
            fn $method(self, rhs: Ext) -> Ext {
                Ext(self.0.$call(&rhs.0, EXT_PRECISION, RM))
            }
        }
        impl<'a> $tr<&'a Ext> for &'a Ext {
            type Output = Ext;
            fn $method(self, rhs: &'a Ext) -> Ext {
                Ext(self.0.$call(&rhs.0, EXT_PRECISION, RM))
            }
        }
    };
}

ext_binop!(Add, add, add);
ext_binop!(Sub, sub, sub);
ext_binop!(Mul, mul, mul);
ext_binop!(Div, div, div);

impl Rem for Ext {
    type Output = Ext;
    fn rem(self, rhs: Ext) -> Ext {
        Ext(self.0.rem(&rhs.0))
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext(self.0.neg())
    }
}

impl Zero for Ext {
    fn zero() -> Self {
        Ext::new(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Ext {
    fn one() -> Self {
        Ext::new(1.0)
    }
}

impl Num for Ext {
    type FromStrRadixErr = String;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let rdx = match radix {
            2 => Radix::Bin,
            8 => Radix::Oct,
            10 => Radix::Dec,
            16 => Radix::Hex,
            other => return Err(format!("unsupported radix {other}")),
        };
        let v = with_consts(|cc| BigFloat::parse(s, rdx, EXT_PRECISION, RM, cc));
        if v.is_nan() {
            Err(format!("cannot parse `{s}`"))
        } else {
            Ok(Ext(v))
        }
    }
}

impl Real for Ext {
    fn from_f64(v: f64) -> Self {
        Ext::new(v)
    }

    fn to_f64(&self) -> f64 {
        let b = &self.0;
        if b.is_nan() {
            return f64::NAN;
        }
        if b.is_inf() {
            return if b.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        if b.is_zero() {
            return 0.0;
        }
        let (Some(words), Some(e)) = (b.mantissa_digits(), b.exponent()) else {
            return f64::NAN;
        };
        // Mantissa words are little-endian and normalized: value = 0.m * 2^e.
        let top = *words.last().unwrap_or(&0) as f64;
        let next = if words.len() > 1 { words[words.len() - 2] as f64 } else { 0.0 };
        let m = (top + next / 18_446_744_073_709_551_616.0) / 18_446_744_073_709_551_616.0;
        let v = m * 2f64.powi(e);
        if b.is_negative() {
            -v
        } else {
            v
        }
    }

    fn exp(&self) -> Self {
        Ext(with_consts(|cc| self.0.exp(EXT_PRECISION, RM, cc)))
    }
    fn sin(&self) -> Self {
        Ext(with_consts(|cc| self.0.sin(EXT_PRECISION, RM, cc)))
    }
    fn cos(&self) -> Self {
        Ext(with_consts(|cc| self.0.cos(EXT_PRECISION, RM, cc)))
    }
    fn sinh(&self) -> Self {
        Ext(with_consts(|cc| self.0.sinh(EXT_PRECISION, RM, cc)))
    }
    fn cosh(&self) -> Self {
        Ext(with_consts(|cc| self.0.cosh(EXT_PRECISION, RM, cc)))
    }
    fn sqrt(&self) -> Self {
        Ext(self.0.sqrt(EXT_PRECISION, RM))
    }
    fn abs(&self) -> Self {
        Ext(self.0.abs())
    }
}

/// Shorthand for a real constant lifted into `T`.
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v)
}

/// Complex constant from two `f64` parts.
pub fn clit<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from_f64(re), T::from_f64(im))
}

/// Lift a complex `f64` into `Complex<T>`.
pub fn lift<T: Real>(z: Complex<f64>) -> Complex<T> {
    clit(z.re, z.im)
}

/// Project a complex `T` down to `f64`.
pub fn lower<T: Real>(z: &Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn cexp<T: Real>(z: &Complex<T>) -> Complex<T> {
    let m = z.re.exp();
    Complex::new(m.clone() * z.im.cos(), m * z.im.sin())
}

pub fn cabs<T: Real>(z: &Complex<T>) -> T {
    (z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()).sqrt()
}

/// Principal square root (branch cut along the negative real axis).
pub fn csqrt<T: Real>(z: &Complex<T>) -> Complex<T> {
    let r = cabs(z);
    let two = lit::<T>(2.0);
    let re = ((r.clone() + z.re.clone()) / two.clone()).sqrt();
    let im = ((r - z.re.clone()) / two).sqrt();
    if z.im < T::zero() {
        Complex::new(re, -im)
    } else {
        Complex::new(re, im)
    }
}

pub fn cpowi<T: Real>(z: &Complex<T>, n: u32) -> Complex<T> {
    let mut acc = Complex::new(T::one(), T::zero());
    for _ in 0..n {
        acc = acc * z.clone();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_round_trips_f64() {
        for v in [1.0, -1.5, 0.1, 3.0e-200, -7.25e150, 2.0f64.sqrt(), 0.0] {
            assert_eq!(Ext::new(v).to_f64(), v);
        }
    }

    #[test]
    fn ext_transcendentals_match_f64() {
        for v in [0.3, -1.2, 2.5, 7.0] {
            let e = Ext::new(v);
            assert!((e.exp().to_f64() - v.exp()).abs() <= 1e-15 * v.exp());
            assert!((e.sin().to_f64() - v.sin()).abs() <= 1e-15);
            assert!((e.cos().to_f64() - v.cos()).abs() <= 1e-15);
            assert!((e.sinh().to_f64() - v.sinh()).abs() <= 1e-15 * v.cosh());
            assert!((e.cosh().to_f64() - v.cosh()).abs() <= 1e-15 * v.cosh());
        }
    }

    #[test]
    fn ext_carries_more_than_double_precision() {
        let third = Ext::one() / Ext::new(3.0);
        let back = third * Ext::new(3.0) - Ext::one();
        assert!(back.to_f64().abs() < 1e-36);
        let tiny = Ext::new(1e-25);
        let sum = (Ext::one() + tiny.clone()) - Ext::one();
        assert!((sum.to_f64() - 1e-25).abs() < 1e-35);
    }

    #[test]
    fn ext_parses_decimal_text() {
        let v = Ext::from_str_radix("0.125", 10).unwrap();
        assert_eq!(v.to_f64(), 0.125);
        assert!(Ext::from_str_radix("1", 7).is_err());
    }

    #[test]
    fn principal_sqrt_of_negative_imaginary() {
        let a = csqrt(&Complex::new(0.0, -2.0));
        assert!((a.re - 1.0).abs() < 1e-15 && (a.im + 1.0).abs() < 1e-15);
        let b = csqrt(&clit::<Ext>(-4.0, 0.0));
        assert!((b.re.to_f64()).abs() < 1e-30 && (b.im.to_f64() - 2.0).abs() < 1e-30);
    }

    #[test]
    fn complex_exponential_on_imaginary_axis() {
        let z = cexp(&Complex::new(0.0, std::f64::consts::PI));
        assert!((z.re + 1.0).abs() < 1e-15 && z.im.abs() < 1e-15);
    }
}
