//! Truncated derivative vectors in `x`.
//!
//! A [`Jet`] stores a complex value together with its first few
//! x-derivatives. Products and quotients follow the Leibniz rule, so
//! potentials produced by the Darboux chain carry exact derivatives of the
//! analytic seed data.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::Zero;

use crate::real::{cabs, lit, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T: Real> {
    d: Vec<Complex<T>>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl<T: Real> Jet<T> {
    /// `derivs[k]` is the k-th x-derivative; at least the value is required.
    pub fn new(derivs: Vec<Complex<T>>) -> Self {
        assert!(!derivs.is_empty(), "a jet carries at least its value");
        Jet { d: derivs }
    }

    pub fn constant(c: Complex<T>, len: usize) -> Self {
        let mut d = vec![Complex::zero(); len.max(1)];
        d[0] = c;
        Jet { d }
    }

    pub fn zero(len: usize) -> Self {
        Jet { d: vec![Complex::zero(); len.max(1)] }
    }

    /// Number of stored entries (value plus derivatives).
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self) -> &Complex<T> {
        &self.d[0]
    }

    pub fn deriv(&self, k: usize) -> &Complex<T> {
        &self.d[k]
    }

    pub fn derivs(&self) -> &[Complex<T>] {
        &self.d
    }

    /// x-derivative; the result is one entry shorter.
    pub fn dx(&self) -> Self {
        assert!(self.d.len() >= 2, "jet too short to differentiate");
        Jet { d: self.d[1..].to_vec() }
    }

    pub fn truncate(&self, len: usize) -> Self {
        Jet { d: self.d[..len.min(self.d.len()).max(1)].to_vec() }
    }

    pub fn scale(&self, c: &Complex<T>) -> Self {
        Jet { d: self.d.iter().map(|v| v.clone() * c.clone()).collect() }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        let c = lit::<T>(c);
        Jet { d: self.d.iter().map(|v| v.clone() * c.clone()).collect() }
    }

    /// Magnitude of the value.
    pub fn abs_value(&self) -> f64 {
        cabs(&self.d[0]).to_f64()
    }

    fn add_ref(&self, o: &Self) -> Self {
        let n = self.len().min(o.len());
        Jet { d: (0..n).map(|k| self.d[k].clone() + o.d[k].clone()).collect() }
    }

    fn sub_ref(&self, o: &Self) -> Self {
        let n = self.len().min(o.len());
        Jet { d: (0..n).map(|k| self.d[k].clone() - o.d[k].clone()).collect() }
    }

    fn mul_ref(&self, o: &Self) -> Self {
        let n = self.len().min(o.len());
        let d = (0..n)
            .map(|k| {
                (0..=k).fold(Complex::zero(), |acc: Complex<T>, j| {
                    acc + self.d[j].clone() * o.d[k - j].clone() * lit::<T>(binomial(k, j))
                })
            })
            .collect();
        Jet { d }
    }

    fn div_ref(&self, o: &Self) -> Self {
        let n = self.len().min(o.len());
        let mut q: Vec<Complex<T>> = Vec::with_capacity(n);
        for k in 0..n {
            let mut num = self.d[k].clone();
            for j in 1..=k {
                num = num - o.d[j].clone() * q[k - j].clone() * lit::<T>(binomial(k, j));
            }
            q.push(num / o.d[0].clone());
        }
        Jet { d: q }
    }
}

macro_rules! jet_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl<'a, T: Real> $tr<&'a Jet<T>> for &'a Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: &'a Jet<T>) -> Jet<T> {
                self.$inner(rhs)
            }
        }
        impl<T: Real> $tr<Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: Jet<T>) -> Jet<T> {
                self.$inner(&rhs)
            }
        }
        impl<'a, T: Real> $tr<&'a Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: &'a Jet<T>) -> Jet<T> {
                self.$inner(rhs)
            }
        }
        impl<'a, T: Real> $tr<Jet<T>> for &'a Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: Jet<T>) -> Jet<T> {
                self.$inner(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, add_ref);
jet_binop!(Sub, sub, sub_ref);
jet_binop!(Mul, mul, mul_ref);
jet_binop!(Div, div, div_ref);

impl<T: Real> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        Jet { d: self.d.into_iter().map(|v| -v).collect() }
    }
}

impl<T: Real> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        Jet { d: self.d.iter().map(|v| -v.clone()).collect() }
    }
}
