//! Central finite-difference stencils on sampled functions.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::Result;
use crate::real::{lit, Real};

/// Formal accuracy of a central stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StencilOrder {
    #[default]
    Second,
    Fourth,
}

impl StencilOrder {
    /// Integer weights for offsets `-w..=w` of the `deriv`-th derivative and
    /// their common denominator, unscaled by the step. Integers keep the
    /// stencil exact in extended precision.
    pub fn weights(self, deriv: usize) -> (&'static [i32], i32) {
        match (self, deriv) {
            (_, 0) => (&[1], 1),
            (StencilOrder::Second, 1) => (&[-1, 0, 1], 2),
            (StencilOrder::Second, 2) => (&[1, -2, 1], 1),
            (StencilOrder::Second, 3) => (&[-1, 2, 0, -2, 1], 2),
            (StencilOrder::Fourth, 1) => (&[1, -8, 0, 8, -1], 12),
            (StencilOrder::Fourth, 2) => (&[-1, 16, -30, 16, -1], 12),
            (StencilOrder::Fourth, 3) => (&[1, -8, 13, 0, -13, 8, -1], 8),
            _ => panic!("central stencils are provided up to the third derivative"),
        }
    }

    pub fn half_width(self, deriv: usize) -> usize {
        self.weights(deriv).0.len() / 2
    }
}

/// Values of a vector-valued function at symmetric offsets around a point.
pub struct Samples<T: Real> {
    half_width: usize,
    values: Vec<Vec<Complex<T>>>,
}

impl<T: Real> Samples<T> {
    /// Evaluate `f(center + j*step)` for `j = -half_width..=half_width`.
    pub fn collect(
        center: &T,
        step: &T,
        half_width: usize,
        mut f: impl FnMut(T) -> Result<Vec<Complex<T>>>,
    ) -> Result<Self> {
        let w = half_width as i64;
        let values = (-w..=w)
            .map(|j| f(center.clone() + step.clone() * lit::<T>(j as f64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Samples { half_width, values })
    }

    pub fn center(&self) -> &[Complex<T>] {
        &self.values[self.half_width]
    }

    /// `deriv`-th derivative of every component.
    pub fn derivative(&self, order: StencilOrder, deriv: usize, step: &T) -> Vec<Complex<T>> {
        let (wts, denom) = order.weights(deriv);
        let hw = wts.len() / 2;
        assert!(hw <= self.half_width, "stencil wider than the sampled range");
        let n = self.values[0].len();
        let mut scale = lit::<T>(denom as f64);
        for _ in 0..deriv {
            scale = scale * step.clone();
        }
        (0..n)
            .map(|c| {
                let mut acc = Complex::<T>::zero();
                for (i, w) in wts.iter().enumerate() {
                    if *w != 0 {
                        let v = &self.values[self.half_width - hw + i][c];
                        acc = acc + v.clone() * lit::<T>(*w as f64);
                    }
                }
                acc / scale.clone()
            })
            .collect()
    }
}
