use num_complex::Complex;
use num_traits::Zero;

use super::matrix::Mat2;
use super::potentials::{MatrixPotentials, PotentialMatrices};
use super::transform::compound_dt_zero_seed;
use crate::closed_forms::{r_family_fields, two_component_fields, ClosedFormParams};
use crate::error::{Error, Result};
use crate::fd::{Samples, StencilOrder};
use crate::jet::Jet;
use crate::real::{cabs, lit, Real};

/// Sign of the `F^2` term in `B`.
///
/// `Consistent` uses `B = 3/2 diag U + 3/2 F_x - 3/4 F^2`, for which the
/// compatibility equations reproduce the integrable systems. `PlusFSquared`
/// keeps `+3/4 F^2`; it agrees with `Consistent` only when `F^2 = 0`, as for
/// the two-component family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LaxConvention {
    #[default]
    Consistent,
    PlusFSquared,
}

impl LaxConvention {
    fn f_squared_coefficient(self) -> f64 {
        match self {
            LaxConvention::Consistent => -0.75,
            LaxConvention::PlusFSquared => 0.75,
        }
    }
}

/// Coefficient matrices of the time part `Psi_t = Psi_xxx + B Psi_x + C Psi`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxTimeMatrices<T: Real> {
    pub b: Mat2<Complex<T>>,
    pub c: Mat2<Complex<T>>,
}

type JetMat<T> = Mat2<Jet<T>>;

fn scale<T: Real>(m: &JetMat<T>, c: f64) -> JetMat<T> {
    m.map(|j| j.scale_real(c))
}

fn dx<T: Real>(m: &JetMat<T>) -> JetMat<T> {
    m.map(|j| j.dx())
}

fn values<T: Real>(m: &JetMat<T>) -> Mat2<Complex<T>> {
    m.map(|j| j.value().clone())
}

/// `B` and `C` as jets from jets of `F` and `U` (they lose one derivative).
pub fn lax_time_jets<T: Real>(f: &JetMat<T>, u: &JetMat<T>, conv: LaxConvention) -> (JetMat<T>, JetMat<T>) {
    let len = f.entries().iter().chain(u.entries().iter()).map(|j| j.len()).min().unwrap_or(1);
    let zero = Jet::zero(len);
    let diag_u = Mat2::new(u.m[0][0].clone(), zero.clone(), zero.clone(), u.m[1][1].clone());
    let (fx, ux) = (dx(f), dx(u));
    let b = &(&scale(&diag_u, 1.5) + &scale(&fx, 1.5)) + &scale(&(f * f), conv.f_squared_coefficient());

    let (f12, f21) = (&f.m[0][1], &f.m[1][0]);
    let (u11, u12, u21, u22) = (&u.m[0][0], &u.m[0][1], &u.m[1][0], &u.m[1][1]);
    let trace_term = (&(f12 * u21) + &(f21 * u12)).scale_real(-0.75);
    let sigma_term = (&(&f12.dx() * f21) - &(f12 * &f21.dx())).scale_real(0.375);
    let z = Jet::zero(len - 1);
    let identity = Mat2::new(trace_term.clone(), z.clone(), z.clone(), trace_term);
    let sigma3 = Mat2::new(sigma_term.clone(), z.clone(), z.clone(), -sigma_term);
    let du = (u11 - u22).scale_real(0.75);
    let sigma3_f = f.sigma3_left().map(|e| &du * e);
    let diag_ux = Mat2::new(ux.m[0][0].clone(), z.clone(), z.clone(), ux.m[1][1].clone());
    let c = &(&(&(&scale(&ux, 1.5) - &scale(&diag_ux, 0.75)) + &identity) + &sigma3) + &sigma3_f;
    (b, c)
}

/// `B` and `C` at a point from the potentials and their first x-derivative.
pub fn lax_time_matrices<T: Real>(
    pots: &PotentialMatrices<T>,
    pots_x: &PotentialMatrices<T>,
    conv: LaxConvention,
) -> LaxTimeMatrices<T> {
    let jet = |a: &Complex<T>, b: &Complex<T>| Jet::new(vec![a.clone(), b.clone()]);
    let pair = |m: &Mat2<Complex<T>>, mx: &Mat2<Complex<T>>| {
        Mat2::new(
            jet(&m.m[0][0], &mx.m[0][0]),
            jet(&m.m[0][1], &mx.m[0][1]),
            jet(&m.m[1][0], &mx.m[1][0]),
            jet(&m.m[1][1], &mx.m[1][1]),
        )
    };
    let (b, c) = lax_time_jets(&pair(&pots.f, &pots_x.f), &pair(&pots.u, &pots_x.u), conv);
    LaxTimeMatrices { b: values(&b), c: values(&c) }
}

/// Residual matrices of both compatibility equations, given jets of `F` and
/// `U` up to the third x-derivative and their time derivatives.
pub fn compatibility_matrices<T: Real>(
    f: &JetMat<T>,
    u: &JetMat<T>,
    f_t: &Mat2<Complex<T>>,
    u_t: &Mat2<Complex<T>>,
    conv: LaxConvention,
) -> (Mat2<Complex<T>>, Mat2<Complex<T>>) {
    let (b, c) = lax_time_jets(f, u, conv);
    let (fx, ux) = (dx(f), dx(u));
    let (bx, cx) = (dx(&b), dx(&c));
    let (bs, cs) = (b.sigma3_conj(), c.sigma3_conj());
    let v = values;

    let e1 = [
        v(&dx(&dx(&b))),
        v(&scale(&dx(&dx(u)), -3.0)),
        v(&scale(&cx, 2.0)),
        v(&(f * &bx)),
        v(&(&bs * &fx).map(|j| -j)),
        v(&(u * &b)),
        v(&(&bs * u).map(|j| -j)),
        v(&(f * &c)),
        v(&(&cs * f).map(|j| -j)),
    ]
    .iter()
    .fold(f_t - &v(&dx(&dx(&fx))), |acc, m| &acc + m);

    let e2 = [
        v(&dx(&cx)),
        v(&(u * &c)),
        v(&(&cs * u).map(|j| -j)),
        v(&(f * &cx)),
        v(&(&bs * &ux).map(|j| -j)),
    ]
    .iter()
    .fold(u_t - &v(&dx(&dx(&ux))), |acc, m| &acc + m);
    (e1, e2)
}

/// Time-dependent potentials that can be sampled at any precision.
pub trait PotentialSampler: Sync {
    fn sample<T: Real>(&self, x: T, t: T) -> Result<PotentialMatrices<T>>;
}

/// Identically zero potentials.
pub struct ZeroPotentials;

impl PotentialSampler for ZeroPotentials {
    fn sample<T: Real>(&self, _x: T, _t: T) -> Result<PotentialMatrices<T>> {
        Ok(PotentialMatrices::zero())
    }
}

/// Output of the compound transformation of the zero seed.
pub struct CompoundDtPotentials(pub ClosedFormParams);

impl PotentialSampler for CompoundDtPotentials {
    fn sample<T: Real>(&self, x: T, t: T) -> Result<PotentialMatrices<T>> {
        Ok(compound_dt_zero_seed(&self.0, x, t)?.values())
    }
}

/// Reduced potentials from the closed `r`-family.
pub struct RFamilyPotentials {
    pub a: f64,
    pub r: f64,
}

impl PotentialSampler for RFamilyPotentials {
    fn sample<T: Real>(&self, x: T, t: T) -> Result<PotentialMatrices<T>> {
        let s = r_family_fields(lit::<T>(self.a), lit::<T>(self.r), x, t)?;
        let j = |c: Complex<T>| Jet::new(vec![c]);
        Ok(MatrixPotentials::reduced(j(s.f), j(s.u), j(s.v)).values())
    }
}

/// Two-component family placed in `F = [[0, 0], [f21, 0]]`, `U = [[u11, 0], [u21, 0]]`.
pub struct TwoComponentPotentials(pub ClosedFormParams);

impl PotentialSampler for TwoComponentPotentials {
    fn sample<T: Real>(&self, x: T, t: T) -> Result<PotentialMatrices<T>> {
        let s = two_component_fields(&self.0, x, t)?;
        let z = Complex::zero();
        Ok(PotentialMatrices::from_slice(&[z.clone(), s.f21, s.u11, z.clone(), s.u21, z]))
    }
}

/// Another sampler with `u11` multiplied by a constant factor.
pub struct ScaledU11<S> {
    pub inner: S,
    pub factor: f64,
}

impl<S: PotentialSampler> PotentialSampler for ScaledU11<S> {
    fn sample<T: Real>(&self, x: T, t: T) -> Result<PotentialMatrices<T>> {
        let mut p = self.inner.sample(x, t)?;
        p.u.m[0][0] = p.u.m[0][0].clone() * lit::<T>(self.factor);
        Ok(p)
    }
}

/// Settings of [`compatibility_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatOptions {
    pub fd_step: f64,
    pub order: StencilOrder,
    pub convention: LaxConvention,
}

impl Default for CompatOptions {
    fn default() -> Self {
        CompatOptions { fd_step: 1e-3, order: StencilOrder::Second, convention: LaxConvention::Consistent }
    }
}

/// Largest entry magnitude of both compatibility residual matrices, with
/// derivatives of the sampled potentials from central differences.
pub fn compatibility_residual<T: Real, S: PotentialSampler>(
    sampler: &S,
    x: f64,
    t: f64,
    opts: CompatOptions,
) -> Result<f64> {
    if !(opts.fd_step > 0.0 && opts.fd_step.is_finite()) {
        return Err(Error::param("fd_step", "must be positive"));
    }
    let h = lit::<T>(opts.fd_step);
    let (xc, tc) = (lit::<T>(x), lit::<T>(t));
    let hw = opts.order.half_width(3);
    let space = Samples::collect(&xc, &h, hw, |xs| Ok(sampler.sample(xs, tc.clone())?.to_vec()))?;
    let time = Samples::collect(&tc, &h, opts.order.half_width(1), |ts| {
        Ok(sampler.sample(xc.clone(), ts)?.to_vec())
    })?;
    let derivs: Vec<Vec<Complex<T>>> = (0..=3)
        .map(|k| if k == 0 { space.center().to_vec() } else { space.derivative(opts.order, k, &h) })
        .collect();
    let jet = |i: usize| Jet::new(derivs.iter().map(|d| d[i].clone()).collect());
    let z = Jet::zero(4);
    let f = Mat2::new(z.clone(), jet(0), jet(1), z);
    let u = Mat2::new(jet(2), jet(3), jet(4), jet(5));
    let dt = PotentialMatrices::from_slice(&time.derivative(opts.order, 1, &h));
    let (e1, e2) = compatibility_matrices(&f, &u, &dt.f, &dt.u, opts.convention);
    Ok(e1.entries().iter().chain(e2.entries().iter()).map(|z| cabs(z).to_f64()).fold(0.0, f64::max))
}
