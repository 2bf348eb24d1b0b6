//! Exact solutions generated from the zero seed: the two-component soliton
//! family, the three-component family built from the seed pair, its real
//! `r`-parametrized form, the complex spectral-parameter case, and the
//! singularity locator for the `r`-family.

use num_complex::Complex;
use num_traits::One;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::real::{cabs, cexp, clit, csqrt, lift, lit, Real};

/// Absolute threshold below which a denominator counts as a pole.
pub const DEFAULT_POLE_THRESHOLD: f64 = 1e-12;

/// Spectral parameter `a` and the four seed constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormParams {
    pub a: Complex<f64>,
    pub c1: Complex<f64>,
    pub c2: Complex<f64>,
    pub d1: Complex<f64>,
    pub d2: Complex<f64>,
    /// Set when the constants come from the ratio normalization.
    pub r: Option<f64>,
    pub pole_threshold: f64,
}

impl ClosedFormParams {
    pub fn new(
        a: Complex<f64>,
        c1: Complex<f64>,
        c2: Complex<f64>,
        d1: Complex<f64>,
        d2: Complex<f64>,
    ) -> Result<Self> {
        if a.norm() == 0.0 || !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::param("a", "must be finite and nonzero"));
        }
        for (name, v) in [("c1", c1), ("c2", c2), ("d1", d1), ("d2", d2)] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(ClosedFormParams { a, c1, c2, d1, d2, r: None, pole_threshold: DEFAULT_POLE_THRESHOLD })
    }

    /// Real spectral parameter and real constants.
    pub fn real(a: f64, c1: f64, c2: f64, d1: f64, d2: f64) -> Result<Self> {
        let c = |v: f64| Complex::new(v, 0.0);
        Self::new(c(a), c(c1), c(c2), c(d1), c(d2))
    }

    /// `c1 = c2 = 1/2`, `d1 = d2 = r/2`.
    pub fn with_ratio(a: f64, r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::param("r", "must be finite"));
        }
        let mut p = Self::real(a, 0.5, 0.5, 0.5 * r, 0.5 * r)?;
        p.r = Some(r);
        Ok(p)
    }

    /// `a` as the principal square root of `lambda`.
    pub fn from_lambda(
        lambda: Complex<f64>,
        c1: Complex<f64>,
        c2: Complex<f64>,
        d1: Complex<f64>,
        d2: Complex<f64>,
    ) -> Result<Self> {
        Self::new(csqrt(&lambda), c1, c2, d1, d2)
    }

    pub fn with_pole_threshold(mut self, threshold: f64) -> Self {
        self.pole_threshold = threshold;
        self
    }
}

/// Travelling phases of the closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVariables<T: Real> {
    /// `a^3 t - a x`
    pub eta1: Complex<T>,
    /// `a^3 t + a x`
    pub eta2: Complex<T>,
    /// `2 m x + 4 m^3 t`
    pub zeta1: T,
    /// `2 m x - 4 m^3 t`
    pub zeta2: T,
}

impl<T: Real> PhaseVariables<T> {
    pub fn new(a: &Complex<T>, m: T, x: T, t: T) -> Self {
        let a3t = a.clone() * a.clone() * a.clone() * t.clone();
        let ax = a.clone() * x.clone();
        let m3 = m.clone() * m.clone() * m.clone();
        PhaseVariables {
            eta1: a3t.clone() - ax.clone(),
            eta2: a3t + ax,
            zeta1: lit::<T>(2.0) * m.clone() * x.clone() + lit::<T>(4.0) * m3.clone() * t.clone(),
            zeta2: lit::<T>(2.0) * m * x - lit::<T>(4.0) * m3 * t,
        }
    }
}

/// Values of the three reduced fields at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTriple<T: Real> {
    pub f: Complex<T>,
    pub u: Complex<T>,
    pub v: Complex<T>,
}

impl<T: Real> SolutionTriple<T> {
    pub fn to_vec(&self) -> Vec<Complex<T>> {
        vec![self.f.clone(), self.u.clone(), self.v.clone()]
    }

    /// Largest imaginary part relative to the larger of 1 and the magnitude.
    pub fn max_relative_imag(&self) -> f64 {
        [&self.f, &self.u, &self.v]
            .iter()
            .map(|z| z.im.to_f64().abs() / cabs(z).to_f64().max(1.0))
            .fold(0.0, f64::max)
    }
}

/// `(f21, u11, u21)` of the two-component system.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoComponentFields<T: Real> {
    pub f21: Complex<T>,
    pub u11: Complex<T>,
    pub u21: Complex<T>,
}

fn pole_check<T: Real>(what: &'static str, den: &Complex<T>, x: &T, t: &T, threshold: f64) -> Result<()> {
    let magnitude = cabs(den).to_f64();
    if !(magnitude >= threshold) {
        return Err(Error::Pole { what, x: x.to_f64(), t: t.to_f64(), magnitude, threshold });
    }
    Ok(())
}

fn i_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// Seed solutions of the spectral problem with zero potentials:
/// `phi1 = c1 e^{ax+a^3 t} + c2 e^{-(ax+a^3 t)}`,
/// `phi2 = d1 e^{i(ax-a^3 t)} + d2 e^{-i(ax-a^3 t)}`.
pub fn seed_pair<T: Real>(p: &ClosedFormParams, x: T, t: T) -> (Complex<T>, Complex<T>) {
    let (j1, j2) = seed_jets(p, x, t, 1);
    (j1.value().clone(), j2.value().clone())
}

/// Seed pair with `len - 1` analytic x-derivatives.
pub fn seed_jets<T: Real>(p: &ClosedFormParams, x: T, t: T, len: usize) -> (Jet<T>, Jet<T>) {
    let a: Complex<T> = lift(p.a);
    let a3 = a.clone() * a.clone() * a.clone();
    let s = a.clone() * x.clone() + a3.clone() * t.clone();
    let th = i_unit::<T>() * (a.clone() * x - a3 * t);
    let (es, ems) = (cexp(&s), cexp(&-s));
    let (eth, emth) = (cexp(&th), cexp(&-th));
    let (c1, c2, d1, d2) = (lift::<T>(p.c1), lift::<T>(p.c2), lift::<T>(p.d1), lift::<T>(p.d2));
    let p1 = c1 * es;
    let m1 = c2 * ems;
    let p2 = d1 * eth;
    let m2 = d2 * emth;
    let ia = i_unit::<T>() * a.clone();
    let mut j1 = Vec::with_capacity(len);
    let mut j2 = Vec::with_capacity(len);
    let mut ak = Complex::<T>::one();
    let mut iak = Complex::<T>::one();
    for k in 0..len.max(1) {
        if k % 2 == 0 {
            j1.push(ak.clone() * (p1.clone() + m1.clone()));
            j2.push(iak.clone() * (p2.clone() + m2.clone()));
        } else {
            j1.push(ak.clone() * (p1.clone() - m1.clone()));
            j2.push(iak.clone() * (p2.clone() - m2.clone()));
        }
        ak = ak * a.clone();
        iak = iak * ia.clone();
    }
    (Jet::new(j1), Jet::new(j2))
}

/// Two-component soliton family, evaluated from its closed expressions with
/// `s = a(a^2 t + x)` and denominator `c2 + c1 e^{2s}`.
pub fn two_component_fields<T: Real>(p: &ClosedFormParams, x: T, t: T) -> Result<TwoComponentFields<T>> {
    let a: Complex<T> = lift(p.a);
    let (c1, c2, d1, d2) = (lift::<T>(p.c1), lift::<T>(p.c2), lift::<T>(p.d1), lift::<T>(p.d2));
    let i = i_unit::<T>();
    let two = lit::<T>(2.0);
    let s = a.clone() * (a.clone() * a.clone() * t.clone() + x.clone());
    let e2s = cexp(&(s.clone() * two.clone()));
    let den = c2.clone() + c1.clone() * e2s.clone();
    pole_check("c2 + c1 exp(2a(a^2 t + x))", &den, &x, &t, p.pole_threshold)?;
    let growth = cexp(&((clit::<T>(1.0, -1.0)) * s));
    let e_t = cexp(&(i.clone() * a.clone() * a.clone() * a.clone() * t * two.clone()));
    let e_x = cexp(&(i.clone() * a.clone() * x * two.clone()));
    let f21 = growth.clone() * (d2.clone() * e_t.clone() + d1.clone() * e_x.clone()) * two.clone() / den.clone();
    let u11 = a.clone() * a.clone() * c1 * c2 * e2s * lit::<T>(8.0) / (den.clone() * den.clone());
    let u21 = -(i * a) * two * growth * (d2 * e_t - d1 * e_x) / den;
    Ok(TwoComponentFields { f21, u11, u21 })
}

/// Three-component fields from the seed pair:
/// `D = phi1^2 - phi2^2`, `W = phi1 phi2_x - phi2 phi1_x`,
/// `f = 2W/D`, `u = (D_x/D)_x + 2(W/D)^2`, `v = 2(W/D)_x + W D_x/D^2`.
pub fn three_component_fields<T: Real>(p: &ClosedFormParams, x: T, t: T) -> Result<SolutionTriple<T>> {
    let (phi1, phi2) = seed_jets(p, x.clone(), t.clone(), 3);
    let d = &(&phi1 * &phi1) - &(&phi2 * &phi2);
    pole_check("phi1^2 - phi2^2", d.value(), &x, &t, p.pole_threshold)?;
    let w = &(&phi1 * &phi2.dx()) - &(&phi2 * &phi1.dx());
    let two = lit::<T>(2.0);
    let wd = &w / &d;
    let dx = d.dx();
    let log_dx = (&dx / &d).dx();
    let f = wd.value().clone() * two.clone();
    let u = log_dx.value().clone() + wd.value().clone() * wd.value().clone() * two.clone();
    let v = wd.deriv(1).clone() * two
        + w.value().clone() * dx.value().clone() / (d.value().clone() * d.value().clone());
    Ok(SolutionTriple { f, u, v })
}

/// Denominator `cosh^2(eta2) - r^2 cos^2(eta1)` of the `r`-family.
pub fn r_family_denominator<T: Real>(a: T, r: T, x: T, t: T) -> T {
    let eta1 = a.clone() * a.clone() * a.clone() * t.clone() - a.clone() * x.clone();
    let eta2 = a.clone() * a.clone() * a.clone() * t + a * x;
    let ch = eta2.cosh();
    let c = eta1.cos();
    ch.clone() * ch - r.clone() * r * c.clone() * c
}

/// Real `r`-family with the default pole threshold.
pub fn r_family_fields<T: Real>(a: T, r: T, x: T, t: T) -> Result<SolutionTriple<T>> {
    r_family_fields_with_threshold(a, r, x, t, DEFAULT_POLE_THRESHOLD)
}

/// Real `r`-family evaluated from its closed trigonometric-hyperbolic form.
pub fn r_family_fields_with_threshold<T: Real>(
    a: T,
    r: T,
    x: T,
    t: T,
    threshold: f64,
) -> Result<SolutionTriple<T>> {
    let one = T::one();
    let two = lit::<T>(2.0);
    let a2 = a.clone() * a.clone();
    let eta1 = a2.clone() * a.clone() * t.clone() - a.clone() * x.clone();
    let eta2 = a2.clone() * a.clone() * t.clone() + a.clone() * x.clone();
    let (s1, c1) = (eta1.sin(), eta1.cos());
    let (sh2, ch2) = (eta2.sinh(), eta2.cosh());
    let r2 = r.clone() * r.clone();
    let r4 = r2.clone() * r2.clone();
    let cos2e1 = (two.clone() * eta1.clone()).cos();
    let sin2e1 = (two.clone() * eta1).sin();
    let cosh2e2 = (two.clone() * eta2.clone()).cosh();
    let sinh2e2 = (two.clone() * eta2.clone()).sinh();
    let cosh3e2 = (lit::<T>(3.0) * eta2).cosh();

    let den = ch2.clone() * ch2.clone() - r2.clone() * c1.clone() * c1.clone();
    let den_c = Complex::new(den.clone(), T::zero());
    pole_check("cosh^2(eta2) - r^2 cos^2(eta1)", &den_c, &x, &t, threshold)?;

    let f = two.clone() * a.clone() * r.clone() * (ch2.clone() * s1.clone() - c1.clone() * sh2.clone()) / den.clone();
    let u = a2.clone()
        * (one.clone() - r4.clone() - r4 * cos2e1.clone() + cosh2e2.clone() + r2.clone() * sin2e1 * sinh2e2)
        / (den.clone() * den);
    let v_num = (lit::<T>(-7.0) + lit::<T>(6.0) * r2.clone() + two.clone() * r2.clone() * cos2e1.clone())
        * c1.clone()
        * ch2
        - c1 * cosh3e2
        - two.clone() * (one.clone() + r2.clone() + r2.clone() * cos2e1.clone() + cosh2e2.clone()) * s1 * sh2;
    let v_den = -one + r2.clone() + r2 * cos2e1 - cosh2e2;
    let v = two * a2 * r * v_num / (v_den.clone() * v_den);
    let re = |v: T| Complex::new(v, T::zero());
    Ok(SolutionTriple { f: re(f), u: re(u), v: re(v) })
}

/// Constants of the complex spectral-parameter case.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedConstants {
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
}

impl SeedConstants {
    pub fn uniform(c: f64, d: f64) -> Self {
        SeedConstants { c1: c, c2: c, d1: d, d2: d }
    }
}

/// Parameters for `lambda = -2 i m^2` with `a` the principal root.
pub fn complex_case_params(m: f64, k: &SeedConstants) -> Result<ClosedFormParams> {
    if m == 0.0 || !m.is_finite() {
        return Err(Error::param("m", "must be finite and nonzero"));
    }
    let c = |v: f64| Complex::new(v, 0.0);
    ClosedFormParams::from_lambda(Complex::new(0.0, -2.0 * m * m), c(k.c1), c(k.c2), c(k.d1), c(k.d2))
}

/// `f` of the three-component family at `lambda = -2 i m^2`.
pub fn complex_case_field<T: Real>(m: f64, k: &SeedConstants, x: T, t: T) -> Result<Complex<T>> {
    let p = complex_case_params(m, k)?;
    Ok(three_component_fields(&p, x, t)?.f)
}

/// Rectangle in the `(x, t)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, t_min: f64, t_max: f64) -> Result<Self> {
        if ![x_min, x_max, t_min, t_max].iter().all(|v| v.is_finite()) || x_max < x_min || t_max < t_min {
            return Err(Error::param("window", "bounds must be finite and ordered"));
        }
        Ok(Window { x_min, x_max, t_min, t_max })
    }

    fn contains(&self, x: f64, t: f64) -> bool {
        let tol = 1e-12;
        x >= self.x_min - tol && x <= self.x_max + tol && t >= self.t_min - tol && t <= self.t_max + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint {
    pub x: f64,
    pub t: f64,
    /// Denominator value at the reported point.
    pub denominator: f64,
}

/// Sampling density of the `|r| > 1` root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanResolution {
    pub x_samples: usize,
    pub t_samples: usize,
}

impl Default for ScanResolution {
    fn default() -> Self {
        ScanResolution { x_samples: 4000, t_samples: 41 }
    }
}

/// Zeros of the `r`-family denominator inside `window`.
pub fn singular_points(a: f64, r: f64, window: &Window) -> Vec<SingularPoint> {
    singular_points_with(a, r, window, ScanResolution::default())
}

/// As [`singular_points`] with an explicit scan density.
///
/// For `r^2 = 1` the zeros are the isolated points where `eta2 = 0` and
/// `eta1` is a multiple of `pi`, i.e. `(x, t) = (-n pi/2a, n pi/2a^3)`. For
/// `r^2 > 1` each sampled time level is scanned for sign changes in `x`,
/// refined by bisection. For `r^2 < 1` the denominator is bounded below by
/// `1 - r^2`.
pub fn singular_points_with(a: f64, r: f64, window: &Window, res: ScanResolution) -> Vec<SingularPoint> {
    let r2 = r * r;
    let den = |x: f64, t: f64| r_family_denominator(a, r, x, t);
    if r2 < 1.0 || a == 0.0 {
        return Vec::new();
    }
    if r2 == 1.0 {
        let step_t = std::f64::consts::PI / (2.0 * a.powi(3));
        let lo = (window.t_min / step_t).ceil() as i64 - 1;
        let hi = (window.t_max / step_t).floor() as i64 + 1;
        let mut out: Vec<SingularPoint> = (lo.min(hi)..=hi.max(lo))
            .map(|n| {
                let t = n as f64 * step_t;
                let x = -(n as f64) * std::f64::consts::PI / (2.0 * a);
                SingularPoint { x, t, denominator: den(x, t) }
            })
            .filter(|p| window.contains(p.x, p.t))
            .collect();
        out.sort_by(|p, q| p.t.total_cmp(&q.t));
        return out;
    }
    let nt = if window.t_max > window.t_min { res.t_samples.max(2) } else { 1 };
    let nx = res.x_samples.max(2);
    let mut out = Vec::new();
    for jt in 0..nt {
        let t = if nt == 1 {
            window.t_min
        } else {
            window.t_min + (window.t_max - window.t_min) * jt as f64 / (nt - 1) as f64
        };
        let dx = (window.x_max - window.x_min) / (nx - 1) as f64;
        let mut x0 = window.x_min;
        let mut f0 = den(x0, t);
        for ix in 1..nx {
            let x1 = window.x_min + ix as f64 * dx;
            let f1 = den(x1, t);
            if f0 == 0.0 {
                out.push(SingularPoint { x: x0, t, denominator: 0.0 });
            } else if f0.signum() != f1.signum() && f1 != 0.0 {
                let x = bisect(|x| den(x, t), x0, x1, f0);
                out.push(SingularPoint { x, t, denominator: den(x, t) });
            }
            x0 = x1;
            f0 = f1;
        }
        if f0 == 0.0 {
            out.push(SingularPoint { x: x0, t, denominator: 0.0 });
        }
    }
    out
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn three_component_reduces_to_r_family(a in 0.5..2.0f64, r in 0.05..0.95f64, x in -3.0..3.0f64, t in -3.0..3.0f64) {
            let p = ClosedFormParams::with_ratio(a, r).unwrap();
            let three = three_component_fields(&p, x, t).unwrap().to_vec();
            let closed = r_family_fields(a, r, x, t).unwrap().to_vec();
            let scale = 1.0 + a * a;
            for (p, q) in three.iter().zip(&closed) {
                prop_assert!((p - q).norm() <= 1e-10 * scale, "{p} vs {q}");
            }
        }

        #[test]
        fn real_parameters_give_real_fields(a in 0.3..2.5f64, r in -0.95..0.95f64, x in -3.0..3.0f64, t in -3.0..3.0f64) {
            let s = r_family_fields(a, r, x, t).unwrap();
            prop_assert!(s.max_relative_imag() <= 1e-12);
            let p = ClosedFormParams::with_ratio(a, r).unwrap();
            prop_assert!(three_component_fields(&p, x, t).unwrap().max_relative_imag() <= 1e-12);
        }

        #[test]
        fn denominator_bounded_below_inside_unit_ratio(a in 0.1..3.0f64, r in -0.99..0.99f64, x in -50.0..50.0f64, t in -5.0..5.0f64) {
            prop_assert!(r_family_denominator(a, r, x, t) >= (1.0 - r * r) * (1.0 - 1e-12));
        }
    }
}
