//! Named solution families and their sampling onto grids.

use num_complex::Complex;

use crate::closed_forms::{
    complex_case_params, r_family_denominator, r_family_fields_with_threshold, seed_pair,
    three_component_fields, two_component_fields, ClosedFormParams, SeedConstants,
    DEFAULT_POLE_THRESHOLD,
};
use crate::darboux::compound_dt_zero_seed;
use crate::domain::{preset_system, CoefficientSet, FieldState, Grid};
use crate::error::{Error, Result};
use crate::real::{cabs, lit, Real};

/// Imaginary parts up to this fraction of `max(1, |z|)` count as round-off.
pub const REALITY_TOLERANCE: f64 = 1e-10;

/// Exact solution selector.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `u11` of the two-component family alone: a KdV soliton.
    KdvSoliton(ClosedFormParams),
    /// `(f21, u11, u21)` of the two-component family.
    TwoComponent(ClosedFormParams),
    /// `(f, u, v)` from the seed pair.
    ThreeComponent(ClosedFormParams),
    /// `(f, u, v)` from the closed `r`-parametrized form.
    RFamily { a: f64, r: f64, pole_threshold: f64 },
    /// `f` at `lambda = -2 i m^2`.
    ComplexCase { m: f64, constants: SeedConstants, pole_threshold: f64 },
    /// `(f, u, v)` from the compound Darboux transformation.
    CompoundDt(ClosedFormParams),
}

/// Equations a family is meant to satisfy.
#[derive(Debug, Clone, PartialEq)]
pub enum GoverningSystem {
    /// Instance of the general template.
    Template(CoefficientSet),
    /// The two-component system for `(f21, u11, u21)`, which has
    /// non-derivative products outside the template.
    TwoComponent,
}

impl Family {
    pub fn r_family(a: f64, r: f64) -> Result<Self> {
        if !(a.is_finite() && r.is_finite()) || a == 0.0 {
            return Err(Error::param("a", "must be finite and nonzero (r finite)"));
        }
        Ok(Family::RFamily { a, r, pole_threshold: DEFAULT_POLE_THRESHOLD })
    }

    pub fn complex_case(m: f64, constants: SeedConstants) -> Result<Self> {
        complex_case_params(m, &constants)?;
        Ok(Family::ComplexCase { m, constants, pole_threshold: DEFAULT_POLE_THRESHOLD })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::KdvSoliton(_) => "kdv-soliton",
            Family::TwoComponent(_) => "two-component",
            Family::ThreeComponent(_) => "three-component",
            Family::RFamily { .. } => "r-family",
            Family::ComplexCase { .. } => "complex-case",
            Family::CompoundDt(_) => "compound-dt",
        }
    }

    pub fn component_labels(&self) -> &'static [&'static str] {
        match self {
            Family::KdvSoliton(_) => &["u"],
            Family::TwoComponent(_) => &["f21", "u11", "u21"],
            Family::ComplexCase { .. } => &["f"],
            _ => &["f", "u", "v"],
        }
    }

    pub fn n_components(&self) -> usize {
        self.component_labels().len()
    }

    pub fn pole_threshold(&self) -> f64 {
        match self {
            Family::KdvSoliton(p) | Family::TwoComponent(p) | Family::ThreeComponent(p) | Family::CompoundDt(p) => {
                p.pole_threshold
            }
            Family::RFamily { pole_threshold, .. } | Family::ComplexCase { pole_threshold, .. } => *pole_threshold,
        }
    }

    pub fn governing_system(&self) -> GoverningSystem {
        let preset = |name| GoverningSystem::Template(preset_system(name).expect("built-in preset").coefficients);
        match self {
            Family::KdvSoliton(_) => preset("kdv-scalar"),
            Family::TwoComponent(_) => GoverningSystem::TwoComponent,
            _ => preset("kdv-mkdv-3"),
        }
    }

    fn complex_params(&self) -> Result<ClosedFormParams> {
        match self {
            Family::ComplexCase { m, constants, pole_threshold } => {
                Ok(complex_case_params(*m, constants)?.with_pole_threshold(*pole_threshold))
            }
            _ => unreachable!("only the complex case derives its parameters"),
        }
    }

    /// Component values at `(x, t)`.
    pub fn eval<T: Real>(&self, x: T, t: T) -> Result<Vec<Complex<T>>> {
        match self {
            Family::KdvSoliton(p) => Ok(vec![two_component_fields(p, x, t)?.u11]),
            Family::TwoComponent(p) => {
                let s = two_component_fields(p, x, t)?;
                Ok(vec![s.f21, s.u11, s.u21])
            }
            Family::ThreeComponent(p) => Ok(three_component_fields(p, x, t)?.to_vec()),
            Family::RFamily { a, r, pole_threshold } => {
                Ok(r_family_fields_with_threshold(lit::<T>(*a), lit::<T>(*r), x, t, *pole_threshold)?.to_vec())
            }
            Family::ComplexCase { .. } => Ok(vec![three_component_fields(&self.complex_params()?, x, t)?.f]),
            Family::CompoundDt(p) => {
                let v = compound_dt_zero_seed(p, x, t)?.values();
                Ok(vec![v.f.m[0][1].clone(), v.u.m[0][0].clone(), v.u.m[0][1].clone()])
            }
        }
    }

    /// The denominator whose zeros are the family's poles.
    pub fn denominator(&self, x: f64, t: f64) -> Result<Complex<f64>> {
        let seed_den = |p: &ClosedFormParams| {
            let (p1, p2) = seed_pair(p, x, t);
            p1 * p1 - p2 * p2
        };
        Ok(match self {
            Family::KdvSoliton(p) | Family::TwoComponent(p) => {
                let a = p.a;
                p.c2 + p.c1 * (a * (a * a * t + x) * 2.0).exp()
            }
            Family::ThreeComponent(p) | Family::CompoundDt(p) => seed_den(p),
            Family::RFamily { a, r, .. } => Complex::new(r_family_denominator(*a, *r, x, t), 0.0),
            Family::ComplexCase { .. } => seed_den(&self.complex_params()?),
        })
    }
}

/// Sample every component of `family` on the grid nodes at time `t`.
///
/// Fails on a pole at a node, on a real denominator changing sign between
/// neighbouring nodes, and on components that are not real.
pub fn sample_on_grid(family: &Family, grid: &Grid, t: f64) -> Result<FieldState> {
    let n = family.n_components();
    let mut values = vec![Vec::with_capacity(grid.point_count()); n];
    let mut prev_den: Option<(f64, Complex<f64>)> = None;
    for k in 0..grid.point_count() {
        let x = grid.x(k);
        let z = family.eval::<f64>(x, t)?;
        for (c, v) in z.iter().enumerate() {
            if v.im.abs() > REALITY_TOLERANCE * cabs(v).max(1.0) {
                return Err(Error::NotReal { component: c + 1, x, imag: v.im });
            }
            values[c].push(v.re);
        }
        let den = family.denominator(x, t)?;
        if let Some((x_left, d_left)) = prev_den {
            let real_valued = |d: Complex<f64>| d.im.abs() <= REALITY_TOLERANCE * d.norm().max(1.0);
            if real_valued(d_left) && real_valued(den) && d_left.re.signum() != den.re.signum() {
                return Err(Error::PoleBetweenNodes { what: family.name(), x_left, x_right: x, t });
            }
        }
        prev_den = Some((x, den));
    }
    FieldState::on_grid(grid, t, values)
}

/// Lift a real `f64` point into `T` and evaluate.
pub fn eval_at<T: Real>(family: &Family, x: f64, t: f64) -> Result<Vec<Complex<T>>> {
    family.eval(lit::<T>(x), lit::<T>(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_grid;

    #[test]
    fn r_family_sample_peak_and_zero() {
        let g = build_grid(-20.0, 20.0, 0.25).unwrap();
        let s = sample_on_grid(&Family::r_family(1.0, 0.5).unwrap(), &g, 0.0).unwrap();
        assert_eq!(s.n_components(), 3);
        let umax = s.component(1).iter().cloned().fold(f64::MIN, f64::max);
        assert!((umax - 10.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.component(0)[80], 0.0);
        assert_eq!(g.x(80), 0.0);
    }

    #[test]
    fn r_family_ratio_two_pole_between_nodes() {
        let g = build_grid(0.0, 2.0, 0.25).unwrap();
        let e = sample_on_grid(&Family::r_family(1.0, 2.0).unwrap(), &g, 0.0).unwrap_err();
        match e {
            Error::PoleBetweenNodes { x_left, x_right, .. } => assert!(x_left < 0.8238 && 0.8238 < x_right),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complex_family_rejected_when_not_real() {
        let g = build_grid(0.1, 1.1, 0.25).unwrap();
        let fam = Family::complex_case(1.0, SeedConstants::uniform(1.0, 2.0)).unwrap();
        assert!(matches!(sample_on_grid(&fam, &g, 0.1), Err(Error::NotReal { .. })));
        let real = Family::complex_case(1.0, SeedConstants::uniform(0.5, 0.5)).unwrap();
        assert!(sample_on_grid(&real, &g, 0.1).is_ok());
    }

    #[test]
    fn compound_family_matches_r_family_on_grid() {
        let g = build_grid(-5.0, 5.0, 0.5).unwrap();
        let a = sample_on_grid(&Family::CompoundDt(ClosedFormParams::with_ratio(1.0, 0.5).unwrap()), &g, 0.2).unwrap();
        let b = sample_on_grid(&Family::r_family(1.0, 0.5).unwrap(), &g, 0.2).unwrap();
        for (x, y) in a.values().iter().flatten().zip(b.values().iter().flatten()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn soliton_denominator_positive() {
        let fam = Family::KdvSoliton(ClosedFormParams::real(1.0, 0.5, 0.5, 0.5, 0.5).unwrap());
        assert!(fam.denominator(-3.0, 0.0).unwrap().re > 0.0);
        assert_eq!(fam.n_components(), 1);
    }
}
