use num_complex::Complex;

use crate::closed_forms::{three_component_fields, ClosedFormParams};
use crate::domain::CoefficientSet;
use crate::error::{Error, Result};
use crate::family::{Family, GoverningSystem};
use crate::fd::{Samples, StencilOrder};
use crate::real::{cabs, lit, Real};

/// `[θ, θ_x, θ_xx, θ_xxx]` of one component at a point.
pub type Derivatives<T> = [Complex<T>; 4];

/// `θn_t` solved from the general template:
/// `-(sum of g-terms + d_n θn_xxx)`.
pub fn continuous_rhs<T: Real>(coeffs: &CoefficientSet, fields: &[Derivatives<T>]) -> Vec<Complex<T>> {
    let n = coeffs.n_components();
    assert_eq!(fields.len(), n, "one set of derivatives per component");
    let mut out: Vec<Complex<T>> = (0..n)
        .map(|c| fields[c][3].clone() * lit::<T>(coeffs.dispersion()[c]))
        .collect();
    for term in coeffs.nonzero_terms() {
        let (m, k) = (&fields[term.m - 1], &fields[term.k - 1]);
        let v = match term.l {
            1 => m[0].clone() * k[1].clone(),
            2 => m[0].clone() * m[0].clone() * k[1].clone(),
            3 => m[1].clone() * k[1].clone(),
            4 => m[0].clone() * k[2].clone(),
            _ => m[0].clone() * k[0].clone() * k[1].clone(),
        };
        out[term.n - 1] = out[term.n - 1].clone() + v * lit::<T>(term.value);
    }
    out.into_iter().map(|v| -v).collect()
}

/// Left-hand sides of the two-component system for `(f21, u11, u21)`,
/// all terms moved to one side.
pub fn two_component_residuals<T: Real>(fields: &[Derivatives<T>], time: &[Complex<T>]) -> [Complex<T>; 3] {
    let (f, u, w) = (&fields[0], &fields[1], &fields[2]);
    let c = |v: f64| lit::<T>(v);
    let e1 = time[0].clone() + f[3].clone() * c(0.5) + f[0].clone() * u[1].clone() * c(0.75)
        + u[0].clone() * w[0].clone() * c(1.5);
    let e2 = time[1].clone() - u[3].clone() * c(0.25) - u[0].clone() * u[1].clone() * c(1.5);
    let e3 = time[2].clone() + w[3].clone() * c(0.5) + w[0].clone() * u[1].clone() * c(0.75)
        + w[1].clone() * u[0].clone() * c(1.5)
        - u[0].clone() * f[2].clone() * c(0.75)
        - u[0].clone() * u[0].clone() * f[0].clone() * c(0.75);
    [e1, e2, e3]
}

/// Finite-difference settings of [`pde_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualOptions {
    pub fd_step: f64,
    pub space_order: StencilOrder,
    pub time_order: StencilOrder,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        ResidualOptions { fd_step: 1e-3, space_order: StencilOrder::Fourth, time_order: StencilOrder::Fourth }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResidual {
    pub x: f64,
    pub t: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub max: f64,
    pub points: Vec<PointResidual>,
}

/// Fields the governing system is written for. The complex case carries
/// `u` and `v` along with `f`.
fn system_fields<T: Real>(family: &Family, x: T, t: T) -> Result<Vec<Complex<T>>> {
    match family {
        Family::ComplexCase { m, constants, pole_threshold } => {
            let p: ClosedFormParams =
                crate::closed_forms::complex_case_params(*m, constants)?.with_pole_threshold(*pole_threshold);
            Ok(three_component_fields(&p, x, t)?.to_vec())
        }
        _ => family.eval(x, t),
    }
}

fn check_stencil_poles(family: &Family, x: f64, t: f64, reach: f64) -> Result<()> {
    let real = |d: Complex<f64>| d.im.abs() <= 1e-10 * d.norm().max(1.0);
    let (l, r) = (family.denominator(x - reach, t)?, family.denominator(x + reach, t)?);
    let (b, a) = (family.denominator(x, t - reach)?, family.denominator(x, t + reach)?);
    let c = family.denominator(x, t)?;
    for (p, q, xl, xr) in [(l, c, x - reach, x), (c, r, x, x + reach)] {
        if real(p) && real(q) && p.re.signum() != q.re.signum() {
            return Err(Error::PoleBetweenNodes { what: "residual stencil", x_left: xl, x_right: xr, t });
        }
    }
    for (p, q) in [(b, c), (c, a)] {
        if real(p) && real(q) && p.re.signum() != q.re.signum() {
            return Err(Error::Pole { what: "residual stencil (time)", x, t, magnitude: 0.0, threshold: family.pole_threshold() });
        }
    }
    Ok(())
}

fn residual_at<T: Real>(family: &Family, system: &GoverningSystem, x: f64, t: f64, opts: &ResidualOptions) -> Result<f64> {
    let h = lit::<T>(opts.fd_step);
    let (xc, tc) = (lit::<T>(x), lit::<T>(t));
    let space_hw = opts.space_order.half_width(3);
    let time_hw = opts.time_order.half_width(1);
    check_stencil_poles(family, x, t, opts.fd_step * space_hw.max(time_hw) as f64)?;
    let space = Samples::collect(&xc, &h, space_hw, |xs| system_fields(family, xs, tc.clone()))?;
    let time = Samples::collect(&tc, &h, time_hw, |ts| system_fields(family, xc.clone(), ts))?;
    let d1 = space.derivative(opts.space_order, 1, &h);
    let d2 = space.derivative(opts.space_order, 2, &h);
    let d3 = space.derivative(opts.space_order, 3, &h);
    let fields: Vec<Derivatives<T>> = (0..d1.len())
        .map(|c| [space.center()[c].clone(), d1[c].clone(), d2[c].clone(), d3[c].clone()])
        .collect();
    let theta_t = time.derivative(opts.time_order, 1, &h);
    let residuals: Vec<Complex<T>> = match system {
        GoverningSystem::Template(coeffs) => {
            if coeffs.n_components() != fields.len() {
                return Err(Error::ShapeMismatch(format!(
                    "family has {} components, system {}",
                    fields.len(),
                    coeffs.n_components()
                )));
            }
            let rhs = continuous_rhs(coeffs, &fields);
            theta_t.iter().zip(rhs).map(|(a, b)| a.clone() - b).collect()
        }
        GoverningSystem::TwoComponent => {
            if fields.len() != 3 {
                return Err(Error::ShapeMismatch("the two-component system needs (f21, u11, u21)".into()));
            }
            two_component_residuals(&fields, &theta_t).to_vec()
        }
    };
    Ok(residuals.iter().map(|z| cabs(z).to_f64()).fold(0.0, f64::max))
}

/// Largest `|θ_t - rhs|` over points and components, with all derivatives
/// of the closed form taken by central differences evaluated in `T`.
pub fn pde_residual<T: Real>(
    family: &Family,
    system: &GoverningSystem,
    points: &[(f64, f64)],
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    if !(opts.fd_step > 0.0 && opts.fd_step.is_finite()) {
        return Err(Error::param("fd_step", "must be positive and finite"));
    }
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(points.len().max(1));
    let chunk = points.len().div_ceil(workers).max(1);
    let results: Vec<Result<Vec<PointResidual>>> = std::thread::scope(|s| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|&(x, t)| Ok(PointResidual { x, t, residual: residual_at::<T>(family, system, x, t, opts)? }))
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("residual worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(points.len());
    for r in results {
        out.extend(r?);
    }
    let max = out.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(ResidualReport { max, points: out })
}

/// `nx * nt` points spread evenly over a rectangle, corners included.
pub fn point_lattice(x: (f64, f64), t: (f64, f64), nx: usize, nt: usize) -> Vec<(f64, f64)> {
    let lin = |(a, b): (f64, f64), n: usize, i: usize| if n <= 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
    (0..nt).flat_map(|j| (0..nx).map(move |i| (lin(x, nx, i), lin(t, nt, j)))).collect()
}
