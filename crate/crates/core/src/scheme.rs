//! Explicit forward-Euler / central-difference integrator for the general
//! template, with the stability exponent and step-size guard.

use std::fmt;

use crate::domain::{validate_coefficients, CoefficientSet, FieldState, Grid};
use crate::error::{Error, Result};

/// Discretization of the `θm θk_xx` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Type4Stencil {
    /// Second difference over `h^2`.
    #[default]
    Consistent,
    /// Second difference over `2h`. Not consistent with the continuous
    /// term; kept for comparison runs.
    HalfSpacing,
}

/// Treatment of stencil points outside the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryPolicy {
    /// Ghost values are zero.
    #[default]
    ZeroGhost,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    /// `stability_margin * tau_max`, computed once from the initial state.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub tau: TimeStep,
    pub boundary: BoundaryPolicy,
    pub stability_margin: f64,
    pub a_max: f64,
    /// Run a fixed step above `tau_max` anyway.
    pub allow_unstable: bool,
    pub type4: Type4Stencil,
}

pub const DEFAULT_A_MAX: f64 = 10.0;
pub const DEFAULT_STABILITY_MARGIN: f64 = 0.5;
/// Nodes at each end checked for decay of the initial data.
pub const BOUNDARY_BAND: usize = 4;
/// Boundary band values above this fraction of the maximum trigger a warning.
pub const BOUNDARY_DECAY: f64 = 1e-6;

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            tau: TimeStep::Auto,
            boundary: BoundaryPolicy::ZeroGhost,
            stability_margin: DEFAULT_STABILITY_MARGIN,
            a_max: DEFAULT_A_MAX,
            allow_unstable: false,
            type4: Type4Stencil::Consistent,
        }
    }
}

impl StepperConfig {
    pub fn fixed(tau: f64) -> Self {
        StepperConfig { tau: TimeStep::Fixed(tau), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if let TimeStep::Fixed(tau) = self.tau {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::param("tau", "must be positive and finite"));
            }
        }
        if !(self.stability_margin > 0.0 && self.stability_margin <= 1.0) {
            return Err(Error::param("stability_margin", "must lie in (0, 1]"));
        }
        if !(self.a_max > 0.0 && self.a_max.is_finite()) {
            return Err(Error::param("a_max", "must be positive and finite"));
        }
        Ok(())
    }
}

/// Terms of the stability exponent `a = 2X + tau (X + Y/h + 3D/h^3)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub a_value: f64,
    pub x_term: f64,
    pub y_term: f64,
    pub d_max: f64,
    pub h: f64,
    pub tau: f64,
    pub a_max: f64,
    /// Largest step with `a <= a_max`; infinite when the exponent does not
    /// depend on the step, zero when `2X >= a_max`.
    pub tau_max: f64,
    pub stable: bool,
    pub diagnostic: Option<String>,
}

impl StabilityReport {
    /// `X + Y/h + 3D/h^3`.
    pub fn growth_factor(&self) -> f64 {
        self.x_term + self.y_term / self.h + 3.0 * self.d_max / self.h.powi(3)
    }
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "a        = {:.6e}", self.a_value)?;
        writeln!(f, "X        = {:.6e}", self.x_term)?;
        writeln!(f, "Y        = {:.6e}", self.y_term)?;
        writeln!(f, "D        = {:.6e}", self.d_max)?;
        writeln!(f, "h        = {:.6e}", self.h)?;
        writeln!(f, "tau      = {:.6e}", self.tau)?;
        writeln!(f, "a_max    = {:.6e}", self.a_max)?;
        writeln!(f, "tau_max  = {:.6e}", self.tau_max)?;
        write!(f, "stable   = {}", self.stable)?;
        if let Some(d) = &self.diagnostic {
            write!(f, "\nnote     = {d}")?;
        }
        Ok(())
    }
}

fn check_inputs(state: &FieldState, coeffs: &CoefficientSet, grid: &Grid) -> Result<()> {
    if state.n_components() != coeffs.n_components() {
        return Err(Error::ShapeMismatch(format!(
            "state has {} components, coefficients {}",
            state.n_components(),
            coeffs.n_components()
        )));
    }
    if state.len() != grid.point_count() {
        return Err(Error::ShapeMismatch(format!(
            "state has {} nodes, grid {}",
            state.len(),
            grid.point_count()
        )));
    }
    Ok(())
}

/// Reusable buffers for the right-hand side.
struct Workspace {
    h: f64,
    type4: Type4Stencil,
    terms: Vec<(usize, usize, usize, usize, f64)>,
    d: Vec<f64>,
    padded: Vec<Vec<f64>>,
    ux: Vec<Vec<f64>>,
    uxx: Vec<Vec<f64>>,
    rate: Vec<Vec<f64>>,
}

const PAD: usize = 2;

impl Workspace {
    fn new(coeffs: &CoefficientSet, grid: &Grid, type4: Type4Stencil) -> Self {
        let n = coeffs.n_components();
        let len = grid.point_count();
        let terms = coeffs.nonzero_terms().iter().map(|t| (t.n - 1, t.l, t.m - 1, t.k - 1, t.value)).collect();
        Workspace {
            h: grid.h(),
            type4,
            terms,
            d: coeffs.dispersion().to_vec(),
            padded: vec![vec![0.0; len + 2 * PAD]; n],
            ux: vec![vec![0.0; len]; n],
            uxx: vec![vec![0.0; len]; n],
            rate: vec![vec![0.0; len]; n],
        }
    }

    fn load(&mut self, values: &[Vec<f64>]) {
        for (p, v) in self.padded.iter_mut().zip(values) {
            p[PAD..PAD + v.len()].copy_from_slice(v);
        }
    }

    /// Fills `rate` with the bracket of the scheme for the loaded state.
    fn compute(&mut self, t: f64) -> Result<()> {
        let h = self.h;
        let (two_h, h3x2) = (2.0 * h, 2.0 * h * h * h);
        let uxx_den = match self.type4 {
            Type4Stencil::Consistent => h * h,
            Type4Stencil::HalfSpacing => 2.0 * h,
        };
        for c in 0..self.padded.len() {
            let p = &self.padded[c];
            let len = self.ux[c].len();
            for i in 0..len {
                let j = i + PAD;
                self.ux[c][i] = (p[j + 1] - p[j - 1]) / two_h;
                self.uxx[c][i] = (p[j + 1] - 2.0 * p[j] + p[j - 1]) / uxx_den;
                self.rate[c][i] =
                    self.d[c] * (p[j + 2] - 2.0 * p[j + 1] + 2.0 * p[j - 1] - p[j - 2]) / h3x2;
            }
        }
        for &(n, l, m, k, g) in &self.terms {
            let len = self.rate[n].len();
            for i in 0..len {
                let tm = self.padded[m][i + PAD];
                let term = match l {
                    1 => tm * self.ux[k][i],
                    2 => tm * tm * self.ux[k][i],
                    3 => self.ux[m][i] * self.ux[k][i],
                    4 => tm * self.uxx[k][i],
                    _ => tm * self.padded[k][i + PAD] * self.ux[k][i],
                };
                self.rate[n][i] += g * term;
            }
        }
        for (c, r) in self.rate.iter().enumerate() {
            if let Some(node) = r.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { component: c + 1, node, t });
            }
        }
        Ok(())
    }

    /// `values -= tau * rate`, then checks the result.
    fn advance(&mut self, values: &mut [Vec<f64>], tau: f64, t_new: f64) -> Result<()> {
        self.load(values);
        self.compute(t_new - tau)?;
        for (c, (v, r)) in values.iter_mut().zip(&self.rate).enumerate() {
            for (i, (x, dr)) in v.iter_mut().zip(r).enumerate() {
                *x -= tau * dr;
                if !x.is_finite() {
                    return Err(Error::NonFinite { component: c + 1, node: i, t: t_new });
                }
            }
        }
        Ok(())
    }
}

/// Bracketed sum of the scheme at every node, with the consistent type-4 stencil.
pub fn discrete_rhs(state: &FieldState, coeffs: &CoefficientSet, grid: &Grid) -> Result<Vec<Vec<f64>>> {
    discrete_rhs_with(state, coeffs, grid, Type4Stencil::Consistent)
}

pub fn discrete_rhs_with(
    state: &FieldState,
    coeffs: &CoefficientSet,
    grid: &Grid,
    type4: Type4Stencil,
) -> Result<Vec<Vec<f64>>> {
    check_inputs(state, coeffs, grid)?;
    let mut ws = Workspace::new(coeffs, grid, type4);
    ws.load(state.values());
    ws.compute(state.t())?;
    Ok(ws.rate)
}

/// One forward step `θ - tau * bracket`.
pub fn step(state: &FieldState, coeffs: &CoefficientSet, grid: &Grid, tau: f64) -> Result<FieldState> {
    step_with(state, coeffs, grid, tau, Type4Stencil::Consistent)
}

pub fn step_with(
    state: &FieldState,
    coeffs: &CoefficientSet,
    grid: &Grid,
    tau: f64,
    type4: Type4Stencil,
) -> Result<FieldState> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param("tau", "must be positive and finite"));
    }
    check_inputs(state, coeffs, grid)?;
    let mut ws = Workspace::new(coeffs, grid, type4);
    let mut values = state.values().to_vec();
    let t_new = state.t() + tau;
    ws.advance(&mut values, tau, t_new)?;
    FieldState::new(t_new, values)
}

/// Stability exponent for `state` at step `tau`, with the default `a_max`.
pub fn stability_exponent(state: &FieldState, coeffs: &CoefficientSet, grid: &Grid, tau: f64) -> Result<StabilityReport> {
    stability_exponent_with(state, coeffs, grid, tau, DEFAULT_A_MAX)
}

pub fn stability_exponent_with(
    state: &FieldState,
    coeffs: &CoefficientSet,
    grid: &Grid,
    tau: f64,
    a_max: f64,
) -> Result<StabilityReport> {
    check_inputs(state, coeffs, grid)?;
    let h = grid.h();
    let g = coeffs.max_abs_g();
    let mut grad: f64 = 0.0;
    let mut amp: f64 = 0.0;
    for v in state.values() {
        for i in 0..v.len() {
            let left = if i > 0 { v[i - 1] } else { 0.0 };
            let right = v.get(i + 1).copied().unwrap_or(0.0);
            grad = grad.max(((right - left) / (2.0 * h)).abs());
            amp = amp.max(v[i].abs());
        }
    }
    let x_term = g * grad * grad;
    let y_term = g * amp * amp;
    let d_max = coeffs.max_abs_d();
    let k = x_term + y_term / h + 3.0 * d_max / (h * h * h);
    let a_value = 2.0 * x_term + tau * k * k;
    let mut diagnostic = None;
    let tau_max = if a_max <= 2.0 * x_term {
        diagnostic = Some(format!(
            "a_max = {a_max:e} does not exceed 2X = {:e}; no step size satisfies the bound",
            2.0 * x_term
        ));
        0.0
    } else if k == 0.0 {
        f64::INFINITY
    } else {
        (a_max - 2.0 * x_term) / (k * k)
    };
    Ok(StabilityReport {
        a_value,
        x_term,
        y_term,
        d_max,
        h,
        tau,
        a_max,
        tau_max,
        stable: tau <= tau_max && tau_max > 0.0,
        diagnostic,
    })
}

/// Diagnostics recorded at each snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotDiagnostics {
    pub t: f64,
    /// `sum_i θn_i h` per component.
    pub mass: Vec<f64>,
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<FieldState>,
    pub diagnostics: Vec<SnapshotDiagnostics>,
    pub final_state: FieldState,
    pub initial_mass: Vec<f64>,
    pub final_mass: Vec<f64>,
    pub tau: f64,
    pub steps: usize,
    /// Evaluated on the initial state at the step actually used.
    pub stability: StabilityReport,
    /// Largest `|θ|` over every step, initial state included.
    pub running_max_abs: f64,
    pub warnings: Vec<String>,
}

impl Trajectory {
    /// `|mass(end) - mass(0)| / |mass(0)|` per component (absolute drift when
    /// the initial mass is zero).
    pub fn relative_mass_drift(&self) -> Vec<f64> {
        self.initial_mass
            .iter()
            .zip(&self.final_mass)
            .map(|(m0, m1)| {
                let d = (m1 - m0).abs();
                if *m0 == 0.0 { d } else { d / m0.abs() }
            })
            .collect()
    }
}

pub fn discrete_mass(values: &[Vec<f64>], h: f64) -> Vec<f64> {
    values.iter().map(|v| v.iter().sum::<f64>() * h).collect()
}

fn boundary_warning(state: &FieldState) -> Option<String> {
    let max = state.max_abs();
    if max == 0.0 {
        return None;
    }
    let len = state.len();
    let band = BOUNDARY_BAND.min(len);
    let mut worst: f64 = 0.0;
    for v in state.values() {
        for x in v[..band].iter().chain(&v[len - band..]) {
            worst = worst.max(x.abs());
        }
    }
    (worst > BOUNDARY_DECAY * max).then(|| {
        format!(
            "initial data not decayed at the boundary: |θ| = {worst:e} in the outer {BOUNDARY_BAND} nodes, {:e} of the maximum",
            worst / max
        )
    })
}

/// Number of steps of size about `tau` covering `span`; the last one may be shorter.
fn steps_for(span: f64, tau: f64) -> usize {
    if span <= 0.0 {
        0
    } else {
        ((span / tau) - 1e-9).ceil().max(1.0) as usize
    }
}

/// Integrate from `initial` to `t_end`, recording the requested snapshots
/// exactly at their times.
pub fn integrate(
    initial: &FieldState,
    coeffs: &CoefficientSet,
    grid: &Grid,
    t_end: f64,
    cfg: &StepperConfig,
    snapshots: &[f64],
) -> Result<Trajectory> {
    cfg.validate()?;
    check_inputs(initial, coeffs, grid)?;
    let diag = validate_coefficients(coeffs);
    if !diag.valid {
        return Err(Error::param("coefficients", diag.to_string()));
    }
    let t0 = initial.t();
    if !(t_end.is_finite() && t_end >= t0) {
        return Err(Error::param("t_end", "must be finite and not before the initial time"));
    }
    let mut targets: Vec<f64> = snapshots.to_vec();
    for &s in &targets {
        if !(s >= t0 && s <= t_end) {
            return Err(Error::param("snapshots", format!("time {s} outside [{t0}, {t_end}]")));
        }
    }
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let probe = stability_exponent_with(initial, coeffs, grid, 0.0, cfg.a_max)?;
    let tau = match cfg.tau {
        TimeStep::Fixed(tau) => tau,
        TimeStep::Auto => {
            if probe.tau_max == 0.0 {
                return Err(Error::NoStableStep { a_max: cfg.a_max, two_x: 2.0 * probe.x_term });
            }
            if probe.tau_max.is_infinite() {
                (t_end - t0).max(f64::MIN_POSITIVE)
            } else {
                cfg.stability_margin * probe.tau_max
            }
        }
    };
    let stability = stability_exponent_with(initial, coeffs, grid, tau, cfg.a_max)?;
    if !stability.stable && !cfg.allow_unstable {
        return Err(Error::UnstableStep { tau, tau_max: stability.tau_max, a_max: cfg.a_max });
    }

    let mut warnings: Vec<String> = boundary_warning(initial).into_iter().collect();
    if let Some(d) = &stability.diagnostic {
        warnings.push(d.clone());
    }
    if !stability.stable {
        warnings.push(format!("running above tau_max = {:e} with tau = {tau:e}", stability.tau_max));
    }

    let h = grid.h();
    let mut ws = Workspace::new(coeffs, grid, cfg.type4);
    let mut values = initial.values().to_vec();
    let mut t = t0;
    let mut steps = 0usize;
    let mut running_max_abs = initial.max_abs();
    let mut out_snaps = Vec::with_capacity(targets.len());
    let mut out_diag = Vec::with_capacity(targets.len());
    let record = |values: &[Vec<f64>], t: f64, snaps: &mut Vec<FieldState>, diag: &mut Vec<SnapshotDiagnostics>| -> Result<()> {
        let s = FieldState::new(t, values.to_vec())?;
        diag.push(SnapshotDiagnostics { t, mass: discrete_mass(values, h), max_abs: s.max_abs() });
        snaps.push(s);
        Ok(())
    };

    let mut stops = targets.clone();
    if stops.last() != Some(&t_end) {
        stops.push(t_end);
    }
    for stop in stops {
        let start = t;
        let n = steps_for(stop - start, tau);
        for j in 0..n {
            let t_new = if j + 1 == n { stop } else { start + (j + 1) as f64 * tau };
            ws.advance(&mut values, t_new - t, t_new)?;
            t = t_new;
            steps += 1;
            for v in &values {
                for x in v {
                    running_max_abs = running_max_abs.max(x.abs());
                }
            }
        }
        t = stop;
        if targets.contains(&stop) {
            record(&values, t, &mut out_snaps, &mut out_diag)?;
        }
    }

    let final_state = FieldState::new(t_end, values)?;
    Ok(Trajectory {
        snapshots: out_snaps,
        diagnostics: out_diag,
        initial_mass: discrete_mass(initial.values(), h),
        final_mass: discrete_mass(final_state.values(), h),
        final_state,
        tau,
        steps,
        stability,
        running_max_abs,
        warnings,
    })
}
