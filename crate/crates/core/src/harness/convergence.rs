use crate::domain::{build_grid, CoefficientSet};
use crate::error::{Error, ErrorCategory, Result};
use crate::family::{sample_on_grid, Family};
use crate::scheme::{integrate, StepperConfig, TimeStep, Type4Stencil, DEFAULT_A_MAX};

use super::norms::{error_report_with_margin, ErrorReport, INTERIOR_MARGIN};

/// How each level chooses its time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauPolicy {
    Fixed(f64),
    /// `margin * tau_max` of the level's initial state.
    Auto { margin: f64 },
}

/// A system, an exact solution of it and the window to integrate over.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySetup {
    pub coeffs: CoefficientSet,
    pub family: Family,
    pub x_min: f64,
    pub x_max: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub interior_margin: usize,
    pub a_max: f64,
    pub type4: Type4Stencil,
}

impl StudySetup {
    pub fn new(coeffs: CoefficientSet, family: Family, x_min: f64, x_max: f64, t_end: f64) -> Self {
        StudySetup {
            coeffs,
            family,
            x_min,
            x_max,
            t_start: 0.0,
            t_end,
            interior_margin: INTERIOR_MARGIN,
            a_max: DEFAULT_A_MAX,
            type4: Type4Stencil::Consistent,
        }
    }

    fn config(&self, tau: TauPolicy) -> StepperConfig {
        let base = StepperConfig { a_max: self.a_max, type4: self.type4, ..StepperConfig::default() };
        match tau {
            TauPolicy::Fixed(t) => StepperConfig { tau: TimeStep::Fixed(t), ..base },
            TauPolicy::Auto { margin } => StepperConfig { tau: TimeStep::Auto, stability_margin: margin, ..base },
        }
    }
}

/// One integration compared with the exact solution at the final time.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub h: f64,
    pub tau: f64,
    pub steps: usize,
    pub report: ErrorReport,
    pub mass_drift: Vec<f64>,
    pub warnings: Vec<String>,
}

pub fn run_level(setup: &StudySetup, h: f64, tau: TauPolicy) -> Result<LevelResult> {
    let grid = build_grid(setup.x_min, setup.x_max, h)?;
    let initial = sample_on_grid(&setup.family, &grid, setup.t_start)?;
    let exact = sample_on_grid(&setup.family, &grid, setup.t_end)?;
    let tr = integrate(&initial, &setup.coeffs, &grid, setup.t_end, &setup.config(tau), &[])?;
    Ok(LevelResult {
        h,
        tau: tr.tau,
        steps: tr.steps,
        report: error_report_with_margin(&tr.final_state, &exact, &grid, setup.interior_margin)?,
        mass_drift: tr.relative_mass_drift(),
        warnings: tr.warnings,
    })
}

/// `ln(e_coarse / e_fine) / ln(h_coarse / h_fine)`; `log2` of the error
/// ratio under halving.
pub fn observed_order(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub tau: f64,
    pub steps: usize,
    pub error_l2: f64,
    pub error_linf: f64,
    pub percentage_max: f64,
    /// From the L2 errors of this row and the previous one.
    pub observed_order: Option<f64>,
    /// Why the row has no errors.
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn orders(&self) -> Vec<Option<f64>> {
        self.rows.iter().skip(1).map(|r| r.observed_order).collect()
    }
}

fn parallel_levels<P: Copy + Send + Sync>(
    params: &[P],
    run: impl Fn(P) -> Result<LevelResult> + Sync,
) -> Vec<Result<LevelResult>> {
    std::thread::scope(|s| {
        let run = &run;
        let handles: Vec<_> = params.iter().map(|&p| s.spawn(move || run(p))).collect();
        handles.into_iter().map(|h| h.join().expect("level worker panicked")).collect()
    })
}

fn into_row(h: f64, r: Result<LevelResult>) -> Result<ConvergenceRow> {
    match r {
        Ok(l) => Ok(ConvergenceRow {
            h,
            tau: l.tau,
            steps: l.steps,
            error_l2: l.report.l2,
            error_linf: l.report.linf,
            percentage_max: l.report.percentage_max,
            observed_order: None,
            diagnostic: None,
        }),
        Err(e) if e.category() == ErrorCategory::Instability => Ok(ConvergenceRow {
            h,
            tau: f64::NAN,
            steps: 0,
            error_l2: f64::NAN,
            error_linf: f64::NAN,
            percentage_max: f64::NAN,
            observed_order: None,
            diagnostic: Some(e.to_string()),
        }),
        Err(e) => Err(e),
    }
}

fn fill_orders(rows: &mut [ConvergenceRow], step: impl Fn(&ConvergenceRow) -> f64) {
    for i in 1..rows.len() {
        let (a, b) = (&rows[i - 1], &rows[i]);
        if a.diagnostic.is_none() && b.diagnostic.is_none() {
            rows[i].observed_order = Some(observed_order(a.error_l2, b.error_l2, step(a), step(b)));
        }
    }
}

/// Integrate at each grid spacing, in parallel, and compare with the exact
/// solution at the final time. An unstable level keeps its row with a
/// diagnostic instead of errors.
pub fn convergence_study(setup: &StudySetup, hs: &[f64], tau: TauPolicy) -> Result<ConvergenceTable> {
    if hs.len() < 3 {
        return Err(Error::param("h", "a convergence study needs at least 3 levels"));
    }
    if hs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::param("h", "levels must be strictly decreasing"));
    }
    let results = parallel_levels(hs, |h| run_level(setup, h, tau));
    let mut rows = hs.iter().zip(results).map(|(&h, r)| into_row(h, r)).collect::<Result<Vec<_>>>()?;
    fill_orders(&mut rows, |r| r.h);
    Ok(ConvergenceTable { rows })
}

/// Temporal self-convergence at fixed `h`: each run is compared with the run
/// at `reference_tau` rather than with the exact solution.
pub fn temporal_self_convergence(
    setup: &StudySetup,
    h: f64,
    taus: &[f64],
    reference_tau: f64,
) -> Result<ConvergenceTable> {
    if taus.len() < 2 {
        return Err(Error::param("tau", "need at least 2 step sizes"));
    }
    if taus.windows(2).any(|w| !(w[1] < w[0])) || taus.iter().any(|t| !(*t > reference_tau)) {
        return Err(Error::param("tau", "step sizes must decrease and exceed the reference step"));
    }
    let grid = build_grid(setup.x_min, setup.x_max, h)?;
    let initial = sample_on_grid(&setup.family, &grid, setup.t_start)?;
    let mut all = taus.to_vec();
    all.push(reference_tau);
    let finals: Vec<Result<_>> = std::thread::scope(|s| {
        let handles: Vec<_> = all
            .iter()
            .map(|&tau| {
                let (initial, grid) = (&initial, &grid);
                s.spawn(move || {
                    integrate(initial, &setup.coeffs, grid, setup.t_end, &setup.config(TauPolicy::Fixed(tau)), &[])
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("level worker panicked")).collect()
    });
    let mut finals = finals.into_iter();
    let reference = finals.next_back().expect("reference run")?;
    let mut rows = Vec::with_capacity(taus.len());
    for (&tau, tr) in taus.iter().zip(finals) {
        let level = tr.and_then(|tr| {
            Ok(LevelResult {
                h,
                tau,
                steps: tr.steps,
                report: error_report_with_margin(&tr.final_state, &reference.final_state, &grid, setup.interior_margin)?,
                mass_drift: tr.relative_mass_drift(),
                warnings: tr.warnings,
            })
        });
        rows.push(into_row(h, level)?);
    }
    fill_orders(&mut rows, |r| r.tau);
    Ok(ConvergenceTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::ClosedFormParams;
    use crate::domain::preset_system;

    #[test]
    fn order_definition() {
        assert!((observed_order(0.4, 0.1, 0.2, 0.1) - 2.0).abs() < 1e-15);
        assert!((observed_order(0.4, 0.2, 4e-5, 2e-5) - 1.0).abs() < 1e-15);
    }

    fn soliton_setup() -> StudySetup {
        let fam = Family::KdvSoliton(ClosedFormParams::real(1.0, 0.5, 0.5, 0.5, 0.5).unwrap());
        StudySetup::new(preset_system("kdv-scalar").unwrap().coefficients, fam, -15.0, 15.0, 0.05)
    }

    #[test]
    fn level_count_and_ordering_checked() {
        let s = soliton_setup();
        assert!(convergence_study(&s, &[0.4, 0.2], TauPolicy::Fixed(1e-4)).is_err());
        assert!(convergence_study(&s, &[0.4, 0.4, 0.2], TauPolicy::Fixed(1e-4)).is_err());
    }

    #[test]
    fn unstable_level_keeps_row() {
        let s = soliton_setup();
        let t = convergence_study(&s, &[0.5, 0.4, 0.1], TauPolicy::Fixed(2e-4)).unwrap();
        assert!(t.rows[0].diagnostic.is_none());
        assert!(t.rows[2].diagnostic.is_some());
        assert!(t.rows[2].observed_order.is_none());
        assert!(t.rows[1].observed_order.is_some());
    }

    #[test]
    fn soliton_errors_shrink_with_h() {
        let t = convergence_study(&soliton_setup(), &[0.5, 0.4, 0.3], TauPolicy::Auto { margin: 0.5 }).unwrap();
        assert!(t.rows.windows(2).all(|w| w[1].error_l2 < w[0].error_l2));
    }
}
