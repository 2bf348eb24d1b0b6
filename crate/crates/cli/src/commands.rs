use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex;

use kmkdv_core::closed_forms::{singular_points_with, ScanResolution, SingularPoint, Window};
use kmkdv_core::darboux::{
    compatibility_residual, CompatOptions, CompoundDtPotentials, RFamilyPotentials, TwoComponentPotentials,
};
use kmkdv_core::family::{sample_on_grid, Family, REALITY_TOLERANCE};
use kmkdv_core::fd::StencilOrder;
use kmkdv_core::harness::{
    convergence_study, error_report, pde_residual, percentage_error, point_lattice, temporal_self_convergence,
    ConvergenceTable, ResidualOptions, StudySetup, TauPolicy,
};
use kmkdv_core::real::Ext;
use kmkdv_core::scheme::{integrate, stability_exponent_with, TimeStep};
use kmkdv_core::{FieldState, Grid};

use crate::config::{Command, InitialConfig, Keyword, Precision, RunConfig, TauSetting};
use crate::error::CliError;
use crate::output::{
    ensure_dir, line_plot, number, read_snapshot, time_tag, write_columns, write_long, write_snapshot, write_table,
    Series,
};

/// Files written and one-line messages for the terminal.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub messages: Vec<String>,
}

impl RunSummary {
    fn file(&mut self, p: PathBuf) {
        self.files.push(p);
    }

    fn say(&mut self, m: impl Into<String>) {
        self.messages.push(m.into());
    }
}

/// Validate and execute one configured command.
pub fn run(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let dir = ensure_dir(&cfg.output.directory)?;
    match cfg.command {
        Command::Simulate => simulate(cfg, &dir),
        Command::Analytic => analytic(cfg, &dir),
        Command::Residual => residual(cfg, &dir),
        Command::Converge => converge(cfg, &dir),
        Command::Stability => stability(cfg, &dir),
        Command::Singularities => singularities(cfg, &dir),
    }
}

fn required_family(cfg: &RunConfig) -> Result<Family, CliError> {
    cfg.family()?.ok_or_else(|| CliError::Validation("initial.family: an exact family is required".into()))
}

fn initial_state(cfg: &RunConfig, grid: &Grid) -> Result<FieldState, CliError> {
    let n = cfg.coefficients()?.n_components();
    let t0 = cfg.time.t_start;
    match &cfg.initial {
        InitialConfig::Zero => Ok(FieldState::zeros(n, grid, t0)?),
        InitialConfig::Csv { path } => {
            let (xs, state) = read_snapshot(path, t0)?;
            let nodes = grid.nodes();
            let matches = xs.len() == nodes.len()
                && xs.iter().zip(&nodes).all(|(a, b)| (a - b).abs() <= 1e-9 * grid.h());
            if !matches {
                return Err(CliError::Validation(format!(
                    "initial.path: nodes in {} do not match the configured grid",
                    path.display()
                )));
            }
            if state.n_components() != n {
                return Err(CliError::Validation(format!(
                    "initial.path: {} components, the system has {n}",
                    state.n_components()
                )));
            }
            Ok(state)
        }
        _ => Ok(sample_on_grid(&required_family(cfg)?, grid, t0)?),
    }
}

fn write_svg(path: &Path, svg: String, summary: &mut RunSummary) -> Result<(), CliError> {
    fs::write(path, svg)?;
    summary.file(path.to_path_buf());
    Ok(())
}

fn simulate(cfg: &RunConfig, dir: &Path) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::default();
    let coeffs = cfg.coefficients()?;
    let grid = cfg.grid()?;
    let initial = initial_state(cfg, &grid)?;
    let snapshots =
        if cfg.time.snapshots.is_empty() { vec![cfg.time.t_start, cfg.time.t_end] } else { cfg.time.snapshots.clone() };
    let tr = integrate(&initial, &coeffs, &grid, cfg.time.t_end, &cfg.stepper(), &snapshots)?;
    summary.say(format!("tau = {:e}, steps = {}, tau_max = {:e}", tr.tau, tr.steps, tr.stability.tau_max));
    for w in &tr.warnings {
        summary.say(format!("warning: {w}"));
    }
    let xs = grid.nodes();
    let labels: Vec<String> = (1..=initial.n_components()).map(|n| format!("theta{n}")).collect();
    if cfg.output.csv {
        if cfg.output.long_format {
            let p = dir.join("snapshots_long.csv");
            write_long(&p, &grid, &tr.snapshots)?;
            summary.file(p);
        } else {
            for s in &tr.snapshots {
                let p = dir.join(format!("snapshot_t{}.csv", time_tag(s.t())));
                write_snapshot(&p, &grid, s)?;
                summary.file(p);
            }
        }
        let mut header = vec!["t".to_string()];
        header.extend((1..=initial.n_components()).map(|n| format!("mass{n}")));
        header.push("max_abs".into());
        let rows: Vec<Vec<String>> = tr
            .diagnostics
            .iter()
            .map(|d| {
                let mut r = vec![number(d.t)];
                r.extend(d.mass.iter().map(|m| number(*m)));
                r.push(number(d.max_abs));
                r
            })
            .collect();
        let p = dir.join("diagnostics.csv");
        write_table(&p, &header.iter().map(String::as_str).collect::<Vec<_>>(), &rows)?;
        summary.file(p);
    }
    if cfg.output.svg {
        for s in &tr.snapshots {
            let series: Vec<Series> =
                s.values().iter().zip(&labels).map(|(v, l)| Series { label: l, values: v }).collect();
            let svg = line_plot(&format!("t = {}", s.t()), &xs, &series, &[], None);
            write_svg(&dir.join(format!("snapshot_t{}.svg", time_tag(s.t()))), svg, &mut summary)?;
        }
    }
    if let Some(family) = cfg.family()? {
        let exact = sample_on_grid(&family, &grid, cfg.time.t_end)?;
        let report = error_report(&tr.final_state, &exact, &grid)?;
        summary.say(format!(
            "error vs {} at t = {}: l2 = {:e}, linf = {:e}, max percentage = {:.6}%",
            family.name(),
            cfg.time.t_end,
            report.l2,
            report.linf,
            report.percentage_max
        ));
        let pct = percentage_error(&tr.final_state, &exact)?;
        let pct_labels: Vec<String> = family.component_labels().iter().map(|l| format!("percent_{l}")).collect();
        if cfg.output.csv {
            let p = dir.join("error_profile.csv");
            write_columns(&p, &grid, &pct_labels.iter().map(String::as_str).collect::<Vec<_>>(), &pct.per_node)?;
            summary.file(p);
        }
        if cfg.output.svg {
            let series: Vec<Series> =
                pct.per_node.iter().zip(&pct_labels).map(|(v, l)| Series { label: l, values: v }).collect();
            let svg = line_plot(&format!("percentage error at t = {}", cfg.time.t_end), &xs, &series, &[], None);
            write_svg(&dir.join("error_profile.svg"), svg, &mut summary)?;
        }
    }
    Ok(summary)
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Poles of `family` on the grid line at time `t`.
pub fn poles_at(family: &Family, grid: &Grid, t: f64) -> Result<Vec<SingularPoint>, CliError> {
    if let Family::RFamily { a, r, .. } = family {
        let window = Window::new(grid.x_min(), grid.x_max(), t, t)?;
        let res = ScanResolution { x_samples: (grid.point_count() * 8).max(4000), t_samples: 1 };
        return Ok(singular_points_with(*a, *r, &window, res));
    }
    let den = |x: f64| family.denominator(x, t);
    let mut out = Vec::new();
    let mut prev: Option<(f64, Complex<f64>)> = None;
    for x in grid.nodes() {
        let d = den(x)?;
        if d.norm() < family.pole_threshold() {
            out.push(SingularPoint { x, t, denominator: d.re });
        } else if let Some((xl, dl)) = prev {
            let real = |z: Complex<f64>| z.im.abs() <= REALITY_TOLERANCE * z.norm().max(1.0);
            if real(dl) && real(d) && dl.re.signum() != d.re.signum() {
                let root = bisect(|x| den(x).map_or(0.0, |z| z.re), xl, x);
                out.push(SingularPoint { x: root, t, denominator: den(root)?.re });
            }
        }
        prev = Some((x, d));
    }
    Ok(out)
}

fn analytic(cfg: &RunConfig, dir: &Path) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::default();
    let family = required_family(cfg)?;
    let grid = cfg.grid()?;
    let labels = family.component_labels();
    let times = &cfg.analytic.as_ref().expect("validated").times;
    for &t in times {
        let tag = time_tag(t);
        let mut xs = Vec::new();
        let mut re: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
        let mut im: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
        let mut skipped = 0usize;
        let mut imag_max: f64 = 0.0;
        for x in grid.nodes() {
            match family.eval::<f64>(x, t) {
                Ok(z) => {
                    xs.push(x);
                    for (c, v) in z.iter().enumerate() {
                        re[c].push(v.re);
                        im[c].push(v.im);
                        imag_max = imag_max.max(v.im.abs() / v.norm().max(1.0));
                    }
                }
                Err(e) if e.category() == kmkdv_core::ErrorCategory::Pole => skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
        let poles = poles_at(&family, &grid, t)?;
        let complex = imag_max > REALITY_TOLERANCE;
        let mut header: Vec<String> = vec!["x".into()];
        header.extend(labels.iter().map(|l| l.to_string()));
        if complex {
            header.extend(labels.iter().map(|l| format!("{l}_im")));
        }
        if cfg.output.csv {
            let rows: Vec<Vec<String>> = (0..xs.len())
                .map(|i| {
                    let mut r = vec![number(xs[i])];
                    r.extend(re.iter().map(|c| number(c[i])));
                    if complex {
                        r.extend(im.iter().map(|c| number(c[i])));
                    }
                    r
                })
                .collect();
            let p = dir.join(format!("analytic_t{tag}.csv"));
            write_table(&p, &header.iter().map(String::as_str).collect::<Vec<_>>(), &rows)?;
            summary.file(p);
            let p = dir.join(format!("singularities_t{tag}.csv"));
            let rows: Vec<Vec<String>> =
                poles.iter().map(|s| vec![number(s.x), number(s.t), number(s.denominator)]).collect();
            write_table(&p, &["x", "t", "denominator"], &rows)?;
            summary.file(p);
        }
        if cfg.output.svg {
            let series: Vec<Series> = re.iter().zip(labels).map(|(v, l)| Series { label: l, values: v }).collect();
            let clip = (!poles.is_empty()).then(|| clip_level(&re));
            let markers: Vec<f64> = poles.iter().map(|p| p.x).collect();
            let svg = line_plot(&format!("{} at t = {t}", family.name()), &xs, &series, &markers, clip);
            write_svg(&dir.join(format!("analytic_t{tag}.svg")), svg, &mut summary)?;
        }
        summary.say(format!(
            "t = {t}: {} nodes, {} singular points, {} nodes on poles{}",
            xs.len(),
            poles.len(),
            skipped,
            if complex { ", complex-valued" } else { "" }
        ));
    }
    Ok(summary)
}

/// Plot range for profiles with poles: a multiple of the 75th percentile
/// of the magnitudes.
fn clip_level(columns: &[Vec<f64>]) -> f64 {
    let mut mags: Vec<f64> = columns.iter().flatten().map(|v| v.abs()).filter(|v| v.is_finite()).collect();
    if mags.is_empty() {
        return 1.0;
    }
    mags.sort_by(f64::total_cmp);
    let q = mags[(mags.len() * 3) / 4];
    (10.0 * q).max(1e-12)
}

fn residual(cfg: &RunConfig, dir: &Path) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::default();
    let family = required_family(cfg)?;
    let r = cfg.residual.as_ref().expect("validated");
    let points = point_lattice((r.x_range[0], r.x_range[1]), (r.t_range[0], r.t_range[1]), r.nx, r.nt);
    let opts = ResidualOptions { fd_step: r.fd_step, ..ResidualOptions::default() };
    let system = family.governing_system();
    let pde = match r.precision {
        Precision::Double => pde_residual::<f64>(&family, &system, &points, &opts)?,
        Precision::Extended => pde_residual::<Ext>(&family, &system, &points, &opts)?,
    };
    let copts = CompatOptions { fd_step: r.fd_step, order: StencilOrder::Second, ..CompatOptions::default() };
    let compat_at = |x: f64, t: f64| -> Result<Option<f64>, CliError> {
        let v = match (&family, r.precision) {
            (Family::RFamily { a, r, .. }, Precision::Double) => {
                compatibility_residual::<f64, _>(&RFamilyPotentials { a: *a, r: *r }, x, t, copts)?
            }
            (Family::RFamily { a, r, .. }, Precision::Extended) => {
                compatibility_residual::<Ext, _>(&RFamilyPotentials { a: *a, r: *r }, x, t, copts)?
            }
            (Family::CompoundDt(p), Precision::Double) => {
                compatibility_residual::<f64, _>(&CompoundDtPotentials(p.clone()), x, t, copts)?
            }
            (Family::CompoundDt(p), Precision::Extended) => {
                compatibility_residual::<Ext, _>(&CompoundDtPotentials(p.clone()), x, t, copts)?
            }
            (Family::TwoComponent(p), Precision::Double) => {
                compatibility_residual::<f64, _>(&TwoComponentPotentials(p.clone()), x, t, copts)?
            }
            (Family::TwoComponent(p), Precision::Extended) => {
                compatibility_residual::<Ext, _>(&TwoComponentPotentials(p.clone()), x, t, copts)?
            }
            _ => return Ok(None),
        };
        Ok(Some(v))
    };
    let mut rows = Vec::with_capacity(points.len());
    let mut compat_max: Option<f64> = None;
    for p in &pde.points {
        let c = compat_at(p.x, p.t)?;
        if let Some(v) = c {
            compat_max = Some(compat_max.map_or(v, |m: f64| m.max(v)));
        }
        rows.push(vec![number(p.x), number(p.t), number(p.residual), c.map_or("".into(), number)]);
    }
    if cfg.output.csv {
        let path = dir.join("residual.csv");
        write_table(&path, &["x", "t", "pde_residual", "compat_residual"], &rows)?;
        summary.file(path);
    }
    summary.say(format!("max PDE residual = {:e} ({} points, fd_step = {:e})", pde.max, points.len(), r.fd_step));
    match compat_max {
        Some(m) => summary.say(format!("max compatibility residual = {m:e} (second-order stencils)")),
        None => summary.say(format!("no matrix potentials for {}; compatibility residual skipped", family.name())),
    }
    Ok(summary)
}

fn tau_policy(setting: TauSetting, margin: f64) -> TauPolicy {
    match setting {
        TauSetting::Fixed(v) => TauPolicy::Fixed(v),
        TauSetting::Keyword(Keyword::Auto) => TauPolicy::Auto { margin },
    }
}

fn table_rows(t: &ConvergenceTable) -> Vec<Vec<String>> {
    t.rows
        .iter()
        .map(|r| {
            vec![
                number(r.h),
                number(r.tau),
                r.steps.to_string(),
                number(r.error_l2),
                number(r.error_linf),
                number(r.percentage_max),
                r.observed_order.map_or(String::new(), number),
                r.diagnostic.clone().unwrap_or_default(),
            ]
        })
        .collect()
}

fn converge(cfg: &RunConfig, dir: &Path) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::default();
    let c = cfg.converge.as_ref().expect("validated");
    let stepper = cfg.stepper();
    let setup = StudySetup {
        t_start: cfg.time.t_start,
        a_max: stepper.a_max,
        type4: stepper.type4,
        ..StudySetup::new(cfg.coefficients()?, required_family(cfg)?, cfg.grid.x_min, cfg.grid.x_max, cfg.time.t_end)
    };
    let header = ["h", "tau", "steps", "error_l2", "error_linf", "percentage_max", "observed_order", "diagnostic"];
    let table = convergence_study(&setup, &c.h, tau_policy(c.tau, cfg.time.stability_margin))?;
    for r in &table.rows {
        summary.say(format!(
            "h = {}: l2 = {:e}, linf = {:e}, order = {}{}",
            r.h,
            r.error_l2,
            r.error_linf,
            r.observed_order.map_or("-".into(), |o| format!("{o:.3}")),
            r.diagnostic.as_ref().map_or(String::new(), |d| format!(" ({d})"))
        ));
    }
    if cfg.output.csv {
        let p = dir.join("convergence.csv");
        write_table(&p, &header, &table_rows(&table))?;
        summary.file(p);
    }
    if !c.temporal_tau.is_empty() {
        let h = c.temporal_h.expect("validated");
        let reference = c.reference_tau.expect("validated");
        let t = temporal_self_convergence(&setup, h, &c.temporal_tau, reference)?;
        for r in &t.rows {
            summary.say(format!(
                "tau = {:e}: l2 = {:e}, order = {}",
                r.tau,
                r.error_l2,
                r.observed_order.map_or("-".into(), |o| format!("{o:.3}"))
            ));
        }
        if cfg.output.csv {
            let p = dir.join("temporal_convergence.csv");
            write_table(&p, &header, &table_rows(&t))?;
            summary.file(p);
        }
    }
    Ok(summary)
}

fn stability(cfg: &RunConfig, dir: &Path) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::default();
    let coeffs = cfg.coefficients()?;
    let grid = cfg.grid()?;
    let state = initial_state(cfg, &grid)?;
    let stepper = cfg.stepper();
    let probe = stability_exponent_with(&state, &coeffs, &grid, 0.0, stepper.a_max)?;
    let tau = match stepper.tau {
        TimeStep::Fixed(t) => t,
        TimeStep::Auto if probe.tau_max.is_finite() => stepper.stability_margin * probe.tau_max,
        TimeStep::Auto => 0.0,
    };
    let report = stability_exponent_with(&state, &coeffs, &grid, tau, stepper.a_max)?;
    for line in report.to_string().lines() {
        summary.say(line.to_string());
    }
    if cfg.output.csv {
        let rows = [
            ("a", report.a_value),
            ("X", report.x_term),
            ("Y", report.y_term),
            ("D", report.d_max),
            ("h", report.h),
            ("tau", report.tau),
            ("a_max", report.a_max),
            ("tau_max", report.tau_max),
            ("stable", if report.stable { 1.0 } else { 0.0 }),
        ]
        .iter()
        .map(|(k, v)| vec![k.to_string(), number(*v)])
        .collect::<Vec<_>>();
        let p = dir.join("stability.csv");
        write_table(&p, &["quantity", "value"], &rows)?;
        summary.file(p);
    }
    Ok(summary)
}

fn singularities(cfg: &RunConfig, dir: &Path) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::default();
    let (a, r) = match required_family(cfg)? {
        Family::RFamily { a, r, .. } => (a, r),
        _ => unreachable!("validated"),
    };
    let s = cfg.singularities.as_ref().expect("validated");
    let window = Window::new(cfg.grid.x_min, cfg.grid.x_max, s.t_min, s.t_max)?;
    let pts = singular_points_with(a, r, &window, ScanResolution::default());
    summary.say(format!("{} singular points for a = {a}, r = {r}", pts.len()));
    for p in pts.iter().take(20) {
        summary.say(format!("  x = {:.12}, t = {:.12}", p.x, p.t));
    }
    if cfg.output.csv {
        let rows: Vec<Vec<String>> = pts.iter().map(|p| vec![number(p.x), number(p.t), number(p.denominator)]).collect();
        let p = dir.join("singularities.csv");
        write_table(&p, &["x", "t", "denominator"], &rows)?;
        summary.file(p);
    }
    Ok(summary)
}
