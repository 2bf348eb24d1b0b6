//! Run configuration: a TOML document with one table per concern.
//!
//! ```toml
//! command = "simulate"
//!
//! [system]
//! preset = "kdv-scalar"
//!
//! [grid]
//! x_min = -20.0
//! x_max = 20.0
//! h = 0.25
//!
//! [time]
//! t_end = 0.2
//! tau = "auto"
//! snapshots = [0.0, 0.1, 0.2]
//!
//! [initial]
//! family = "kdv-soliton"
//! a = 1.0
//!
//! [output]
//! directory = "out"
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use kmkdv_core::closed_forms::{ClosedFormParams, SeedConstants, DEFAULT_POLE_THRESHOLD};
use kmkdv_core::domain::{validate_coefficients, Term};
use kmkdv_core::family::Family;
use kmkdv_core::scheme::{StepperConfig, TimeStep, Type4Stencil, DEFAULT_A_MAX, DEFAULT_STABILITY_MARGIN};
use kmkdv_core::{build_grid, preset_system, CoefficientSet, Grid};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Analytic,
    Residual,
    Converge,
    Stability,
    Singularities,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Analytic => "analytic",
            Command::Residual => "residual",
            Command::Converge => "converge",
            Command::Stability => "stability",
            Command::Singularities => "singularities",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub system: SystemConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<ResidualConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converge: Option<ConvergeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singularities: Option<SingularitiesConfig>,
}

/// A preset name, or explicit coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_components: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dispersion: Vec<f64>,
}

/// One nonzero `g[n][type][m][k]`, 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub n: usize,
    #[serde(rename = "type")]
    pub kind: usize,
    pub m: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Keyword {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauSetting {
    Fixed(f64),
    Keyword(Keyword),
}

impl Default for TauSetting {
    fn default() -> Self {
        TauSetting::Keyword(Keyword::Auto)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Type4Setting {
    #[default]
    Consistent,
    HalfSpacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default)]
    pub t_start: f64,
    #[serde(default)]
    pub t_end: f64,
    #[serde(default)]
    pub tau: TauSetting,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default = "default_margin")]
    pub stability_margin: f64,
    #[serde(default = "default_a_max")]
    pub a_max: f64,
    #[serde(default)]
    pub allow_unstable: bool,
    #[serde(default)]
    pub type4: Type4Setting,
}

fn default_margin() -> f64 {
    DEFAULT_STABILITY_MARGIN
}

fn default_a_max() -> f64 {
    DEFAULT_A_MAX
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t_start: 0.0,
            t_end: 0.0,
            tau: TauSetting::default(),
            snapshots: Vec::new(),
            stability_margin: DEFAULT_STABILITY_MARGIN,
            a_max: DEFAULT_A_MAX,
            allow_unstable: false,
            type4: Type4Setting::Consistent,
        }
    }
}

/// Seed-pair parameters shared by several families. Missing constants
/// default to 0.5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    pub a: f64,
    #[serde(default = "half")]
    pub c1: f64,
    #[serde(default = "half")]
    pub c2: f64,
    #[serde(default = "half")]
    pub d1: f64,
    #[serde(default = "half")]
    pub d2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pole_threshold: Option<f64>,
}

fn half() -> f64 {
    0.5
}

/// Initial data: an exact family, zeros, or a snapshot CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConfig {
    #[default]
    Zero,
    KdvSoliton(SeedConfig),
    TwoComponent(SeedConfig),
    ThreeComponent(SeedConfig),
    CompoundDt(SeedConfig),
    RFamily {
        a: f64,
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pole_threshold: Option<f64>,
    },
    ComplexCase {
        m: f64,
        #[serde(default = "half")]
        c: f64,
        #[serde(default = "half")]
        d: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pole_threshold: Option<f64>,
    },
    Csv {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default = "yes")]
    pub svg: bool,
    /// One `t,x,component,value` file instead of a file per snapshot.
    #[serde(default)]
    pub long_format: bool,
}

fn default_directory() -> PathBuf {
    PathBuf::from("kmkdv-out")
}

fn yes() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: default_directory(), csv: true, svg: true, long_format: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticConfig {
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    Double,
    #[default]
    Extended,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualConfig {
    pub x_range: [f64; 2],
    pub t_range: [f64; 2],
    #[serde(default = "five")]
    pub nx: usize,
    #[serde(default = "five")]
    pub nt: usize,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default)]
    pub precision: Precision,
}

fn five() -> usize {
    5
}

fn default_fd_step() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub h: Vec<f64>,
    #[serde(default)]
    pub tau: TauSetting,
    /// Optional temporal self-convergence at fixed `temporal_h`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub temporal_tau: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temporal_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularitiesConfig {
    pub t_min: f64,
    pub t_max: f64,
}

fn invalid(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{field}: {reason}"))
}

/// Command-line values that replace entries of the document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub command: Option<Command>,
    pub h: Option<f64>,
    pub tau: Option<TauSetting>,
    pub t_end: Option<f64>,
    pub long_format: bool,
    pub output: Option<PathBuf>,
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_config_with(text, &Overrides::default())
}

/// Parse a document, apply `overrides`, then validate.
pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let syntax = |e: toml::de::Error| CliError::Validation(format!("config: {e}"));
    let mut doc: toml::Table = toml::from_str(text).map_err(syntax)?;
    let mut set = |table: &str, key: &str, v: toml::Value| -> Result<(), CliError> {
        let entry = doc.entry(table).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        let t = entry.as_table_mut().ok_or_else(|| invalid(table, "must be a table"))?;
        t.insert(key.to_string(), v);
        Ok(())
    };
    if let Some(h) = overrides.h {
        set("grid", "h", toml::Value::Float(h))?;
    }
    if let Some(t) = overrides.t_end {
        set("time", "t_end", toml::Value::Float(t))?;
    }
    if let Some(tau) = overrides.tau {
        let v = match tau {
            TauSetting::Fixed(v) => toml::Value::Float(v),
            TauSetting::Keyword(Keyword::Auto) => toml::Value::String("auto".into()),
        };
        set("time", "tau", v)?;
    }
    if overrides.long_format {
        set("output", "long_format", toml::Value::Boolean(true))?;
    }
    if let Some(dir) = &overrides.output {
        set("output", "directory", toml::Value::String(dir.display().to_string()))?;
    }
    if let Some(c) = overrides.command {
        doc.insert("command".into(), toml::Value::String(c.name().into()));
    }
    let cfg: RunConfig = doc.try_into().map_err(syntax)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn to_toml(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("configuration is always serializable")
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {v}")))
    }
}

impl SeedConfig {
    fn params(&self) -> Result<ClosedFormParams, CliError> {
        let p = ClosedFormParams::real(self.a, self.c1, self.c2, self.d1, self.d2)
            .map_err(|e| invalid("initial", e))?;
        Ok(p.with_pole_threshold(self.pole_threshold.unwrap_or(DEFAULT_POLE_THRESHOLD)))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let coeffs = self.coefficients()?;
        self.grid()?;
        let t = &self.time;
        if !t.t_start.is_finite() {
            return Err(invalid("time.t_start", "must be finite"));
        }
        if !(t.t_end.is_finite() && t.t_end >= t.t_start) {
            return Err(invalid("time.t_end", "must be finite and not before time.t_start"));
        }
        if let TauSetting::Fixed(v) = t.tau {
            positive("time.tau", v)?;
        }
        if !(t.stability_margin > 0.0 && t.stability_margin <= 1.0) {
            return Err(invalid("time.stability_margin", "must lie in (0, 1]"));
        }
        positive("time.a_max", t.a_max)?;
        if let Some(s) = t.snapshots.iter().find(|s| !(**s >= t.t_start && **s <= t.t_end)) {
            return Err(invalid("time.snapshots", format!("{s} lies outside [t_start, t_end]")));
        }
        let family = self.family()?;
        if let Some(f) = &family {
            let needs_match = matches!(self.command, Command::Simulate | Command::Converge | Command::Stability);
            if needs_match && f.n_components() != coeffs.n_components() {
                return Err(invalid(
                    "initial.family",
                    format!(
                        "{} has {} components but the system has {}",
                        f.name(),
                        f.n_components(),
                        coeffs.n_components()
                    ),
                ));
            }
        }
        match self.command {
            Command::Simulate | Command::Stability => {}
            Command::Analytic => {
                let a = self.analytic.as_ref().ok_or_else(|| invalid("analytic", "section required"))?;
                if a.times.is_empty() || a.times.iter().any(|t| !t.is_finite()) {
                    return Err(invalid("analytic.times", "need at least one finite time"));
                }
                family.ok_or_else(|| invalid("initial.family", "analytic needs an exact family"))?;
            }
            Command::Residual => {
                let r = self.residual.as_ref().ok_or_else(|| invalid("residual", "section required"))?;
                positive("residual.fd_step", r.fd_step)?;
                if r.nx == 0 || r.nt == 0 {
                    return Err(invalid("residual.nx", "point counts must be at least 1"));
                }
                if r.x_range[1] < r.x_range[0] || r.t_range[1] < r.t_range[0] {
                    return Err(invalid("residual.x_range", "ranges must be ordered"));
                }
                family.ok_or_else(|| invalid("initial.family", "residual needs an exact family"))?;
            }
            Command::Converge => {
                let c = self.converge.as_ref().ok_or_else(|| invalid("converge", "section required"))?;
                if c.h.len() < 3 {
                    return Err(invalid("converge.h", "need at least 3 levels"));
                }
                for h in &c.h {
                    positive("converge.h", *h)?;
                }
                if c.h.windows(2).any(|w| !(w[1] < w[0])) {
                    return Err(invalid("converge.h", "levels must be strictly decreasing"));
                }
                if let TauSetting::Fixed(v) = c.tau {
                    positive("converge.tau", v)?;
                }
                if !c.temporal_tau.is_empty() {
                    let h = c.temporal_h.ok_or_else(|| invalid("converge.temporal_h", "required with temporal_tau"))?;
                    positive("converge.temporal_h", h)?;
                    let r = c.reference_tau.ok_or_else(|| invalid("converge.reference_tau", "required with temporal_tau"))?;
                    positive("converge.reference_tau", r)?;
                }
                if family.is_none() {
                    return Err(invalid("initial.family", "converge needs an exact family"));
                }
            }
            Command::Singularities => {
                let s = self.singularities.as_ref().ok_or_else(|| invalid("singularities", "section required"))?;
                if !(s.t_min.is_finite() && s.t_max.is_finite() && s.t_max >= s.t_min) {
                    return Err(invalid("singularities.t_max", "time window must be finite and ordered"));
                }
                if !matches!(family, Some(Family::RFamily { .. })) {
                    return Err(invalid("initial.family", "singularities are located for the r-family"));
                }
            }
        }
        Ok(())
    }

    pub fn coefficients(&self) -> Result<CoefficientSet, CliError> {
        let s = &self.system;
        match (&s.preset, s.n_components) {
            (Some(name), None) if s.terms.is_empty() && s.dispersion.is_empty() => {
                Ok(preset_system(name).map_err(|e| invalid("system.preset", e))?.coefficients)
            }
            (None, Some(n)) => {
                if s.dispersion.len() != n {
                    return Err(invalid("system.dispersion", format!("expected {n} entries")));
                }
                let terms: Vec<Term> =
                    s.terms.iter().map(|t| Term { n: t.n, l: t.kind, m: t.m, k: t.k, value: t.value }).collect();
                let d: Vec<(usize, f64)> = s.dispersion.iter().enumerate().map(|(i, v)| (i + 1, *v)).collect();
                let c = CoefficientSet::from_terms(n, &terms, &d).map_err(|e| invalid("system.terms", e))?;
                let diag = validate_coefficients(&c);
                if !diag.valid {
                    return Err(invalid("system", diag));
                }
                Ok(c)
            }
            _ => Err(invalid("system", "give either `preset` or `n_components` with `terms` and `dispersion`")),
        }
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        positive("grid.h", self.grid.h)?;
        if !(self.grid.x_min.is_finite() && self.grid.x_max.is_finite()) {
            return Err(invalid("grid.x_min", "bounds must be finite"));
        }
        build_grid(self.grid.x_min, self.grid.x_max, self.grid.h).map_err(|e| invalid("grid", e))
    }

    /// The exact family named by `[initial]`, if any.
    pub fn family(&self) -> Result<Option<Family>, CliError> {
        let thr = |t: &Option<f64>| -> Result<f64, CliError> {
            let v = t.unwrap_or(DEFAULT_POLE_THRESHOLD);
            positive("initial.pole_threshold", v)?;
            Ok(v)
        };
        Ok(Some(match &self.initial {
            InitialConfig::Zero | InitialConfig::Csv { .. } => return Ok(None),
            InitialConfig::KdvSoliton(s) => Family::KdvSoliton(s.params()?),
            InitialConfig::TwoComponent(s) => Family::TwoComponent(s.params()?),
            InitialConfig::ThreeComponent(s) => Family::ThreeComponent(s.params()?),
            InitialConfig::CompoundDt(s) => Family::CompoundDt(s.params()?),
            InitialConfig::RFamily { a, r, pole_threshold } => {
                let pole_threshold = thr(pole_threshold)?;
                match Family::r_family(*a, *r).map_err(|e| invalid("initial.a", e))? {
                    Family::RFamily { a, r, .. } => Family::RFamily { a, r, pole_threshold },
                    other => other,
                }
            }
            InitialConfig::ComplexCase { m, c, d, pole_threshold } => {
                let pole_threshold = thr(pole_threshold)?;
                let constants = SeedConstants::uniform(*c, *d);
                Family::complex_case(*m, constants.clone()).map_err(|e| invalid("initial.m", e))?;
                Family::ComplexCase { m: *m, constants, pole_threshold }
            }
        }))
    }

    pub fn stepper(&self) -> StepperConfig {
        let t = &self.time;
        StepperConfig {
            tau: match t.tau {
                TauSetting::Fixed(v) => TimeStep::Fixed(v),
                TauSetting::Keyword(Keyword::Auto) => TimeStep::Auto,
            },
            stability_margin: t.stability_margin,
            a_max: t.a_max,
            allow_unstable: t.allow_unstable,
            type4: match t.type4 {
                Type4Setting::Consistent => Type4Stencil::Consistent,
                Type4Setting::HalfSpacing => Type4Stencil::HalfSpacing,
            },
            ..StepperConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
command = "simulate"

[system]
preset = "kdv-scalar"

[grid]
x_min = -20.0
x_max = 20.0
h = 0.25

[time]
t_end = 0.2

[initial]
family = "kdv-soliton"
a = 1.0
"#;

    #[test]
    fn minimal_config_is_valid() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.command, Command::Simulate);
        assert_eq!(cfg.time.tau, TauSetting::Keyword(Keyword::Auto));
        assert!(matches!(cfg.family().unwrap(), Some(Family::KdvSoliton(_))));
    }

    #[test]
    fn zero_spacing_names_field() {
        let e = parse_config(&MINIMAL.replace("h = 0.25", "h = 0.0")).unwrap_err();
        assert!(e.to_string().contains("grid.h"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn unknown_key_rejected() {
        let e = parse_config(&MINIMAL.replace("h = 0.25", "h = 0.25\nspacing = 1")).unwrap_err();
        assert!(e.to_string().contains("spacing"), "{e}");
    }

    #[test]
    fn syntax_error_has_line() {
        let e = parse_config(&MINIMAL.replace("x_max = 20.0", "x_max = = 20.0")).unwrap_err();
        assert!(e.to_string().contains("line 9"), "{e}");
    }

    #[test]
    fn round_trip() {
        let mut cfg = parse_config(MINIMAL).unwrap();
        cfg.time.tau = TauSetting::Fixed(1e-4);
        cfg.converge = Some(ConvergeConfig {
            h: vec![0.4, 0.2, 0.1],
            tau: TauSetting::Keyword(Keyword::Auto),
            temporal_tau: vec![],
            temporal_h: None,
            reference_tau: None,
        });
        let again = parse_config(&to_toml(&cfg)).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn explicit_coefficients() {
        let text = MINIMAL.replace(
            "preset = \"kdv-scalar\"",
            "n_components = 1\ndispersion = [-0.25]\nterms = [{ n = 1, type = 1, m = 1, k = 1, value = -1.5 }]",
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.coefficients().unwrap(), preset_system("kdv-scalar").unwrap().coefficients);
        let bad = text.replace("type = 1", "type = 6");
        assert!(parse_config(&bad).is_err());
    }

    #[test]
    fn overrides_replace_entries() {
        let o = Overrides {
            command: Some(Command::Stability),
            h: Some(0.5),
            tau: Some(TauSetting::Fixed(1e-3)),
            t_end: Some(0.4),
            long_format: true,
            output: Some(PathBuf::from("elsewhere")),
        };
        let cfg = parse_config_with(MINIMAL, &o).unwrap();
        assert_eq!(cfg.command, Command::Stability);
        assert_eq!(cfg.grid.h, 0.5);
        assert_eq!(cfg.time.tau, TauSetting::Fixed(1e-3));
        assert_eq!(cfg.time.t_end, 0.4);
        assert!(cfg.output.long_format);
        assert_eq!(cfg.output.directory, PathBuf::from("elsewhere"));
        let e = parse_config_with(MINIMAL, &Overrides { h: Some(-1.0), ..Overrides::default() }).unwrap_err();
        assert!(e.to_string().contains("grid.h"), "{e}");
    }

    #[test]
    fn component_mismatch_rejected() {
        let e = parse_config(&MINIMAL.replace("kdv-soliton", "two-component")).unwrap_err();
        assert!(e.to_string().contains("initial.family"), "{e}");
    }

    #[test]
    fn snapshot_outside_window_rejected() {
        let e = parse_config(&MINIMAL.replace("t_end = 0.2", "t_end = 0.2\nsnapshots = [0.5]")).unwrap_err();
        assert!(e.to_string().contains("time.snapshots"), "{e}");
    }
}
