//! CSV and SVG writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use kmkdv_core::{FieldState, Grid};

use crate::error::CliError;

/// Fixed-width time label used in file names.
pub fn time_tag(t: f64) -> String {
    format!("{t:012.6}")
}

pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

/// `x,theta1,...,thetaN`, one row per node.
pub fn write_snapshot(path: &Path, grid: &Grid, state: &FieldState) -> Result<(), CliError> {
    let labels: Vec<String> = (1..=state.n_components()).map(|n| format!("theta{n}")).collect();
    write_columns(path, grid, &labels.iter().map(String::as_str).collect::<Vec<_>>(), state.values())
}

/// `x` followed by one column per labelled series.
pub fn write_columns(path: &Path, grid: &Grid, labels: &[&str], columns: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["x"];
    header.extend_from_slice(labels);
    w.write_record(&header)?;
    for i in 0..grid.point_count() {
        let mut row = vec![number(grid.x(i))];
        row.extend(columns.iter().map(|c| number(c[i])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `t,x,component,value` for every snapshot.
pub fn write_long(path: &Path, grid: &Grid, states: &[FieldState]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "x", "component", "value"])?;
    for s in states {
        for (c, v) in s.values().iter().enumerate() {
            for (i, val) in v.iter().enumerate() {
                w.write_record([number(s.t()), number(grid.x(i)), (c + 1).to_string(), number(*val)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Write a table with a header and preformatted rows.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a snapshot written by [`write_snapshot`]: node positions and the
/// field values, stamped with time `t`.
pub fn read_snapshot(path: &Path, t: f64) -> Result<(Vec<f64>, FieldState), CliError> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.get(0) != Some("x") || headers.len() < 2 {
        return Err(CliError::Validation(format!("{}: header must be x,theta1,...", path.display())));
    }
    let n = headers.len() - 1;
    let mut xs = Vec::new();
    let mut values = vec![Vec::new(); n];
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |j: usize| -> Result<f64, CliError> {
            rec.get(j).and_then(|s| s.trim().parse().ok()).ok_or_else(|| {
                CliError::Validation(format!("{}: bad number in row {} column {}", path.display(), line + 2, j + 1))
            })
        };
        xs.push(parse(0)?);
        for (c, col) in values.iter_mut().enumerate() {
            col.push(parse(c + 1)?);
        }
    }
    Ok((xs, FieldState::new(t, values)?))
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}

/// One labelled curve of a line plot.
pub struct Series<'a> {
    pub label: &'a str,
    pub values: &'a [f64],
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Line plot of each series against `x`. Values that are not finite or lie
/// beyond `clip` break the curve; `markers` are drawn as dashed verticals.
pub fn line_plot(title: &str, x: &[f64], series: &[Series<'_>], markers: &[f64], clip: Option<f64>) -> String {
    let (w, h, pad) = (800.0, 480.0, 50.0);
    let visible = |v: f64| v.is_finite() && clip.is_none_or(|c| v.abs() <= c);
    let (x0, x1) = (x.first().copied().unwrap_or(0.0), x.last().copied().unwrap_or(1.0));
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for v in s.values.iter().copied().filter(|v| visible(*v)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !(lo.is_finite() && hi.is_finite()) {
        (lo, hi) = (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo, hi) = (lo - 1.0, hi + 1.0);
    }
    let span_x = if x1 > x0 { x1 - x0 } else { 1.0 };
    let px = |v: f64| pad + (v - x0) / span_x * (w - 2.0 * pad);
    let py = |v: f64| h - pad - (v - lo) / (hi - lo) * (h - 2.0 * pad);

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    if lo < 0.0 && hi > 0.0 {
        let _ = writeln!(out, r##"<line x1="{pad}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#bbbbbb" stroke-width="1"/>"##, w - pad, y = py(0.0));
    }
    let label = |v: f64| format!("{v:.3}");
    let _ = writeln!(out, r#"<text x="{pad}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#, h - pad + 15.0, label(x0));
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#, w - pad, h - pad + 15.0, label(x1));
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#, pad - 4.0, pad + 4.0, label(hi));
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#, pad - 4.0, h - pad, label(lo));
    for m in markers.iter().filter(|m| **m >= x0 && **m <= x1) {
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{pad}" x2="{x:.2}" y2="{}" stroke="#888888" stroke-dasharray="4 3" stroke-width="1"/>"##,
            h - pad,
            x = px(*m)
        );
    }
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut segment: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, out: &mut String| {
            if seg.len() > 1 {
                let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, seg.join(" "));
            }
            seg.clear();
        };
        for (xv, yv) in x.iter().zip(s.values) {
            if visible(*yv) {
                segment.push(format!("{:.2},{:.2}", px(*xv), py(*yv)));
            } else {
                flush(&mut segment, &mut out);
            }
        }
        flush(&mut segment, &mut out);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
            w - pad - 80.0,
            pad + 16.0 * (i + 1) as f64,
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
