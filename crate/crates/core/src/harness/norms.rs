use crate::domain::{FieldState, Grid};
use crate::error::{Error, Result};

/// Nodes excluded at each end when comparing against exact solutions.
pub const INTERIOR_MARGIN: usize = 8;

/// `(sum_i sum_n v_i^2 h)^(1/2)` over all components and nodes.
pub fn l2_norm<V: AsRef<[f64]>>(components: &[V], h: f64) -> f64 {
    let s: f64 = components.iter().flat_map(|c| c.as_ref().iter()).map(|v| v * v).sum();
    (s * h).sqrt()
}

pub fn linf_norm<V: AsRef<[f64]>>(components: &[V]) -> f64 {
    components.iter().flat_map(|c| c.as_ref().iter()).fold(0.0, |m, v| m.max(v.abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentError {
    pub l2: f64,
    pub linf: f64,
    pub percentage_max: f64,
}

/// Differences between a numerical and an exact state on interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub l2: f64,
    pub linf: f64,
    pub percentage_max: f64,
    pub per_component: Vec<ComponentError>,
}

/// Percentages `100 |numeric - exact| / max|exact|` per component.
#[derive(Debug, Clone, PartialEq)]
pub struct PercentageError {
    pub per_node: Vec<Vec<f64>>,
    pub per_component_max: Vec<f64>,
    pub max: f64,
}

fn component_scales(exact: &FieldState) -> Vec<f64> {
    exact.values().iter().map(|c| linf_norm(&[c])).collect()
}

pub fn percentage_error(numeric: &FieldState, exact: &FieldState) -> Result<PercentageError> {
    let diff = numeric.difference(exact)?;
    let scales = component_scales(exact);
    if let Some(n) = scales.iter().position(|s| *s == 0.0) {
        return Err(Error::param("exact", format!("component {} is identically zero", n + 1)));
    }
    let per_node: Vec<Vec<f64>> =
        diff.iter().zip(&scales).map(|(d, s)| d.iter().map(|v| 100.0 * v.abs() / s).collect()).collect();
    let per_component_max: Vec<f64> = per_node.iter().map(|c| linf_norm(&[c])).collect();
    let max = per_component_max.iter().cloned().fold(0.0, f64::max);
    Ok(PercentageError { per_node, per_component_max, max })
}

pub fn error_report(numeric: &FieldState, exact: &FieldState, grid: &Grid) -> Result<ErrorReport> {
    error_report_with_margin(numeric, exact, grid, INTERIOR_MARGIN)
}

/// Norms of `numeric - exact` over nodes at least `margin` from each end.
/// Percentages are normalized by the maximum of the exact component over
/// the whole grid; a zero exact component gives 0 or infinity.
pub fn error_report_with_margin(
    numeric: &FieldState,
    exact: &FieldState,
    grid: &Grid,
    margin: usize,
) -> Result<ErrorReport> {
    let diff = numeric.difference(exact)?;
    if numeric.len() != grid.point_count() {
        return Err(Error::ShapeMismatch(format!(
            "state has {} nodes, grid {}",
            numeric.len(),
            grid.point_count()
        )));
    }
    let range = grid.interior(margin);
    if range.is_empty() {
        return Err(Error::param("margin", format!("{margin} leaves no interior nodes")));
    }
    let scales = component_scales(exact);
    let per_component: Vec<ComponentError> = diff
        .iter()
        .zip(&scales)
        .map(|(d, s)| {
            let d = &d[range.clone()];
            let linf = linf_norm(&[d]);
            let percentage_max = if *s > 0.0 {
                100.0 * linf / s
            } else if linf == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            ComponentError { l2: l2_norm(&[d], grid.h()), linf, percentage_max }
        })
        .collect();
    let interior: Vec<&[f64]> = diff.iter().map(|d| &d[range.clone()]).collect();
    Ok(ErrorReport {
        l2: l2_norm(&interior, grid.h()),
        linf: linf_norm(&interior),
        percentage_max: per_component.iter().map(|c| c.percentage_max).fold(0.0, f64::max),
        per_component,
    })
}
