use crate::domain::grid::Grid;
use crate::error::{Error, Result};

/// `N` real components sampled on a grid at one time level.
///
/// Shape is fixed at construction and every value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    t: f64,
    values: Vec<Vec<f64>>,
}

impl FieldState {
    pub fn new(t: f64, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::ShapeMismatch("a field state needs at least one component".into()));
        }
        let len = values[0].len();
        if values.iter().any(|c| c.len() != len) {
            return Err(Error::ShapeMismatch("components have different lengths".into()));
        }
        if !t.is_finite() {
            return Err(Error::param("t", "must be finite"));
        }
        let state = FieldState { t, values };
        state.check_finite()?;
        Ok(state)
    }

    /// Same as [`FieldState::new`] but also checks the length against `grid`.
    pub fn on_grid(grid: &Grid, t: f64, values: Vec<Vec<f64>>) -> Result<Self> {
        let state = Self::new(t, values)?;
        if state.len() != grid.point_count() {
            return Err(Error::ShapeMismatch(format!(
                "state has {} nodes, grid has {}",
                state.len(),
                grid.point_count()
            )));
        }
        Ok(state)
    }

    pub fn zeros(n_components: usize, grid: &Grid, t: f64) -> Result<Self> {
        Self::new(t, vec![vec![0.0; grid.point_count()]; n_components])
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n_components(&self) -> usize {
        self.values.len()
    }

    /// Number of nodes per component.
    pub fn len(&self) -> usize {
        self.values[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Component `n`, 0-based.
    pub fn component(&self, n: usize) -> &[f64] {
        &self.values[n]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Vec<f64>> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Component-wise difference `self - other`.
    pub fn difference(&self, other: &FieldState) -> Result<Vec<Vec<f64>>> {
        self.check_same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect())
    }

    pub fn check_same_shape(&self, other: &FieldState) -> Result<()> {
        if self.n_components() != other.n_components() || self.len() != other.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.n_components(),
                self.len(),
                other.n_components(),
                other.len()
            )));
        }
        Ok(())
    }

    fn check_finite(&self) -> Result<()> {
        for (n, comp) in self.values.iter().enumerate() {
            if let Some(i) = comp.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { component: n + 1, node: i, t: self.t });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::grid::build_grid;

    #[test]
    fn rejects_ragged_and_non_finite() {
        assert!(FieldState::new(0.0, vec![vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(FieldState::new(0.0, vec![]).is_err());
        let e = FieldState::new(0.5, vec![vec![1.0, f64::NAN]]).unwrap_err();
        assert_eq!(e, Error::NonFinite { component: 1, node: 1, t: 0.5 });
    }

    #[test]
    fn copies_are_independent() {
        let g = build_grid(0.0, 1.0, 0.25).unwrap();
        let a = FieldState::zeros(2, &g, 0.0).unwrap();
        let mut raw = a.clone().into_values();
        raw[0][0] = 1.0;
        let b = FieldState::new(0.0, raw).unwrap();
        assert_ne!(a, b);
        assert_eq!(a.component(0)[0], 0.0);
    }

    #[test]
    fn grid_length_checked() {
        let g = build_grid(0.0, 1.0, 0.25).unwrap();
        assert!(FieldState::on_grid(&g, 0.0, vec![vec![0.0; 4]]).is_err());
        assert!(FieldState::on_grid(&g, 0.0, vec![vec![0.0; 5]]).is_ok());
    }
}
