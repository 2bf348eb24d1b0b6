use crate::error::{Error, Result};

/// Uniform one-dimensional mesh. Node `k` sits at exactly `x_min + k*h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x_min: f64,
    h: f64,
    point_count: usize,
}

/// Smallest mesh that can host the five-point dispersion stencil.
pub const MIN_POINTS: usize = 5;

impl Grid {
    /// Mesh covering `[x_min, x_max]` with spacing `h`; the node count is
    /// `round((x_max - x_min)/h) + 1`.
    pub fn new(x_min: f64, x_max: f64, h: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && h.is_finite()) {
            return Err(Error::InvalidGrid("bounds and spacing must be finite".into()));
        }
        if h <= 0.0 {
            return Err(Error::InvalidGrid(format!("spacing h = {h} must be positive")));
        }
        if x_max <= x_min {
            return Err(Error::InvalidGrid(format!("x_max = {x_max} must exceed x_min = {x_min}")));
        }
        let steps = ((x_max - x_min) / h).round();
        if steps < (MIN_POINTS - 1) as f64 {
            return Err(Error::InvalidGrid(format!(
                "domain [{x_min}, {x_max}] holds fewer than {MIN_POINTS} nodes at h = {h}"
            )));
        }
        Self::from_parts(x_min, h, steps as usize + 1)
    }

    /// Rebuild a mesh from its defining triple; inverse of the accessors.
    pub fn from_parts(x_min: f64, h: f64, point_count: usize) -> Result<Self> {
        if !(x_min.is_finite() && h.is_finite()) || h <= 0.0 {
            return Err(Error::InvalidGrid(format!("x_min = {x_min}, h = {h}")));
        }
        if point_count < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "{point_count} nodes, at least {MIN_POINTS} required"
            )));
        }
        Ok(Grid { x_min, h, point_count })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    /// Coordinate of the last node.
    pub fn x_max(&self) -> f64 {
        self.x(self.point_count - 1)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.point_count).map(|k| self.x(k)).collect()
    }

    /// Indices at least `margin` nodes away from both ends.
    pub fn interior(&self, margin: usize) -> std::ops::Range<usize> {
        let lo = margin.min(self.point_count);
        let hi = self.point_count.saturating_sub(margin).max(lo);
        lo..hi
    }
}

/// Free-function form of [`Grid::new`].
pub fn build_grid(x_min: f64, x_max: f64, h: f64) -> Result<Grid> {
    Grid::new(x_min, x_max, h)
}
