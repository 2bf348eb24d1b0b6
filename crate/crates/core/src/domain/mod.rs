//! Grids, field states, coefficient tensors and named system presets.

mod coefficients;
mod grid;
mod state;

pub use coefficients::{
    preset_system, validate_coefficients, validate_terms, CoefficientDiagnostics, CoefficientSet,
    SystemPreset, Term, PRESET_NAMES, TERM_TYPES,
};
pub use grid::{build_grid, Grid, MIN_POINTS};
pub use state::FieldState;
