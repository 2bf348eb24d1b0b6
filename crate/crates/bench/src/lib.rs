//! Shared fixtures for the criterion benches.

use kmkdv_core::family::{sample_on_grid, Family};
use kmkdv_core::{build_grid, preset_system, CoefficientSet, FieldState, Grid};

/// The coupled preset with r-family data on `[-20, 20]` at spacing `h`.
pub fn coupled_fixture(h: f64) -> (CoefficientSet, Grid, FieldState) {
    let coeffs = preset_system("kdv-mkdv-3").expect("preset").coefficients;
    let grid = build_grid(-20.0, 20.0, h).expect("grid");
    let family = Family::r_family(1.0, 0.5).expect("family");
    let state = sample_on_grid(&family, &grid, 0.0).expect("sample");
    (coeffs, grid, state)
}
