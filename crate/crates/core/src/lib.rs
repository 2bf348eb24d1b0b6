//! Numerical laboratory for coupled KdV-MKdV systems.
//!
//! * [`domain`]: grids, field states, coefficient tensors, presets.
//! * [`closed_forms`]: exact solutions generated from the zero seed.
//! * [`darboux`]: elementary Darboux transformations and Lax-pair residuals.
//! * [`family`]: named exact solutions sampled on grids.
//! * [`scheme`]: explicit finite-difference integrator with stability guard.
//! * [`harness`]: norms, PDE residuals and convergence studies.

pub mod closed_forms;
pub mod darboux;
pub mod domain;
pub mod error;
pub mod family;
pub mod fd;
pub mod harness;
pub mod jet;
pub mod real;
pub mod scheme;

pub use domain::{build_grid, preset_system, CoefficientSet, FieldState, Grid, SystemPreset};
pub use error::{Error, ErrorCategory, Result};
