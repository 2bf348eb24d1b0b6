//! Verification layer: error norms, residuals of exact solutions against
//! their governing equations, and convergence-order studies.

mod convergence;
mod norms;
mod residual;

pub use convergence::{
    convergence_study, observed_order, run_level, temporal_self_convergence, ConvergenceRow, ConvergenceTable,
    LevelResult, StudySetup, TauPolicy,
};
pub use norms::{
    error_report, error_report_with_margin, l2_norm, linf_norm, percentage_error, ComponentError, ErrorReport,
    PercentageError, INTERIOR_MARGIN,
};
pub use residual::{
    continuous_rhs, pde_residual, point_lattice, two_component_residuals, Derivatives, PointResidual,
    ResidualOptions, ResidualReport,
};
