use thiserror::Error;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad input: ranges, names, shapes.
    Validation,
    /// A closed form or transformation hit a vanishing denominator.
    Pole,
    /// The integrator was asked to run unstably or produced non-finite values.
    Instability,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown system preset `{0}` (known: kdv-scalar, kdv-mkdv-3)")]
    UnknownPreset(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("pole at x = {x}, t = {t}: |{what}| = {magnitude:e} is below {threshold:e}")]
    Pole { what: &'static str, x: f64, t: f64, magnitude: f64, threshold: f64 },

    #[error("singularity of the {what} between x = {x_left} and x = {x_right} at t = {t}")]
    PoleBetweenNodes { what: &'static str, x_left: f64, x_right: f64, t: f64 },

    #[error("division by zero in {stage}: |{what}| = {magnitude:e} is below {threshold:e}")]
    DivisionByZero { stage: &'static str, what: &'static str, magnitude: f64, threshold: f64 },

    #[error("component {component} is not real at x = {x}: imaginary part {imag:e}")]
    NotReal { component: usize, x: f64, imag: f64 },

    #[error("potentials do not satisfy the reduction f12 = f21, u11 = u22, u12 = u21")]
    NotReduced,

    #[error("paired entry {entry} differs by {difference:e} (scale {scale:e}) after the compound transformation")]
    ReductionMismatch { entry: &'static str, difference: f64, scale: f64 },

    #[error("non-finite value in component {component} at node {node}, t = {t}")]
    NonFinite { component: usize, node: usize, t: f64 },

    #[error("time step {tau:e} exceeds the stability limit {tau_max:e} (a_max = {a_max})")]
    UnstableStep { tau: f64, tau_max: f64, a_max: f64 },

    #[error("stability limit is undefined: a_max = {a_max} does not exceed 2X = {two_x}")]
    NoStableStep { a_max: f64, two_x: f64 },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidGrid(_)
            | Error::UnknownPreset(_)
            | Error::InvalidParameter { .. }
            | Error::ShapeMismatch(_)
            | Error::NotReal { .. }
            | Error::NotReduced => ErrorCategory::Validation,
            Error::Pole { .. }
            | Error::PoleBetweenNodes { .. }
            | Error::DivisionByZero { .. }
            | Error::ReductionMismatch { .. } => ErrorCategory::Pole,
            Error::NonFinite { .. } | Error::UnstableStep { .. } | Error::NoStableStep { .. } => {
                ErrorCategory::Instability
            }
        }
    }

    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.to_string(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
