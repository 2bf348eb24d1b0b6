//! Elementary Darboux transformations of the second-order matrix spectral
//! problem `Psi_xx + F Psi_x + U Psi = lambda sigma3 Psi`, the sigma1
//! automorphism, the time part of the Lax pair and a finite-difference
//! residual of the compatibility equations.

mod lax;
mod matrix;
mod potentials;
mod transform;

pub use lax::{
    compatibility_matrices, compatibility_residual, lax_time_jets, lax_time_matrices, CompatOptions,
    CompoundDtPotentials, LaxConvention, LaxTimeMatrices, PotentialSampler, RFamilyPotentials,
    ScaledU11, TwoComponentPotentials, ZeroPotentials,
};
pub use matrix::Mat2;
pub use potentials::{MatrixPotentials, PotentialMatrices, SpectralSolutionPair};
pub use transform::{
    automorphism_pair, compound_dt_chain, compound_dt_zero_seed, dt1_transform, dt2_transform,
    seed_solution_pair, CompoundChain, DtOutput, FirstDtCoefficients, SecondDtCoefficients,
    COMPOUND_SEED_LEN, DEFAULT_DIVISION_THRESHOLD, REDUCTION_TOLERANCE,
};
