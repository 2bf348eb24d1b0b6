use num_complex::Complex;

use super::potentials::{MatrixPotentials, SpectralSolutionPair};
use crate::closed_forms::{seed_jets, ClosedFormParams};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::real::{cabs, lift, Real};

/// Division-by-zero threshold on the pair component that the transformation
/// divides by.
pub const DEFAULT_DIVISION_THRESHOLD: f64 = 1e-12;

/// Coefficients of the first elementary transformation.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstDtCoefficients<T: Real> {
    /// `-(phi1_x + f12 phi2 / 2) / phi1`
    pub eps11: Jet<T>,
    /// `f12 / 2`
    pub eps12: Jet<T>,
    /// `-phi2 / phi1`
    pub eps21: Jet<T>,
}

/// Coefficients of the second elementary transformation, named as the
/// index-swapped counterparts of [`FirstDtCoefficients`].
#[derive(Debug, Clone, PartialEq)]
pub struct SecondDtCoefficients<T: Real> {
    /// `-(phi2_x + f21 phi1 / 2) / phi2`
    pub eps22: Jet<T>,
    /// `-phi1 / phi2`
    pub eps12: Jet<T>,
    /// `f21 / 2`
    pub eps21: Jet<T>,
}

/// New potentials, the transformed target pair and the coefficients used.
#[derive(Debug, Clone, PartialEq)]
pub struct DtOutput<T: Real, C> {
    pub potentials: MatrixPotentials<T>,
    pub target: SpectralSolutionPair<T>,
    pub coefficients: C,
}

fn first_dt<T: Real>(
    pots: &MatrixPotentials<T>,
    pair: &SpectralSolutionPair<T>,
    target: &SpectralSolutionPair<T>,
    stage: &'static str,
    denominator_name: &'static str,
    threshold: f64,
) -> Result<DtOutput<T, FirstDtCoefficients<T>>> {
    let (phi1, phi2) = (&pair.phi1, &pair.phi2);
    let magnitude = cabs(phi1.value()).to_f64();
    if !(magnitude >= threshold) {
        return Err(Error::DivisionByZero { stage, what: denominator_name, magnitude, threshold });
    }
    let MatrixPotentials { f12, f21, u11, u12, u22, .. } = pots;

    let eps11 = -(&(&phi1.dx() + &(f12 * phi2).scale_real(0.5)) / phi1);
    let eps12 = f12.scale_real(0.5);
    let eps21 = -(phi2 / phi1);

    // Listed order matters: later entries consume earlier tilded ones.
    let nf12 = u12 + &(f12 * &eps11);
    let nf21 = eps21.scale_real(-2.0);
    let nu11 = &(&(u11 - &eps11.dx().scale_real(2.0)) - &(&nf12 * &eps21)) - &(f21 * &eps12);
    let nu12 = &(&(&u12.dx() - &eps12.dx().dx()) + &(&eps11 * u12)) - &(&eps12 * &(&nu11 + u22));
    let nu21 = &(f21 - &eps21.dx().scale_real(2.0)) - &(&nf21 * &eps11);
    let nu22 = &(&(u22 - &(&eps21 * u12)) - &(&nu21 * &eps12)) - &(&nf21 * &eps12.dx());

    let (p3, p4) = (&target.phi1, &target.phi2);
    let t1 = &(&p3.dx() + &(&eps11 * p3)) + &(&eps12 * p4);
    let t2 = p4 + &(&eps21 * p3);

    Ok(DtOutput {
        potentials: MatrixPotentials::new(nf12, nf21, nu11, nu12, nu21, nu22),
        target: SpectralSolutionPair::new(t1, t2, target.lambda.clone()),
        coefficients: FirstDtCoefficients { eps11, eps12, eps21 },
    })
}

fn swap_pair<T: Real>(p: &SpectralSolutionPair<T>) -> SpectralSolutionPair<T> {
    SpectralSolutionPair::new(p.phi2.clone(), p.phi1.clone(), -p.lambda.clone())
}

/// First elementary Darboux transformation (divides by `phi1`).
pub fn dt1_transform<T: Real>(
    pots: &MatrixPotentials<T>,
    pair: &SpectralSolutionPair<T>,
    target: &SpectralSolutionPair<T>,
) -> Result<DtOutput<T, FirstDtCoefficients<T>>> {
    first_dt(pots, pair, target, "first elementary transformation", "phi1", DEFAULT_DIVISION_THRESHOLD)
}

/// Second elementary Darboux transformation: the first one with indices
/// 1 and 2 exchanged on potentials, pair and target (divides by `phi2`).
pub fn dt2_transform<T: Real>(
    pots: &MatrixPotentials<T>,
    pair: &SpectralSolutionPair<T>,
    target: &SpectralSolutionPair<T>,
) -> Result<DtOutput<T, SecondDtCoefficients<T>>> {
    let out = first_dt(
        &pots.swap_indices(),
        &swap_pair(pair),
        &swap_pair(target),
        "second elementary transformation",
        "phi2",
        DEFAULT_DIVISION_THRESHOLD,
    )?;
    let FirstDtCoefficients { eps11, eps12, eps21 } = out.coefficients;
    Ok(DtOutput {
        potentials: out.potentials.swap_indices(),
        target: swap_pair(&out.target),
        coefficients: SecondDtCoefficients { eps22: eps11, eps12: eps21, eps21: eps12 },
    })
}

/// Solution at `-lambda` obtained from one at `lambda` through the
/// sigma1 automorphism; requires reduced potentials.
pub fn automorphism_pair<T: Real>(
    pair: &SpectralSolutionPair<T>,
    pots: &MatrixPotentials<T>,
) -> Result<SpectralSolutionPair<T>> {
    if !pots.is_reduced() {
        return Err(Error::NotReduced);
    }
    Ok(swap_pair(pair))
}

/// Jet length used for the seed pair of the compound transformation; leaves
/// value and first derivative on every output entry.
pub const COMPOUND_SEED_LEN: usize = 5;

/// Seed pair as a [`SpectralSolutionPair`] with `len - 1` derivatives.
pub fn seed_solution_pair<T: Real>(p: &ClosedFormParams, x: T, t: T, len: usize) -> SpectralSolutionPair<T> {
    let (phi1, phi2) = seed_jets(p, x, t, len);
    let a: Complex<T> = lift(p.a);
    SpectralSolutionPair::new(phi1, phi2, a.clone() * a)
}

/// Everything produced by the compound chain, before the reduction is
/// imposed on the output.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundChain<T: Real> {
    pub seed: SpectralSolutionPair<T>,
    pub first: DtOutput<T, FirstDtCoefficients<T>>,
    pub second: DtOutput<T, SecondDtCoefficients<T>>,
}

/// First transformation with the seed pair, acting on its automorphic image;
/// second transformation with the transformed image.
pub fn compound_dt_chain<T: Real>(p: &ClosedFormParams, x: T, t: T) -> Result<CompoundChain<T>> {
    let zero = MatrixPotentials::zero(COMPOUND_SEED_LEN + 2);
    let seed = seed_solution_pair(p, x, t, COMPOUND_SEED_LEN);
    let image = automorphism_pair(&seed, &zero)?;
    let first = dt1_transform(&zero, &seed, &image)?;
    let second = dt2_transform(&first.potentials, &first.target, &first.target)?;
    Ok(CompoundChain { seed, first, second })
}

/// Relative tolerance on paired entries before the reduction is imposed.
pub const REDUCTION_TOLERANCE: f64 = 1e-9;

/// Compound transformation of the zero seed. Paired entries of the chain
/// output are checked to agree and the result is returned in reduced form,
/// so `f12 = f21`, `u11 = u22` and `u12 = u21` hold bit for bit.
pub fn compound_dt_zero_seed<T: Real>(p: &ClosedFormParams, x: T, t: T) -> Result<MatrixPotentials<T>> {
    let raw = compound_dt_chain(p, x, t)?.second.potentials;
    let natural = p.a.norm().max(p.a.norm_sqr());
    for (entry, a, b) in [("f12/f21", &raw.f12, &raw.f21), ("u11/u22", &raw.u11, &raw.u22), ("u12/u21", &raw.u12, &raw.u21)] {
        let difference = cabs(&(a.value().clone() - b.value().clone())).to_f64();
        let scale = a.abs_value().max(b.abs_value()).max(natural);
        if !(difference <= REDUCTION_TOLERANCE * scale) {
            return Err(Error::ReductionMismatch { entry, difference, scale });
        }
    }
    Ok(MatrixPotentials::reduced(raw.f12, raw.u11, raw.u12))
}
