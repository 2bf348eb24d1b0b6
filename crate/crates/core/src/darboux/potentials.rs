use num_complex::Complex;
use num_traits::Zero;

use super::matrix::Mat2;
use crate::jet::Jet;
use crate::real::{cabs, Real};

/// Potentials `F` (zero diagonal) and `U` of the spectral problem
/// `Psi_xx + F Psi_x + U Psi = lambda sigma3 Psi`, each entry carrying its
/// x-derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPotentials<T: Real> {
    pub f12: Jet<T>,
    pub f21: Jet<T>,
    pub u11: Jet<T>,
    pub u12: Jet<T>,
    pub u21: Jet<T>,
    pub u22: Jet<T>,
    reduced: bool,
}

impl<T: Real> MatrixPotentials<T> {
    /// General potentials; the reduction flag is left unset.
    pub fn new(f12: Jet<T>, f21: Jet<T>, u11: Jet<T>, u12: Jet<T>, u21: Jet<T>, u22: Jet<T>) -> Self {
        MatrixPotentials { f12, f21, u11, u12, u21, u22, reduced: false }
    }

    /// Potentials obeying `f12 = f21 = f`, `u11 = u22 = u`, `u12 = u21 = v`.
    pub fn reduced(f: Jet<T>, u: Jet<T>, v: Jet<T>) -> Self {
        MatrixPotentials {
            f12: f.clone(),
            f21: f,
            u11: u.clone(),
            u12: v.clone(),
            u21: v,
            u22: u,
            reduced: true,
        }
    }

    /// Zero seed with `len - 1` (vanishing) derivatives.
    pub fn zero(len: usize) -> Self {
        let z = Jet::zero(len);
        Self::reduced(z.clone(), z.clone(), z)
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Bit-level check of the reduction on every stored derivative.
    pub fn satisfies_reduction_exactly(&self) -> bool {
        self.f12 == self.f21 && self.u11 == self.u22 && self.u12 == self.u21
    }

    /// Relabel component indices 1 <-> 2.
    pub fn swap_indices(&self) -> Self {
        MatrixPotentials {
            f12: self.f21.clone(),
            f21: self.f12.clone(),
            u11: self.u22.clone(),
            u12: self.u21.clone(),
            u21: self.u12.clone(),
            u22: self.u11.clone(),
            reduced: self.reduced,
        }
    }

    /// Point values as matrices.
    pub fn values(&self) -> PotentialMatrices<T> {
        self.derivative_matrices(0)
    }

    /// `k`-th x-derivative of `F` and `U`.
    pub fn derivative_matrices(&self, k: usize) -> PotentialMatrices<T> {
        let z = Complex::zero();
        PotentialMatrices {
            f: Mat2::new(z.clone(), self.f12.deriv(k).clone(), self.f21.deriv(k).clone(), z),
            u: Mat2::new(
                self.u11.deriv(k).clone(),
                self.u12.deriv(k).clone(),
                self.u21.deriv(k).clone(),
                self.u22.deriv(k).clone(),
            ),
        }
    }

    /// Shortest jet length among the entries.
    pub fn len(&self) -> usize {
        [&self.f12, &self.f21, &self.u11, &self.u12, &self.u21, &self.u22]
            .iter()
            .map(|j| j.len())
            .min()
            .unwrap_or(1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `F` and `U` at a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialMatrices<T: Real> {
    pub f: Mat2<Complex<T>>,
    pub u: Mat2<Complex<T>>,
}

impl<T: Real> PotentialMatrices<T> {
    pub fn zero() -> Self {
        let z = Complex::zero();
        let m = Mat2::new(z.clone(), z.clone(), z.clone(), z);
        PotentialMatrices { f: m.clone(), u: m }
    }

    /// The six independent entries `(f12, f21, u11, u12, u21, u22)`.
    pub fn to_vec(&self) -> Vec<Complex<T>> {
        vec![
            self.f.m[0][1].clone(),
            self.f.m[1][0].clone(),
            self.u.m[0][0].clone(),
            self.u.m[0][1].clone(),
            self.u.m[1][0].clone(),
            self.u.m[1][1].clone(),
        ]
    }

    pub fn from_slice(v: &[Complex<T>]) -> Self {
        let z = Complex::zero();
        PotentialMatrices {
            f: Mat2::new(z.clone(), v[0].clone(), v[1].clone(), z),
            u: Mat2::new(v[2].clone(), v[3].clone(), v[4].clone(), v[5].clone()),
        }
    }
}

/// A solution `(phi1, phi2)` of the spectral problem at `lambda`, with
/// x-derivatives (at least two are needed to check the equation).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSolutionPair<T: Real> {
    pub phi1: Jet<T>,
    pub phi2: Jet<T>,
    pub lambda: Complex<T>,
}

impl<T: Real> SpectralSolutionPair<T> {
    pub fn new(phi1: Jet<T>, phi2: Jet<T>, lambda: Complex<T>) -> Self {
        SpectralSolutionPair { phi1, phi2, lambda }
    }

    /// Largest component magnitude of
    /// `Psi_xx + F Psi_x + U Psi - lambda sigma3 Psi`.
    pub fn spectral_residual(&self, pots: &MatrixPotentials<T>) -> f64 {
        let (p1, p2) = (&self.phi1, &self.phi2);
        let v = |j: &Jet<T>| j.value().clone();
        let r1 = p1.deriv(2).clone()
            + v(&pots.f12) * p2.deriv(1).clone()
            + v(&pots.u11) * p1.value().clone()
            + v(&pots.u12) * p2.value().clone()
            - self.lambda.clone() * p1.value().clone();
        let r2 = p2.deriv(2).clone()
            + v(&pots.f21) * p1.deriv(1).clone()
            + v(&pots.u21) * p1.value().clone()
            + v(&pots.u22) * p2.value().clone()
            + self.lambda.clone() * p2.value().clone();
        cabs(&r1).to_f64().max(cabs(&r2).to_f64())
    }
}
