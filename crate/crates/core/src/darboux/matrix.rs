use std::ops::{Add, Mul, Neg, Sub};

/// Dense 2x2 matrix over any ring-like element (complex numbers or jets).
#[derive(Debug, Clone, PartialEq)]
pub struct Mat2<E> {
    pub m: [[E; 2]; 2],
}

impl<E: Clone> Mat2<E> {
    pub fn new(m11: E, m12: E, m21: E, m22: E) -> Self {
        Mat2 { m: [[m11, m12], [m21, m22]] }
    }

    pub fn map<G>(&self, f: impl Fn(&E) -> G) -> Mat2<G> {
        Mat2 { m: [[f(&self.m[0][0]), f(&self.m[0][1])], [f(&self.m[1][0]), f(&self.m[1][1])]] }
    }

    pub fn entries(&self) -> [&E; 4] {
        [&self.m[0][0], &self.m[0][1], &self.m[1][0], &self.m[1][1]]
    }
}

impl<E: Clone + Neg<Output = E>> Mat2<E> {
    /// `sigma3 M sigma3`: flips the sign of the off-diagonal entries.
    pub fn sigma3_conj(&self) -> Self {
        Mat2::new(self.m[0][0].clone(), -self.m[0][1].clone(), -self.m[1][0].clone(), self.m[1][1].clone())
    }

    /// `sigma3 M`: flips the sign of the second row.
    pub fn sigma3_left(&self) -> Self {
        Mat2::new(self.m[0][0].clone(), self.m[0][1].clone(), -self.m[1][0].clone(), -self.m[1][1].clone())
    }
}

impl<E: Clone + Add<Output = E>> Add for &Mat2<E> {
    type Output = Mat2<E>;
    fn add(self, o: &Mat2<E>) -> Mat2<E> {
        let s = |i: usize, j: usize| self.m[i][j].clone() + o.m[i][j].clone();
        Mat2::new(s(0, 0), s(0, 1), s(1, 0), s(1, 1))
    }
}

impl<E: Clone + Sub<Output = E>> Sub for &Mat2<E> {
    type Output = Mat2<E>;
    fn sub(self, o: &Mat2<E>) -> Mat2<E> {
        let s = |i: usize, j: usize| self.m[i][j].clone() - o.m[i][j].clone();
        Mat2::new(s(0, 0), s(0, 1), s(1, 0), s(1, 1))
    }
}

impl<E: Clone + Add<Output = E> + Mul<Output = E>> Mul for &Mat2<E> {
    type Output = Mat2<E>;
    fn mul(self, o: &Mat2<E>) -> Mat2<E> {
        let p = |i: usize, j: usize| {
            self.m[i][0].clone() * o.m[0][j].clone() + self.m[i][1].clone() * o.m[1][j].clone()
        };
        Mat2::new(p(0, 0), p(0, 1), p(1, 0), p(1, 1))
    }
}
