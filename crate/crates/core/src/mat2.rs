//! Dense 2×2 complex matrices and the Pauli basis.
//!
//! Everything at rank one lives in 2×2 matrices, so a small fixed-size type
//! beats a general linear-algebra dependency. Entries are stored row-major.

use core::ops::{Add, Mul, Neg, Sub};

use crate::{cx, Complex};

/// A 2×2 complex matrix, row-major: `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl Mat2 {
    pub const fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn zero() -> Self {
        Mat2::new(cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0))
    }

    pub fn identity() -> Self {
        Mat2::new(cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0))
    }

    /// diag(x, y)
    pub fn diag(x: Complex, y: Complex) -> Self {
        Mat2::new(x, cx(0.0, 0.0), cx(0.0, 0.0), y)
    }

    pub fn trace(&self) -> Complex {
        self.a + self.d
    }

    pub fn det(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Mat2::new(self.a.conj(), self.b.conj(), self.c.conj(), self.d.conj())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        self.transpose().conj()
    }

    pub fn scale(&self, s: Complex) -> Self {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Inverse by the closed 2×2 formula; `None` when the determinant
    /// magnitude is below `1e-14` relative to the matrix scale.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        let scale = self.norm_inf();
        if det.norm() <= 1e-14 * scale * scale {
            return None;
        }
        let inv = cx(1.0, 0.0) / det;
        Some(Mat2::new(self.d * inv, -self.b * inv, -self.c * inv, self.a * inv))
    }

    /// Max entry magnitude.
    pub fn norm_inf(&self) -> f64 {
        let mut m = self.a.norm();
        for v in [self.b, self.c, self.d] {
            if v.norm() > m {
                m = v.norm();
            }
        }
        m
    }

    pub fn entries(&self) -> [Complex; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2::new(self.a + rhs.a, self.b + rhs.b, self.c + rhs.c, self.d + rhs.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::new(self.a - rhs.a, self.b - rhs.b, self.c - rhs.c, self.d - rhs.d)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(cx(-1.0, 0.0))
    }
}

/// σ₀ = identity.
pub fn sigma0() -> Mat2 {
    Mat2::identity()
}

/// σ₁ = [[0, 1], [1, 0]].
pub fn sigma1() -> Mat2 {
    Mat2::new(cx(0.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0))
}

/// σ₂ = [[0, −i], [i, 0]].
pub fn sigma2() -> Mat2 {
    Mat2::new(cx(0.0, 0.0), cx(0.0, -1.0), cx(0.0, 1.0), cx(0.0, 0.0))
}

/// σ₃ = diag(1, −1).
pub fn sigma3() -> Mat2 {
    Mat2::diag(cx(1.0, 0.0), cx(-1.0, 0.0))
}

/// Elementary matrix E₁₂ (upper right).
pub fn e12() -> Mat2 {
    Mat2::new(cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0))
}

/// Elementary matrix E₂₁ (lower left).
pub fn e21() -> Mat2 {
    Mat2::new(cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0))
}
