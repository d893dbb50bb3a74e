//! Complex 2×2 matrices, just enough for products of transfer matrices.

use num_complex::Complex64;
use std::ops::Mul;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        c: Complex64::new(0.0, 0.0),
        d: Complex64::new(1.0, 0.0),
    };

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    /// `[[z − v, −1], [1, 0]]`.
    pub fn transfer(z: Complex64, v: f64) -> Self {
        Self::new(z - v, (-1.0).into(), 1.0.into(), 0.0.into())
    }

    /// Inverse of [`Mat2::transfer`], `[[0, 1], [−1, z − v]]`.
    pub fn transfer_inverse(z: Complex64, v: f64) -> Self {
        Self::new(0.0.into(), 1.0.into(), (-1.0).into(), z - v)
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 {
            return None;
        }
        Some(Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn frobenius(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    /// Largest singular value,
    /// `σ² = (f² + sqrt(f⁴ − 4|det|²)) / 2` with `f` the Frobenius norm.
    pub fn spectral_norm(&self) -> f64 {
        let s = self.max_abs();
        if s == 0.0 || !s.is_finite() {
            return s;
        }
        let m = self.scale(1.0 / s);
        let f2 = m.a.norm_sqr() + m.b.norm_sqr() + m.c.norm_sqr() + m.d.norm_sqr();
        let det = m.det().norm();
        let disc = ((f2 - 2.0 * det) * (f2 + 2.0 * det)).max(0.0);
        s * ((f2 + disc.sqrt()) / 2.0).sqrt()
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::IDENTITY;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|x| x.is_finite())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}
