//! Scalars over the three real division algebras.
//!
//! Every scalar is stored as a quaternion `w + xi + yj + zk`. Reals and
//! complex numbers are the sub-algebras `x = y = z = 0` and `y = z = 0`, so
//! a single arithmetic path serves all three fields and a [`Field`] tag
//! records which sub-algebra a value is meant to live in.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// The field (or skew field) of matrix entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    R,
    C,
    H,
}

impl Field {
    /// Number of real components of a scalar.
    pub fn dim(self) -> usize {
        match self {
            Field::R => 1,
            Field::C => 2,
            Field::H => 4,
        }
    }

    /// The smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        self.max(other)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Field::R => "R",
            Field::C => "C",
            Field::H => "H",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl std::str::FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R" | "r" => Ok(Field::R),
            "C" | "c" => Ok(Field::C),
            "H" | "h" => Ok(Field::H),
            other => Err(format!("unknown field `{other}` (expected R, C or H)")),
        }
    }
}

/// A quaternion `w + xi + yj + zk`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const ZERO: Quat = Quat::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quat = Quat::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quat = Quat::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quat = Quat::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quat = Quat::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quat { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quat::new(w, 0.0, 0.0, 0.0)
    }

    pub const fn complex(re: f64, im: f64) -> Self {
        Quat::new(re, im, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    /// `|q|^2 = q * conj(q)`.
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            None
        } else {
            Some(self.conj() * (1.0 / n2))
        }
    }

    pub fn components(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_components(c: [f64; 4]) -> Self {
        Quat::new(c[0], c[1], c[2], c[3])
    }

    /// Drops the components that do not belong to `field`.
    pub fn restrict(self, field: Field) -> Self {
        match field {
            Field::R => Quat::real(self.w),
            Field::C => Quat::complex(self.w, self.x),
            Field::H => self,
        }
    }

    /// Size of the components outside `field`.
    pub fn off_field(self, field: Field) -> f64 {
        match field {
            Field::R => (self.x * self.x + self.y * self.y + self.z * self.z).sqrt(),
            Field::C => (self.y * self.y + self.z * self.z).sqrt(),
            Field::H => 0.0,
        }
    }

    /// Smallest field containing this value (exact test).
    pub fn field(self) -> Field {
        if self.y != 0.0 || self.z != 0.0 {
            Field::H
        } else if self.x != 0.0 {
            Field::C
        } else {
            Field::R
        }
    }

    /// Complex-pair split `q = a + b j` with `a, b` in span{1, i}.
    pub fn split(self) -> ((f64, f64), (f64, f64)) {
        ((self.w, self.x), (self.y, self.z))
    }

    /// Inverse of [`Quat::split`].
    pub fn join((ar, ai): (f64, f64), (br, bi): (f64, f64)) -> Self {
        Quat::new(ar, ai, br, bi)
    }

    /// Unit quaternion in the direction of `self`, `None` for (near) zero.
    pub fn unit(self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            None
        } else {
            Some(self * (1.0 / n))
        }
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, r: Quat) -> Quat {
        Quat::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl AddAssign for Quat {
    fn add_assign(&mut self, r: Quat) {
        *self = *self + r;
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, r: Quat) -> Quat {
        Quat::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl SubAssign for Quat {
    fn sub_assign(&mut self, r: Quat) {
        *self = *self - r;
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quat {
    type Output = Quat;
    // Hamilton product, i^2 = j^2 = k^2 = ijk = -1.
    fn mul(self, r: Quat) -> Quat {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (r.w, r.x, r.y, r.z);
        Quat::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl MulAssign for Quat {
    fn mul_assign(&mut self, r: Quat) {
        *self = *self * r;
    }
}

impl Mul<f64> for Quat {
    type Output = Quat;
    fn mul(self, s: f64) -> Quat {
        Quat::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quat> for f64 {
    type Output = Quat;
    fn mul(self, q: Quat) -> Quat {
        q * self
    }
}

impl Div<f64> for Quat {
    type Output = Quat;
    fn div(self, s: f64) -> Quat {
        Quat::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl From<f64> for Quat {
    fn from(w: f64) -> Self {
        Quat::real(w)
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.w)?;
        for (v, unit) in [(self.x, "i"), (self.y, "j"), (self.z, "k")] {
            if v != 0.0 {
                if v < 0.0 {
                    write!(f, " - {}{unit}", -v)?;
                } else {
                    write!(f, " + {v}{unit}")?;
                }
            }
        }
        Ok(())
    }
}
