use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point or direction in the plane or in space.
///
/// Coordinates beyond `dim` are kept at zero, so planar vectors can use the
/// spatial cross product when convenient.
#[derive(Clone, Copy, PartialEq)]
pub struct Vector {
    c: [f64; 3],
    dim: usize,
}

impl Vector {
    pub fn xy(x: f64, y: f64) -> Self {
        Self {
            c: [x, y, 0.0],
            dim: 2,
        }
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Self { c: [x, y, z], dim: 3 }
    }

    pub fn zero(dim: usize) -> Self {
        Self { c: [0.0; 3], dim }
    }

    /// The `i`-th standard basis vector.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.c[i] = 1.0;
        v
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        match *coords {
            [x, y] => Ok(Self::xy(x, y)),
            [x, y, z] => Ok(Self::xyz(x, y, z)),
            _ => Err(Error::UnsupportedDimension(coords.len())),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    #[inline]
    pub fn dot(&self, other: &Vector) -> f64 {
        self.c[0] * other.c[0] + self.c[1] * other.c[1] + self.c[2] * other.c[2]
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.c.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        (*self - *other).norm()
    }

    /// Spatial cross product; for planar inputs only the third component is nonzero.
    pub fn cross(&self, o: &Vector) -> Vector {
        Vector {
            c: [
                self.c[1] * o.c[2] - self.c[2] * o.c[1],
                self.c[2] * o.c[0] - self.c[0] * o.c[2],
                self.c[0] * o.c[1] - self.c[1] * o.c[0],
            ],
            dim: 3,
        }
    }

    /// Planar determinant `x1*y2 - y1*x2`.
    pub fn perp_dot(&self, o: &Vector) -> f64 {
        self.c[0] * o.c[1] - self.c[1] * o.c[0]
    }

    /// Counterclockwise rotation by 90 degrees (planar only).
    pub fn rot90(&self) -> Vector {
        Vector::xy(-self.c[1], self.c[0])
    }

    /// Unit vector in the same direction.
    pub fn normalized(&self) -> Result<Vector> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(*self / n)
    }

    /// Like [`Vector::normalized`] but leaves vectors that are already unit to
    /// within `1e-15` untouched, so unit inputs round-trip bit for bit.
    pub fn unitize(&self) -> Result<Vector> {
        let n = self.norm();
        if (n - 1.0).abs() <= 1e-15 {
            Ok(*self)
        } else {
            self.normalized()
        }
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    /// Same ambient dimension as `self`, other coordinates from a spatial vector.
    pub(crate) fn with_dim(mut self, dim: usize) -> Vector {
        self.dim = dim;
        if dim == 2 {
            self.c[2] = 0.0;
        }
        self
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.c[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, o: Vector) -> Vector {
        Vector {
            c: [self.c[0] + o.c[0], self.c[1] + o.c[1], self.c[2] + o.c[2]],
            dim: self.dim.max(o.dim),
        }
    }
}

impl AddAssign for Vector {
    fn add_assign(&mut self, o: Vector) {
        *self = *self + o;
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, o: Vector) -> Vector {
        Vector {
            c: [self.c[0] - o.c[0], self.c[1] - o.c[1], self.c[2] - o.c[2]],
            dim: self.dim.max(o.dim),
        }
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector {
            c: [-self.c[0], -self.c[1], -self.c[2]],
            dim: self.dim,
        }
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        Vector {
            c: [self.c[0] * s, self.c[1] * s, self.c[2] * s],
            dim: self.dim,
        }
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;
    fn mul(self, v: Vector) -> Vector {
        v * self
    }
}

impl Div<f64> for Vector {
    type Output = Vector;
    fn div(self, s: f64) -> Vector {
        Vector {
            c: [self.c[0] / s, self.c[1] / s, self.c[2] / s],
            dim: self.dim,
        }
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords()).finish()
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Vector::from_slice(&coords).map_err(serde::de::Error::custom)
    }
}
