use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A vector of the ambient Euclidean 3-space (position, momentum or angular
/// momentum depending on context).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const EX: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const EY: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const EZ: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Vec3::new(s[0], s[1], s[2])
    }

    /// Component by index, x = 0, y = 1, z = 2.
    pub fn get(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// A vector of the 4-dimensional ambient space F = E + R e_h, split into its
/// spatial part and its e_h component.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec4 {
    pub v3: Vec3,
    pub h: f64,
}

impl Vec4 {
    pub const ZERO: Vec4 = Vec4 { v3: Vec3::ZERO, h: 0.0 };

    pub const fn new(v3: Vec3, h: f64) -> Self {
        Vec4 { v3, h }
    }

    pub fn from_components(x: f64, y: f64, z: f64, h: f64) -> Self {
        Vec4::new(Vec3::new(x, y, z), h)
    }

    pub fn is_finite(self) -> bool {
        self.v3.is_finite() && self.h.is_finite()
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.v3.x, self.v3.y, self.v3.z, self.h]
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Vec4::from_components(s[0], s[1], s[2], s[3])
    }

    /// Plain Euclidean dot over the 4 ambient coordinates (no zeta weight).
    pub fn ambient_dot(self, o: Vec4) -> f64 {
        self.v3.dot(o.v3) + self.h * o.h
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    fn add(self, o: Vec4) -> Vec4 {
        Vec4::new(self.v3 + o.v3, self.h + o.h)
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    fn sub(self, o: Vec4) -> Vec4 {
        Vec4::new(self.v3 - o.v3, self.h - o.h)
    }
}

impl Mul<f64> for Vec4 {
    type Output = Vec4;
    fn mul(self, s: f64) -> Vec4 {
        Vec4::new(self.v3 * s, self.h * s)
    }
}

impl Mul<Vec4> for f64 {
    type Output = Vec4;
    fn mul(self, v: Vec4) -> Vec4 {
        v * self
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    fn neg(self) -> Vec4 {
        Vec4::new(-self.v3, -self.h)
    }
}

/// Branch marker: zeta = +1 on negative energies (sphere), zeta = -1 on
/// positive energies (two-sheeted hyperboloid).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Signature {
    Elliptic,
    Hyperbolic,
}

impl Signature {
    pub fn zeta(self) -> f64 {
        match self {
            Signature::Elliptic => 1.0,
            Signature::Hyperbolic => -1.0,
        }
    }

    pub fn from_zeta(z: f64) -> Option<Signature> {
        if z == 1.0 {
            Some(Signature::Elliptic)
        } else if z == -1.0 {
            Some(Signature::Hyperbolic)
        } else {
            None
        }
    }
}

/// The zeta-signed metric a.v3 . b.v3 + zeta a.h b.h.
pub fn metric_dot(a: Vec4, b: Vec4, sig: Signature) -> f64 {
    a.v3.dot(b.v3) + sig.zeta() * a.h * b.h
}
