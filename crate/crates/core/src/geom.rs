//! Vectors and proper rotations in three dimensions.
//!
//! Right-handed axes with `z` up. A rotation by angle `θ` about the unit axis
//! `n` is the exact solution of `dr/dt = Ω × r` with `Ω = n` held constant for a
//! time `θ`.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::PulseError;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Unit vector in the xy-plane at angle `phi` (radians) from `x`.
    pub fn planar(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self::new(c, s, 0.0)
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Returns `None` for vectors too short to carry a direction.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 1e-300 && n.is_finite()).then(|| self / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn max_abs_diff(self, o: Vec3) -> f64 {
        (self - o).to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
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

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
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

impl std::iter::Sum for Vec3 {
    fn sum<I: Iterator<Item = Vec3>>(iter: I) -> Vec3 {
        iter.fold(Vec3::ZERO, |a, b| a + b)
    }
}

/// A proper rotation stored as a row-major 3×3 orthogonal matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Default for Rotation {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Rodrigues form. The axis need not be normalized; a zero axis is only
    /// accepted together with a zero angle.
    pub fn axis_angle(axis: Vec3, angle: f64) -> Result<Self, PulseError> {
        match axis.normalized() {
            Some(n) => Ok(Self::about_unit(n, angle)),
            None if angle == 0.0 => Ok(Self::IDENTITY),
            None => Err(PulseError::ZeroAxis),
        }
    }

    /// Rotation about an axis already known to be unit length.
    pub(crate) fn about_unit(n: Vec3, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let Vec3 { x, y, z } = n;
        Rotation {
            m: [
                [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
                [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
                [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
            ],
        }
    }

    /// Builds a rotation from a rotation vector (axis scaled by angle).
    pub fn from_rotation_vector(v: Vec3) -> Self {
        match v.normalized() {
            Some(n) => Self::about_unit(n, v.norm()),
            None => Self::IDENTITY,
        }
    }

    pub fn from_matrix(m: [[f64; 3]; 3]) -> Self {
        Rotation { m }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    /// Applies the inverse (transpose) without materializing it.
    pub fn apply_inverse(&self, v: Vec3) -> Vec3 {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[1][0] * v.y + m[2][0] * v.z,
            m[0][1] * v.x + m[1][1] * v.y + m[2][1] * v.z,
            m[0][2] * v.x + m[1][2] * v.y + m[2][2] * v.z,
        )
    }

    pub fn inverse(&self) -> Rotation {
        let m = &self.m;
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = m[j][i];
            }
        }
        Rotation { m: t }
    }

    /// `self ∘ after`: applies `after` first, then `self`.
    pub fn then_after(&self, after: &Rotation) -> Rotation {
        compose(self, after)
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest entry of `|R Rᵀ − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let p = compose(self, &self.inverse());
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.m[i][j] - target).abs());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, o: &Rotation) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - o.m[i][j]).abs());
            }
        }
        worst
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        let tr = self.m[0][0] + self.m[1][1] + self.m[2][2];
        ((tr - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
    }
}

/// Matrix product `a · b`, i.e. `b` is applied first.
pub fn compose(a: &Rotation, b: &Rotation) -> Rotation {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a.m[i][k] * b.m[k][j]).sum();
        }
    }
    Rotation { m }
}

pub fn rotate(r: &Rotation, v: Vec3) -> Vec3 {
    r.apply(v)
}

/// Wraps an angle expressed in units of π into `(-1, 1]`.
pub fn wrap_half_turns(x: f64) -> f64 {
    let mut w = x.rem_euclid(2.0);
    if w > 1.0 {
        w -= 2.0;
    }
    // values within rounding of -1 belong to the +1 end of the branch
    if (w + 1.0).abs() < 1e-12 {
        w = 1.0;
    }
    w
}

/// Wraps an angle in radians into `(-π, π]`.
pub fn wrap_radians(x: f64) -> f64 {
    wrap_half_turns(x / std::f64::consts::PI) * std::f64::consts::PI
}

/// Distance between two angles (units of π) measured on the circle.
pub fn half_turn_distance(a: f64, b: f64) -> f64 {
    wrap_half_turns(a - b).abs()
}
