use super::{GeomError, Vec3};
use crate::math;

/// A proper rigid motion: `p ↦ R·p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    /// Row-major rotation matrix.
    pub rotation: [[f64; 3]; 3],
    pub translation: Vec3,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl RigidTransform {
    pub const IDENTITY: RigidTransform = RigidTransform {
        rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        translation: Vec3::ZERO,
    };

    pub fn from_translation(t: Vec3) -> Self {
        Self {
            translation: t,
            ..Self::IDENTITY
        }
    }

    /// Rotation of `angle` radians about `axis` (Rodrigues).
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self, GeomError> {
        let k = axis.try_normalize().ok_or(GeomError::ZeroAxis)?;
        Ok(Self::rotation_about_unit(k, angle))
    }

    pub(crate) fn rotation_about_unit(k: Vec3, angle: f64) -> Self {
        let (s, c) = (math::sin(angle), math::cos(angle));
        let v = 1.0 - c;
        let (x, y, z) = (k.x, k.y, k.z);
        Self {
            rotation: [
                [c + x * x * v, x * y * v - z * s, x * z * v + y * s],
                [y * x * v + z * s, c + y * y * v, y * z * v - x * s],
                [z * x * v - y * s, z * y * v + x * s, c + z * z * v],
            ],
            translation: Vec3::ZERO,
        }
    }

    /// Frame whose rotation columns are the given orthonormal axes.
    pub fn from_axes(x: Vec3, y: Vec3, z: Vec3, origin: Vec3) -> Self {
        Self {
            rotation: [[x.x, y.x, z.x], [x.y, y.y, z.y], [x.z, y.z, z.z]],
            translation: origin,
        }
    }

    /// Fixed-axis roll (x), pitch (y), yaw (z): `R = Rz(yaw)·Ry(pitch)·Rx(roll)`.
    pub fn from_rpy(roll: f64, pitch: f64, yaw: f64) -> Self {
        let rx = Self::rotation_about_unit(Vec3::X, roll);
        let ry = Self::rotation_about_unit(Vec3::Y, pitch);
        let rz = Self::rotation_about_unit(Vec3::Z, yaw);
        rz.compose(&ry).compose(&rx)
    }

    pub fn with_translation(mut self, t: Vec3) -> Self {
        self.translation = t;
        self
    }

    #[inline]
    pub fn rotate(&self, v: Vec3) -> Vec3 {
        let r = &self.rotation;
        Vec3::new(
            r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
            r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
            r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
        )
    }

    #[inline]
    pub fn transform_point(&self, p: Vec3) -> Vec3 {
        self.rotate(p) + self.translation
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        let a = &self.rotation;
        let b = &other.rotation;
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        RigidTransform {
            rotation: r,
            translation: self.transform_point(other.translation),
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let r = &self.rotation;
        let rt = [
            [r[0][0], r[1][0], r[2][0]],
            [r[0][1], r[1][1], r[2][1]],
            [r[0][2], r[1][2], r[2][2]],
        ];
        let inv = RigidTransform {
            rotation: rt,
            translation: Vec3::ZERO,
        };
        let t = -inv.rotate(self.translation);
        inv.with_translation(t)
    }

    /// Column `i` of the rotation: the image of the i-th basis vector.
    pub fn axis(&self, i: usize) -> Vec3 {
        Vec3::new(self.rotation[0][i], self.rotation[1][i], self.rotation[2][i])
    }

    pub fn determinant(&self) -> f64 {
        let r = &self.rotation;
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    }

    /// Orthonormal with determinant +1, within `tol`.
    pub fn is_proper(&self, tol: f64) -> bool {
        for i in 0..3 {
            for j in 0..3 {
                let d = self.axis(i).dot(self.axis(j));
                let want = if i == j { 1.0 } else { 0.0 };
                if (d - want).abs() > tol {
                    return false;
                }
            }
        }
        (self.determinant() - 1.0).abs() <= tol
    }

    pub fn approx_eq(&self, other: &RigidTransform, tol: f64) -> bool {
        let rot = (0..3).all(|i| (0..3).all(|j| (self.rotation[i][j] - other.rotation[i][j]).abs() <= tol));
        rot && (self.translation - other.translation).norm() <= tol
    }
}
