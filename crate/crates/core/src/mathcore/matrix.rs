use std::ops::Mul;

use super::{Scalar, Vec3, Vec4};

/// 4×4 matrix stored row-major, `m[row][col]`.
///
/// Points are row vectors multiplied from the left (`v * M`), so the
/// translation of an affine transform lives in the fourth row and a
/// composition `A * B` applies `A` first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4<T> {
    pub m: [[T; 4]; 4],
}

impl<T: Scalar> Default for Mat4<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Scalar> Mat4<T> {
    pub const fn from_rows(m: [[T; 4]; 4]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        Self { m: [[T::zero(); 4]; 4] }
    }

    pub fn identity() -> Self {
        let mut r = Self::zero();
        for i in 0..4 {
            r.m[i][i] = T::one();
        }
        r
    }

    pub fn translation(t: Vec3<T>) -> Self {
        let mut r = Self::identity();
        r.m[3][0] = t.x;
        r.m[3][1] = t.y;
        r.m[3][2] = t.z;
        r
    }

    pub fn scaling(s: Vec3<T>) -> Self {
        let mut r = Self::identity();
        r.m[0][0] = s.x;
        r.m[1][1] = s.y;
        r.m[2][2] = s.z;
        r
    }

    /// Rotation about +x by `a` radians (left-handed, row-vector form).
    pub fn rotation_x(a: T) -> Self {
        let (s, c) = a.sin_cos();
        let mut r = Self::identity();
        r.m[1][1] = c;
        r.m[1][2] = s;
        r.m[2][1] = -s;
        r.m[2][2] = c;
        r
    }

    /// Rotation about +y by `a` radians. Positive angles turn +z towards +x.
    pub fn rotation_y(a: T) -> Self {
        let (s, c) = a.sin_cos();
        let mut r = Self::identity();
        r.m[0][0] = c;
        r.m[0][2] = -s;
        r.m[2][0] = s;
        r.m[2][2] = c;
        r
    }

    /// Rotation about +z by `a` radians. Positive angles turn +x towards +y.
    pub fn rotation_z(a: T) -> Self {
        let (s, c) = a.sin_cos();
        let mut r = Self::identity();
        r.m[0][0] = c;
        r.m[0][1] = s;
        r.m[1][0] = -s;
        r.m[1][1] = c;
        r
    }

    pub fn transpose(&self) -> Self {
        let mut r = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                r.m[i][j] = self.m[j][i];
            }
        }
        r
    }

    /// `v * M`.
    pub fn transform(&self, v: Vec4<T>) -> Vec4<T> {
        let a = v.to_array();
        let mut out = [T::zero(); 4];
        for (j, o) in out.iter_mut().enumerate() {
            *o = a[0] * self.m[0][j] + a[1] * self.m[1][j] + a[2] * self.m[2][j] + a[3] * self.m[3][j];
        }
        Vec4::from_array(out)
    }

    pub fn transform_point(&self, p: Vec3<T>) -> Vec3<T> {
        self.transform(p.point()).project()
    }

    pub fn transform_direction(&self, d: Vec3<T>) -> Vec3<T> {
        self.transform(d.direction()).xyz()
    }

    pub fn determinant(&self) -> T {
        let mut det = T::zero();
        for (c, &a) in self.m[0].iter().enumerate() {
            let sign = if c % 2 == 0 { T::one() } else { -T::one() };
            det = det + sign * a * self.minor3(0, c);
        }
        det
    }

    fn minor3(&self, row: usize, col: usize) -> T {
        let mut v = [[T::zero(); 3]; 3];
        let mut ri = 0;
        for r in 0..4 {
            if r == row {
                continue;
            }
            let mut ci = 0;
            for c in 0..4 {
                if c == col {
                    continue;
                }
                v[ri][ci] = self.m[r][c];
                ci += 1;
            }
            ri += 1;
        }
        v[0][0] * (v[1][1] * v[2][2] - v[1][2] * v[2][1])
            - v[0][1] * (v[1][0] * v[2][2] - v[1][2] * v[2][0])
            + v[0][2] * (v[1][0] * v[2][1] - v[1][1] * v[2][0])
    }

    /// General inverse by Gauss-Jordan elimination with partial pivoting.
    /// Returns `None` for singular matrices.
    pub fn inverse(&self) -> Option<Self> {
        let mut a = self.m;
        let mut inv = Self::identity().m;
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
            if a[pivot][col].abs() <= T::epsilon() * T::lit(16.0) * self.max_abs() {
                return None;
            }
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = T::one() / a[col][col];
            for j in 0..4 {
                a[col][j] = a[col][j] * p;
                inv[col][j] = inv[col][j] * p;
            }
            for i in 0..4 {
                if i == col {
                    continue;
                }
                let f = a[i][col];
                if f == T::zero() {
                    continue;
                }
                for j in 0..4 {
                    a[i][j] = a[i][j] - f * a[col][j];
                    inv[i][j] = inv[i][j] - f * inv[col][j];
                }
            }
        }
        Some(Self { m: inv })
    }

    fn max_abs(&self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    /// Inverse of a rigid transform (rotation followed by translation).
    pub fn rigid_inverse(&self) -> Self {
        let mut r = Self::identity();
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] = self.m[j][i];
            }
        }
        let t = Vec3::new(self.m[3][0], self.m[3][1], self.m[3][2]);
        for j in 0..3 {
            r.m[3][j] = -(t.x * r.m[0][j] + t.y * r.m[1][j] + t.z * r.m[2][j]);
        }
        r
    }

    /// Inverse-transpose of the upper 3×3 block, used to carry normals
    /// through a model transform. Falls back to the block itself when it is
    /// singular.
    pub fn normal_matrix(&self) -> Self {
        let mut lin = Self::identity();
        for i in 0..3 {
            for j in 0..3 {
                lin.m[i][j] = self.m[i][j];
            }
        }
        lin.inverse().map(|inv| inv.transpose()).unwrap_or(lin)
    }

    /// Converts this left-handed, row-vector matrix into the equivalent
    /// right-handed matrix for column vectors (OpenGL layout): the transpose
    /// with the view-space z axis mirrored.
    pub fn to_rh_column_major(&self) -> Self {
        let mut r = self.transpose();
        for row in r.m.iter_mut() {
            row[2] = -row[2];
        }
        r
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        d
    }
}

impl<T: Scalar> Mul for Mat4<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut r = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = T::zero();
                for k in 0..4 {
                    acc = acc + self.m[i][k] * rhs.m[k][j];
                }
                r.m[i][j] = acc;
            }
        }
        r
    }
}
