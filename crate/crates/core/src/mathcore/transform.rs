use thiserror::Error;

use super::{Mat4, Scalar, Vec3, Vec4};

/// Half of a 65 mm interpupillary distance, rounded to the 32 mm the rig uses.
pub const DEFAULT_HALF_IPD: f64 = 0.032;

#[derive(Debug, Error, PartialEq)]
pub enum ProjectionError {
    #[error("near plane must be positive and closer than far (near={near}, far={far})")]
    DepthRange { near: f64, far: f64 },
    #[error("aspect ratio must be positive, got {0}")]
    Aspect(f64),
    #[error("vertical field of view must lie in (0, pi), got {0}")]
    FieldOfView(f64),
    #[error("orthographic extents must be positive (width={width}, height={height})")]
    Extent { width: f64, height: f64 },
}

/// Head orientation in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeadPose<T> {
    pub yaw: T,
    pub pitch: T,
    pub roll: T,
}

impl<T: Scalar> HeadPose<T> {
    pub fn new(yaw: T, pitch: T, roll: T) -> Self {
        Self { yaw, pitch, roll }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EyeSide {
    Left,
    Right,
}

impl EyeSide {
    /// -1 for the left eye, +1 for the right.
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            EyeSide::Left => -T::one(),
            EyeSide::Right => T::one(),
        }
    }
}

/// Per-eye parameters of the stereo projection transform.
///
/// `separation` is the interaxial distance normalized by the virtual screen
/// width, `convergence` the view-space depth of the zero-disparity plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StereoParams<T> {
    pub side: EyeSide,
    pub separation: T,
    pub convergence: T,
}

/// Rotation for a head pose, applied as yaw about Y, then pitch about the
/// rotated X, then roll about the rotated Z. In row-vector form this is
/// `Rz(roll) * Rx(pitch) * Ry(yaw)`.
pub fn euler_to_rotation<T: Scalar>(pose: HeadPose<T>) -> Mat4<T> {
    Mat4::rotation_z(pose.roll.to_radians())
        * Mat4::rotation_x(pose.pitch.to_radians())
        * Mat4::rotation_y(pose.yaw.to_radians())
}

/// Left-handed perspective projection for row vectors with depth in `[0, 1]`.
pub fn perspective_projection<T: Scalar>(
    fov_y: T,
    aspect: T,
    near: T,
    far: T,
) -> Result<Mat4<T>, ProjectionError> {
    let f64_of = |v: T| v.to_f64().unwrap_or(f64::NAN);
    if !(near > T::zero() && far > near) {
        return Err(ProjectionError::DepthRange { near: f64_of(near), far: f64_of(far) });
    }
    if !(aspect > T::zero()) {
        return Err(ProjectionError::Aspect(f64_of(aspect)));
    }
    if !(fov_y > T::zero() && fov_y < T::PI()) {
        return Err(ProjectionError::FieldOfView(f64_of(fov_y)));
    }
    let y_scale = T::one() / (fov_y / T::lit(2.0)).tan();
    let x_scale = y_scale / aspect;
    let range = far / (far - near);
    let mut m = Mat4::zero();
    m.m[0][0] = x_scale;
    m.m[1][1] = y_scale;
    m.m[2][2] = range;
    m.m[2][3] = T::one();
    m.m[3][2] = -near * range;
    Ok(m)
}

/// Orthographic projection of a pixel-space viewport: `(0, 0)` is the top-left
/// corner and maps to NDC `(-1, +1)`, `(width, height)` maps to `(+1, -1)`.
pub fn orthographic_projection<T: Scalar>(
    width: T,
    height: T,
    near: T,
    far: T,
) -> Result<Mat4<T>, ProjectionError> {
    let f64_of = |v: T| v.to_f64().unwrap_or(f64::NAN);
    if !(width > T::zero() && height > T::zero()) {
        return Err(ProjectionError::Extent { width: f64_of(width), height: f64_of(height) });
    }
    if !(far > near) {
        return Err(ProjectionError::DepthRange { near: f64_of(near), far: f64_of(far) });
    }
    let two = T::lit(2.0);
    let mut m = Mat4::identity();
    m.m[0][0] = two / width;
    m.m[1][1] = -two / height;
    m.m[2][2] = T::one() / (far - near);
    m.m[3][0] = -T::one();
    m.m[3][1] = T::one();
    m.m[3][2] = -near / (far - near);
    Ok(m)
}

/// Off-axis stereo variant of a mono perspective matrix (left-handed,
/// row-major). Only entries (3,1) and (4,1) change:
///
/// ```text
/// m31 = p13 + side * separation
/// m41 = -side * separation * convergence
/// ```
///
/// which shifts clip-space x by `side * separation * (w - convergence)`.
pub fn stereo_projection<T: Scalar>(mono: &Mat4<T>, params: StereoParams<T>) -> Mat4<T> {
    if params.separation == T::zero() {
        return *mono;
    }
    let shift = params.side.sign::<T>() * params.separation;
    let mut m = *mono;
    m.m[2][0] = mono.m[2][0] + shift;
    m.m[3][0] = mono.m[3][0] - shift * params.convergence;
    m
}

/// Right-handed, column-major form of [`stereo_projection`], for a mono matrix
/// already in that layout: entry (1,3) becomes `p13 - side * separation` and
/// (1,4) becomes `-side * separation * convergence`.
pub fn stereo_projection_rh<T: Scalar>(mono_rh: &Mat4<T>, params: StereoParams<T>) -> Mat4<T> {
    if params.separation == T::zero() {
        return *mono_rh;
    }
    let shift = params.side.sign::<T>() * params.separation;
    let mut m = *mono_rh;
    m.m[0][2] = mono_rh.m[0][2] - shift;
    m.m[0][3] = mono_rh.m[0][3] - shift * params.convergence;
    m
}

/// `v * model * view * proj`, the clip-space position of a vertex.
pub fn mvp_transform<T: Scalar>(v: Vec4<T>, model: &Mat4<T>, view: &Mat4<T>, proj: &Mat4<T>) -> Vec4<T> {
    proj.transform(view.transform(model.transform(v)))
}

/// World position of one eye: the head position offset by `side * half_ipd`
/// along the head's rotated local x axis.
pub fn eye_position<T: Scalar>(pose: HeadPose<T>, head_position: Vec3<T>, side: EyeSide, half_ipd: T) -> Vec3<T> {
    let local_x = euler_to_rotation(pose).transform_direction(Vec3::new(T::one(), T::zero(), T::zero()));
    head_position + local_x * (side.sign::<T>() * half_ipd)
}

/// View matrix for one eye of the head camera: the inverse of the eye's
/// camera-to-world transform.
pub fn view_for_eye<T: Scalar>(pose: HeadPose<T>, head_position: Vec3<T>, side: EyeSide, half_ipd: T) -> Mat4<T> {
    let eye = eye_position(pose, head_position, side, half_ipd);
    let camera_to_world = euler_to_rotation(pose) * Mat4::translation(eye);
    camera_to_world.rigid_inverse()
}
