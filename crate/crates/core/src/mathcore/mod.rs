//! Vector and matrix algebra for the render pipeline.
//!
//! Matrices follow the row-vector convention of Direct3D: a point is a row
//! `[x y z w]` multiplied on the left, `p' = p * M`, so `A * B` applies `A`
//! first. The coordinate system is left-handed (x right, y up, z forward)
//! and NDC depth spans `[0, 1]`.

mod matrix;
mod transform;
mod vector;

pub use matrix::Mat4;
pub use transform::{
    euler_to_rotation, eye_position, mvp_transform, orthographic_projection,
    perspective_projection, stereo_projection, stereo_projection_rh, view_for_eye, EyeSide,
    HeadPose, ProjectionError, StereoParams, DEFAULT_HALF_IPD,
};
pub use vector::{Vec3, Vec4};

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::Debug;

/// Floating point scalar the geometry is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
