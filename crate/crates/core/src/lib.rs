//! Stereoscopic AR rendering without the hardware.
//!
//! The pipeline undistorts fisheye camera frames with an omnidirectional
//! camera model, renders lit and textured meshes over them with a software
//! rasterizer, once per eye, and composes barrel-distorted side-by-side
//! output for a head-mounted display.

// negated comparisons are used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capture;
pub mod fixtures;
pub mod imaging;
pub mod mathcore;
pub mod omnicam;
pub mod raster;
pub mod scene;
pub mod stereo;

pub use mathcore::Scalar;

pub type Vec3f = mathcore::Vec3<f32>;
pub type Vec3d = mathcore::Vec3<f64>;
pub type Vec4f = mathcore::Vec4<f32>;
pub type Vec4d = mathcore::Vec4<f64>;
pub type Mat4f = mathcore::Mat4<f32>;
pub type Mat4d = mathcore::Mat4<f64>;

pub type OmniIntrinsicsF64 = omnicam::OmniIntrinsics<f64>;
pub type OmniIntrinsicsF32 = omnicam::OmniIntrinsics<f32>;
