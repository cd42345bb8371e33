//! Per-frame stereo orchestration.
//!
//! A frame applies the head pose to the mono camera, renders each eye into
//! its own target (background first, then models), barrel-distorts each eye
//! and concatenates the two eyes left then right. The eyes are rendered
//! concurrently; both passes are pure so the result does not depend on
//! scheduling.

mod distortion;

use std::time::{Duration, Instant};

use image::RgbaImage;
use thiserror::Error;

pub use distortion::{barrel_distort, ndc_to_pixel_center, radial_factor};

use crate::imaging::concat_horizontal;
use crate::mathcore::{
    perspective_projection, stereo_projection, view_for_eye, EyeSide, HeadPose, Mat4, ProjectionError, StereoParams,
    Vec3,
};
use crate::raster::{draw_background, rasterize_mesh, Framebuffer, TextureFilter, Transforms};
use crate::scene::{CameraConfig, DistortionConfig, Light, OutputConfig, SceneConfig, SceneModel, StereoConfig};

#[derive(Debug, Error, PartialEq)]
pub enum StereoError {
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error("eye images differ in size: left {left:?}, right {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },
    #[error("invalid rig: {0}")]
    InvalidRig(String),
}

/// Everything about the head-mounted rig that shapes a stereo frame.
#[derive(Debug, Clone, PartialEq)]
pub struct StereoRigConfig {
    pub half_ipd: f64,
    pub separation: f64,
    pub convergence: f64,
    pub eye_width: u32,
    pub eye_height: u32,
    /// Vertical field of view in degrees.
    pub fov_y: f64,
    pub near: f64,
    pub far: f64,
    pub distortion_enabled: bool,
    pub k: [f64; 4],
    pub distortion_scale: f64,
    pub center_left: [f64; 2],
    pub center_right: [f64; 2],
    pub texture_filter: TextureFilter,
}

impl Default for StereoRigConfig {
    fn default() -> Self {
        let (output, camera) = (OutputConfig::default(), CameraConfig::default());
        let (stereo, distortion) = (StereoConfig::default(), DistortionConfig::default());
        Self::from_parts(&output, &camera, &stereo, &distortion)
    }
}

impl StereoRigConfig {
    pub fn from_scene(cfg: &SceneConfig) -> Self {
        Self::from_parts(&cfg.output, &cfg.camera, &cfg.stereo, &cfg.distortion)
    }

    fn from_parts(output: &OutputConfig, camera: &CameraConfig, stereo: &StereoConfig, distortion: &DistortionConfig) -> Self {
        Self {
            half_ipd: stereo.half_ipd,
            separation: stereo.separation,
            convergence: stereo.convergence,
            eye_width: output.eye_width,
            eye_height: output.eye_height,
            fov_y: camera.fov_y,
            near: camera.near,
            far: camera.far,
            distortion_enabled: distortion.enabled,
            k: distortion.k,
            distortion_scale: distortion.scale,
            center_left: distortion.center_left,
            center_right: distortion.center_right,
            texture_filter: output.texture_filter,
        }
    }

    pub fn validate(&self) -> Result<(), StereoError> {
        if self.eye_width == 0 || self.eye_height == 0 {
            return Err(StereoError::InvalidRig(format!("eye size {}x{} must be positive", self.eye_width, self.eye_height)));
        }
        if !(self.k[0] > 0.0) {
            return Err(StereoError::InvalidRig(format!("k0 must be positive, got {}", self.k[0])));
        }
        Ok(())
    }

    /// Mono perspective matrix shared by both eyes.
    pub fn mono_projection(&self) -> Result<Mat4<f64>, StereoError> {
        let aspect = self.eye_width as f64 / self.eye_height as f64;
        Ok(perspective_projection(self.fov_y.to_radians(), aspect, self.near, self.far)?)
    }

    pub fn eye_projection(&self, side: EyeSide) -> Result<Mat4<f64>, StereoError> {
        let params = StereoParams { side, separation: self.separation, convergence: self.convergence };
        Ok(stereo_projection(&self.mono_projection()?, params))
    }

    fn center(&self, side: EyeSide) -> [f64; 2] {
        match side {
            EyeSide::Left => self.center_left,
            EyeSide::Right => self.center_right,
        }
    }
}

/// Models, light and head position of the virtual scene.
#[derive(Debug, Clone, Copy)]
pub struct StereoScene<'a> {
    pub models: &'a [SceneModel],
    pub light: &'a Light,
    pub head_position: Vec3<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FrameTimings {
    pub left_pass: Duration,
    pub right_pass: Duration,
    pub distortion: Duration,
    pub compose: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StereoFrame {
    /// Eye renders before barrel distortion.
    pub raw_left: RgbaImage,
    pub raw_right: RgbaImage,
    /// Eye images as composed; equal to the raw renders when distortion is off.
    pub left: RgbaImage,
    pub right: RgbaImage,
    pub combined: RgbaImage,
    pub timings: FrameTimings,
}

/// Renders one eye: background without depth, then every model with depth.
pub fn render_eye(
    scene: &StereoScene<'_>,
    pose: HeadPose<f64>,
    side: EyeSide,
    background: &RgbaImage,
    rig: &StereoRigConfig,
) -> Result<Framebuffer, StereoError> {
    rig.validate()?;
    let projection = rig.eye_projection(side)?;
    let view = view_for_eye(pose, scene.head_position, side, rig.half_ipd);
    let mut fb = Framebuffer::new(rig.eye_width, rig.eye_height);
    fb.clear([0, 0, 0, 255]);
    draw_background(&mut fb, background);
    for m in scene.models {
        let t = Transforms { model: m.model_matrix, view, projection };
        rasterize_mesh(&mut fb, &m.mesh, &m.texture, &t, scene.light, rig.texture_filter);
    }
    Ok(fb)
}

/// Horizontal concatenation, left image first.
pub fn compose_side_by_side(left: &RgbaImage, right: &RgbaImage) -> Result<RgbaImage, StereoError> {
    if left.dimensions() != right.dimensions() {
        return Err(StereoError::DimensionMismatch { left: left.dimensions(), right: right.dimensions() });
    }
    Ok(concat_horizontal(left, right))
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, Duration) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed())
}

/// Renders, distorts and composes one stereo frame. Backgrounds are expected
/// to be undistorted already.
pub fn render_stereo_frame(
    scene: &StereoScene<'_>,
    pose: HeadPose<f64>,
    bg_left: &RgbaImage,
    bg_right: &RgbaImage,
    rig: &StereoRigConfig,
) -> Result<StereoFrame, StereoError> {
    rig.validate()?;
    let eye = |side: EyeSide, bg: &RgbaImage| {
        let (fb, t) = timed(|| render_eye(scene, pose, side, bg, rig));
        (fb.map(Framebuffer::into_color), t)
    };
    let ((left, left_pass), (right, right_pass)) =
        rayon::join(|| eye(EyeSide::Left, bg_left), || eye(EyeSide::Right, bg_right));
    let (raw_left, raw_right) = (left?, right?);

    let ((dl, dr), distortion) = timed(|| {
        if rig.distortion_enabled {
            rayon::join(
                || barrel_distort(&raw_left, rig.k, rig.center(EyeSide::Left), rig.distortion_scale),
                || barrel_distort(&raw_right, rig.k, rig.center(EyeSide::Right), rig.distortion_scale),
            )
        } else {
            (raw_left.clone(), raw_right.clone())
        }
    });
    let (combined, compose) = timed(|| compose_side_by_side(&dl, &dr));
    Ok(StereoFrame {
        raw_left,
        raw_right,
        left: dl,
        right: dr,
        combined: combined?,
        timings: FrameTimings { left_pass, right_pass, distortion, compose },
    })
}
