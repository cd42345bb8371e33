//! Scene content: meshes, textures, the light and model placement, plus the
//! scene configuration file that ties them to calibration and rig settings.

mod config;
mod mesh;

pub use config::{
    load_scene, parse_scene, CalibrationPaths, CameraConfig, ConfigError, DistortionConfig, ModelConfig,
    OutputConfig, Scene, SceneConfig, SceneModel, SourceConfig, StereoConfig,
};
pub use mesh::{cube, face_normal, load_obj, parse_obj, to_obj_string, uv_sphere, Mesh, MeshError, ObjError, Vertex};

use image::RgbaImage;

use crate::mathcore::{euler_to_rotation, HeadPose, Mat4, Vec3};

type Vec3d = Vec3<f64>;

/// RGBA8 texture applied to a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialTexture {
    image: RgbaImage,
}

impl MaterialTexture {
    /// Returns `None` for an empty image.
    pub fn new(image: RgbaImage) -> Option<Self> {
        (image.width() > 0 && image.height() > 0).then_some(Self { image })
    }

    /// 1x1 texture of a single color.
    pub fn solid(rgba: [u8; 4]) -> Self {
        Self { image: RgbaImage::from_pixel(1, 1, image::Rgba(rgba)) }
    }

    pub fn image(&self) -> &RgbaImage {
        &self.image
    }

    pub fn width(&self) -> u32 {
        self.image.width()
    }

    pub fn height(&self) -> u32 {
        self.image.height()
    }
}

/// Checkerboard texture used by the bundled fixtures.
pub fn checker_texture(size: u32, cells: u32, a: [u8; 4], b: [u8; 4]) -> MaterialTexture {
    let cell = (size / cells.max(1)).max(1);
    let image = RgbaImage::from_fn(size, size, |x, y| {
        if ((x / cell) + (y / cell)).is_multiple_of(2) {
            image::Rgba(a)
        } else {
            image::Rgba(b)
        }
    });
    MaterialTexture { image }
}

/// Single directional light with an ambient term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Light {
    direction: Vec3d,
    pub diffuse: [f64; 3],
    pub ambient: [f64; 3],
}

impl Default for Light {
    fn default() -> Self {
        Self {
            direction: Vec3::new(0.0, 0.0, 1.0),
            diffuse: [1.0, 1.0, 1.0],
            ambient: [0.15, 0.15, 0.15],
        }
    }
}

impl Light {
    /// `direction` is the direction the light travels; it is normalized here
    /// and `None` is returned for a zero vector.
    pub fn new(direction: Vec3d, diffuse: [f64; 3], ambient: [f64; 3]) -> Option<Self> {
        Some(Self { direction: direction.normalized()?, diffuse, ambient })
    }

    pub fn direction(&self) -> Vec3d {
        self.direction
    }

    /// Unit vector from a surface point towards the light.
    pub fn to_light(&self) -> Vec3d {
        -self.direction
    }
}

/// Placement of a model in the world: scale, then rotate, then translate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelTransform {
    pub translation: Vec3d,
    /// Yaw, pitch and roll in degrees.
    pub rotation: HeadPose<f64>,
    pub scale: Vec3d,
}

impl Default for ModelTransform {
    fn default() -> Self {
        Self { translation: Vec3::zero(), rotation: HeadPose::default(), scale: Vec3::splat(1.0) }
    }
}

pub fn model_matrix(translation: Vec3d, rotation: HeadPose<f64>, scale: Vec3d) -> Mat4<f64> {
    Mat4::scaling(scale) * euler_to_rotation(rotation) * Mat4::translation(translation)
}

impl ModelTransform {
    pub fn matrix(&self) -> Mat4<f64> {
        model_matrix(self.translation, self.rotation, self.scale)
    }
}
