//! Scene configuration files.
//!
//! A scene is a TOML document. Every section is optional except at least one
//! `[[model]]`; relative paths resolve against the directory holding the
//! scene file. See the README for the full key reference.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::imaging::load_image;
use crate::mathcore::{HeadPose, Mat4, Vec3, DEFAULT_HALF_IPD};
use crate::omnicam::{load_calibration, OmniIntrinsics, VirtualPinhole};
use crate::raster::TextureFilter;

use super::{load_obj, Light, MaterialTexture, Mesh, ModelTransform};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read scene file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid scene file: {0}")]
    Syntax(String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("`{key}` refers to missing file {path}")]
    MissingAsset { key: String, path: PathBuf },
    #[error("cannot load {path}: {message}")]
    Asset { path: PathBuf, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), message: message.into() }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    output: Option<RawOutput>,
    camera: Option<RawCamera>,
    stereo: Option<RawStereo>,
    distortion: Option<RawDistortion>,
    light: Option<RawLight>,
    calibration: Option<RawCalibration>,
    pinhole: Option<RawPinhole>,
    source: Option<RawSource>,
    #[serde(default)]
    model: Vec<RawModel>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    eye_width: Option<u32>,
    eye_height: Option<u32>,
    texture_filter: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCamera {
    position: Option<[f64; 3]>,
    yaw: Option<f64>,
    pitch: Option<f64>,
    roll: Option<f64>,
    fov_y: Option<f64>,
    near: Option<f64>,
    far: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStereo {
    half_ipd: Option<f64>,
    separation: Option<f64>,
    convergence: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistortion {
    enabled: Option<bool>,
    k: Option<[f64; 4]>,
    scale: Option<f64>,
    center_left: Option<[f64; 2]>,
    center_right: Option<[f64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLight {
    direction: Option<[f64; 3]>,
    diffuse: Option<[f64; 3]>,
    ambient: Option<[f64; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalibration {
    left: PathBuf,
    right: PathBuf,
    width: Option<u32>,
    height: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPinhole {
    nxc: Option<f64>,
    nyc: Option<f64>,
    z: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    kind: Option<String>,
    dir: Option<PathBuf>,
    width: Option<u32>,
    height: Option<u32>,
    frames: Option<usize>,
    cell: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    mesh: PathBuf,
    texture: Option<PathBuf>,
    translation: Option<[f64; 3]>,
    rotation: Option<[f64; 3]>,
    scale: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub eye_width: u32,
    pub eye_height: u32,
    pub texture_filter: TextureFilter,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { eye_width: 640, eye_height: 800, texture_filter: TextureFilter::Bilinear }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraConfig {
    pub position: Vec3<f64>,
    pub pose: HeadPose<f64>,
    /// Vertical field of view in degrees.
    pub fov_y: f64,
    pub near: f64,
    pub far: f64,
}

impl Default for CameraConfig {
    fn default() -> Self {
        Self { position: Vec3::zero(), pose: HeadPose::default(), fov_y: 90.0, near: 0.1, far: 1000.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StereoConfig {
    pub half_ipd: f64,
    pub separation: f64,
    pub convergence: f64,
}

impl Default for StereoConfig {
    fn default() -> Self {
        Self { half_ipd: DEFAULT_HALF_IPD, separation: 0.0, convergence: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionConfig {
    pub enabled: bool,
    pub k: [f64; 4],
    pub scale: f64,
    /// Distortion center of each eye in that eye's NDC.
    pub center_left: [f64; 2],
    pub center_right: [f64; 2],
}

impl Default for DistortionConfig {
    fn default() -> Self {
        Self { enabled: true, k: [1.0, 0.22, 0.24, 0.0], scale: 1.0, center_left: [0.0, 0.0], center_right: [0.0, 0.0] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationPaths {
    pub left: PathBuf,
    pub right: PathBuf,
    /// Size of the undistorted background; defaults to the camera size.
    pub undistort_size: Option<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceConfig {
    Synthetic { width: u32, height: u32, frames: usize, cell: u32 },
    Files { dir: PathBuf },
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig::Synthetic { width: 752, height: 480, frames: 1, cell: 32 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub mesh: PathBuf,
    pub texture: Option<PathBuf>,
    pub transform: ModelTransform,
}

/// Fully resolved scene configuration; all paths are absolute or relative to
/// the working directory.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub base_dir: PathBuf,
    pub output: OutputConfig,
    pub camera: CameraConfig,
    pub stereo: StereoConfig,
    pub distortion: DistortionConfig,
    pub light: Light,
    pub calibration: Option<CalibrationPaths>,
    pub pinhole: VirtualPinhole<f64>,
    pub source: SourceConfig,
    pub models: Vec<ModelConfig>,
}

#[derive(Debug, Clone)]
pub struct SceneModel {
    pub mesh: Mesh,
    pub texture: MaterialTexture,
    pub model_matrix: Mat4<f64>,
}

/// A configuration with every referenced asset loaded.
#[derive(Debug, Clone)]
pub struct Scene {
    pub config: SceneConfig,
    pub models: Vec<SceneModel>,
    /// Left and right camera intrinsics, when a calibration is configured.
    pub calibration: Option<(OmniIntrinsics<f64>, OmniIntrinsics<f64>)>,
}

fn vec3(a: [f64; 3]) -> Vec3<f64> {
    Vec3::from(a)
}

fn finite(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, "must be finite"))
    }
}

fn unit_color(key: &str, c: [f64; 3]) -> Result<[f64; 3], ConfigError> {
    if c.iter().all(|v| (0.0..=1.0).contains(v)) {
        Ok(c)
    } else {
        Err(invalid(key, "color channels must lie in [0, 1]"))
    }
}

/// Parses and validates a scene document without touching the filesystem.
pub fn parse_scene(text: &str, base_dir: &Path) -> Result<SceneConfig, ConfigError> {
    let raw: RawScene = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base_dir.join(p) };

    let mut output = OutputConfig::default();
    if let Some(o) = raw.output {
        output.eye_width = o.eye_width.unwrap_or(output.eye_width);
        output.eye_height = o.eye_height.unwrap_or(output.eye_height);
        if output.eye_width == 0 {
            return Err(invalid("output.eye_width", "must be positive"));
        }
        if output.eye_height == 0 {
            return Err(invalid("output.eye_height", "must be positive"));
        }
        if let Some(f) = o.texture_filter {
            output.texture_filter = match f.as_str() {
                "nearest" => TextureFilter::Nearest,
                "bilinear" => TextureFilter::Bilinear,
                other => return Err(invalid("output.texture_filter", format!("expected nearest or bilinear, got {other:?}"))),
            };
        }
    }

    let mut camera = CameraConfig::default();
    if let Some(c) = raw.camera {
        if let Some(p) = c.position {
            camera.position = vec3(p);
        }
        camera.pose = HeadPose::new(
            finite("camera.yaw", c.yaw.unwrap_or(0.0))?,
            finite("camera.pitch", c.pitch.unwrap_or(0.0))?,
            finite("camera.roll", c.roll.unwrap_or(0.0))?,
        );
        camera.fov_y = c.fov_y.unwrap_or(camera.fov_y);
        camera.near = c.near.unwrap_or(camera.near);
        camera.far = c.far.unwrap_or(camera.far);
    }
    if !(camera.fov_y > 0.0 && camera.fov_y < 180.0) {
        return Err(invalid("camera.fov_y", "must lie in (0, 180) degrees"));
    }
    if !(camera.near > 0.0) {
        return Err(invalid("camera.near", "must be positive"));
    }
    if !(camera.near < camera.far) {
        return Err(invalid("camera.far", format!("near ({}) must be less than far ({})", camera.near, camera.far)));
    }

    let mut stereo = StereoConfig::default();
    if let Some(s) = raw.stereo {
        stereo.half_ipd = s.half_ipd.unwrap_or(stereo.half_ipd);
        stereo.separation = s.separation.unwrap_or(stereo.separation);
        stereo.convergence = s.convergence.unwrap_or(stereo.convergence);
    }
    if !(stereo.half_ipd >= 0.0 && stereo.half_ipd.is_finite()) {
        return Err(invalid("stereo.half_ipd", "must be non-negative"));
    }
    if !(stereo.separation >= 0.0 && stereo.separation.is_finite()) {
        return Err(invalid("stereo.separation", "must be non-negative"));
    }
    if !(stereo.convergence > 0.0 && stereo.convergence.is_finite()) {
        return Err(invalid("stereo.convergence", "must be positive"));
    }

    let mut distortion = DistortionConfig::default();
    if let Some(d) = raw.distortion {
        distortion.enabled = d.enabled.unwrap_or(true);
        distortion.k = d.k.unwrap_or(distortion.k);
        distortion.scale = d.scale.unwrap_or(distortion.scale);
        distortion.center_left = d.center_left.unwrap_or(distortion.center_left);
        distortion.center_right = d.center_right.unwrap_or(distortion.center_right);
    }
    if !(distortion.k[0] > 0.0) {
        return Err(invalid("distortion.k", "k0 must be positive"));
    }
    if !(distortion.scale > 0.0 && distortion.scale.is_finite()) {
        return Err(invalid("distortion.scale", "must be positive"));
    }

    let mut light = Light::default();
    if let Some(l) = raw.light {
        let direction = vec3(l.direction.unwrap_or(light.direction().to_array()));
        let diffuse = unit_color("light.diffuse", l.diffuse.unwrap_or(light.diffuse))?;
        let ambient = unit_color("light.ambient", l.ambient.unwrap_or(light.ambient))?;
        light = Light::new(direction, diffuse, ambient).ok_or_else(|| invalid("light.direction", "must be nonzero"))?;
    }

    let calibration = match raw.calibration {
        Some(c) => {
            let undistort_size = match (c.width, c.height) {
                (Some(w), Some(h)) if w > 0 && h > 0 => Some((w, h)),
                (None, None) => None,
                _ => return Err(invalid("calibration.width", "width and height must both be positive")),
            };
            Some(CalibrationPaths { left: resolve(&c.left), right: resolve(&c.right), undistort_size })
        }
        None => None,
    };

    let default_pin = crate::fixtures::reference_pinhole();
    let pinhole = match raw.pinhole {
        Some(p) => VirtualPinhole {
            nxc: p.nxc.unwrap_or(default_pin.nxc),
            nyc: p.nyc.unwrap_or(default_pin.nyc),
            z: p.z.unwrap_or(default_pin.z),
        },
        None => default_pin,
    };
    if !(pinhole.z != 0.0 && pinhole.z.is_finite()) {
        return Err(invalid("pinhole.z", "must be nonzero"));
    }

    let source = match raw.source {
        None => SourceConfig::default(),
        Some(s) => match s.kind.as_deref().unwrap_or("synthetic") {
            "synthetic" => {
                let SourceConfig::Synthetic { width, height, frames, cell } = SourceConfig::default() else { unreachable!() };
                let src = SourceConfig::Synthetic {
                    width: s.width.unwrap_or(width),
                    height: s.height.unwrap_or(height),
                    frames: s.frames.unwrap_or(frames),
                    cell: s.cell.unwrap_or(cell),
                };
                if let SourceConfig::Synthetic { width: 0, .. } | SourceConfig::Synthetic { height: 0, .. } = src {
                    return Err(invalid("source.width", "synthetic frames need a positive size"));
                }
                if let SourceConfig::Synthetic { cell: 0, .. } = src {
                    return Err(invalid("source.cell", "must be positive"));
                }
                src
            }
            "files" => {
                let dir = s.dir.ok_or_else(|| invalid("source.dir", "required when kind = \"files\""))?;
                SourceConfig::Files { dir: resolve(&dir) }
            }
            other => return Err(invalid("source.kind", format!("expected synthetic or files, got {other:?}"))),
        },
    };

    if raw.model.is_empty() {
        return Err(invalid("model", "at least one [[model]] is required"));
    }
    let mut models = Vec::with_capacity(raw.model.len());
    for (i, m) in raw.model.into_iter().enumerate() {
        let scale = vec3(m.scale.unwrap_or([1.0; 3]));
        if !(scale.x > 0.0 && scale.y > 0.0 && scale.z > 0.0) {
            return Err(invalid(&format!("model[{i}].scale"), "must be positive on every axis"));
        }
        let rot = m.rotation.unwrap_or([0.0; 3]);
        models.push(ModelConfig {
            mesh: resolve(&m.mesh),
            texture: m.texture.as_deref().map(resolve),
            transform: ModelTransform {
                translation: vec3(m.translation.unwrap_or([0.0; 3])),
                rotation: HeadPose::new(rot[0], rot[1], rot[2]),
                scale,
            },
        });
    }

    Ok(SceneConfig {
        base_dir: base_dir.to_path_buf(),
        output,
        camera,
        stereo,
        distortion,
        light,
        calibration,
        pinhole,
        source,
        models,
    })
}

fn require(key: &str, path: &Path) -> Result<(), ConfigError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(ConfigError::MissingAsset { key: key.to_string(), path: path.to_path_buf() })
    }
}

/// Reads a scene file and loads every asset it references.
pub fn load_scene(path: &Path) -> Result<Scene, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let config = parse_scene(&text, &base)?;

    let mut models = Vec::with_capacity(config.models.len());
    for (i, m) in config.models.iter().enumerate() {
        require(&format!("model[{i}].mesh"), &m.mesh)?;
        let mesh = load_obj(&m.mesh).map_err(|e| ConfigError::Asset { path: m.mesh.clone(), message: e.to_string() })?;
        let texture = match &m.texture {
            Some(t) => {
                require(&format!("model[{i}].texture"), t)?;
                let img = load_image(t).map_err(|e| ConfigError::Asset { path: t.clone(), message: e.to_string() })?;
                MaterialTexture::new(img).ok_or_else(|| ConfigError::Asset { path: t.clone(), message: "empty texture".into() })?
            }
            None => MaterialTexture::solid([255, 255, 255, 255]),
        };
        models.push(SceneModel { mesh, texture, model_matrix: m.transform.matrix() });
    }

    let calibration = match &config.calibration {
        Some(c) => {
            require("calibration.left", &c.left)?;
            require("calibration.right", &c.right)?;
            let load = |p: &PathBuf| load_calibration::<f64>(p).map_err(|e| ConfigError::Asset { path: p.clone(), message: e.to_string() });
            Some((load(&c.left)?, load(&c.right)?))
        }
        None => None,
    };
    if let SourceConfig::Files { dir } = &config.source {
        if !dir.is_dir() {
            return Err(ConfigError::MissingAsset { key: "source.dir".into(), path: dir.clone() });
        }
    }

    Ok(Scene { config, models, calibration })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[[model]]\nmesh = \"cube.obj\"\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_scene(MINIMAL, Path::new("/scenes")).unwrap();
        assert_eq!(cfg.stereo.half_ipd, 0.032);
        assert_eq!(cfg.models[0].mesh, PathBuf::from("/scenes/cube.obj"));
        assert_eq!(cfg.output.eye_width, 640);
        assert_eq!(cfg.distortion.k, [1.0, 0.22, 0.24, 0.0]);
        assert_eq!(cfg.pinhole, crate::fixtures::reference_pinhole());
    }

    #[test]
    fn omitted_light_uses_default() {
        let cfg = parse_scene(MINIMAL, Path::new(".")).unwrap();
        assert_eq!(cfg.light.direction(), Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(cfg.light.diffuse, [1.0; 3]);
        assert_eq!(cfg.light.ambient, [0.15; 3]);
    }

    #[test]
    fn near_not_below_far_is_rejected() {
        let text = format!("[camera]\nnear = 5.0\nfar = 5.0\n{MINIMAL}");
        match parse_scene(&text, Path::new(".")) {
            Err(ConfigError::Invalid { key, .. }) => assert_eq!(key, "camera.far"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_reported() {
        let text = format!("[stereo]\nipd = 0.065\n{MINIMAL}");
        match parse_scene(&text, Path::new(".")) {
            Err(ConfigError::Syntax(msg)) => assert!(msg.contains("ipd"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn model_is_required() {
        assert!(matches!(parse_scene("", Path::new(".")), Err(ConfigError::Invalid { key, .. }) if key == "model"));
    }

    #[test]
    fn bad_values_name_their_key() {
        let cases = [
            ("[stereo]\nconvergence = 0.0\n", "stereo.convergence"),
            ("[distortion]\nk = [0.0, 0.0, 0.0, 0.0]\n", "distortion.k"),
            ("[light]\ndirection = [0.0, 0.0, 0.0]\n", "light.direction"),
            ("[source]\nkind = \"usb\"\n", "source.kind"),
            ("[pinhole]\nz = 0.0\n", "pinhole.z"),
        ];
        for (prefix, want) in cases {
            match parse_scene(&format!("{prefix}{MINIMAL}"), Path::new(".")) {
                Err(ConfigError::Invalid { key, .. }) => assert_eq!(key, want),
                other => panic!("{want}: unexpected {other:?}"),
            }
        }
        let bad_scale = "[[model]]\nmesh = \"a.obj\"\nscale = [1.0, 0.0, 1.0]\n";
        assert!(matches!(parse_scene(bad_scale, Path::new(".")), Err(ConfigError::Invalid { key, .. }) if key == "model[0].scale"));
    }

    #[test]
    fn missing_assets_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let scene = dir.path().join("scene.toml");
        std::fs::write(&scene, MINIMAL).unwrap();
        match load_scene(&scene) {
            Err(ConfigError::MissingAsset { key, path }) => {
                assert_eq!(key, "model[0].mesh");
                assert_eq!(path, dir.path().join("cube.obj"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
