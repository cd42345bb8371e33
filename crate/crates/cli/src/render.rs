use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::anyhow;
use stereoar_core::capture::{CaptureError, FrameSource};
use stereoar_core::imaging::save_image;
use stereoar_core::omnicam::{build_undistortion_lut, remap, UndistortionLut};
use stereoar_core::scene::{load_scene, SourceConfig};
use stereoar_core::stereo::{render_stereo_frame, StereoError, StereoRigConfig, StereoScene};

use crate::{CliError, CliResult, RenderArgs, RunStats};

/// Output path of frame `index`: `path` itself for single-frame runs,
/// otherwise `stem_NNNNNN.ext` next to it. `tag` is inserted after the stem.
pub fn frame_output_path(path: &Path, index: usize, sequence: bool, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    let name = if sequence { format!("{stem}{tag}_{index:06}{ext}") } else { format!("{stem}{tag}{ext}") };
    path.with_file_name(name)
}

fn open_source(input: Option<&str>, config: &SourceConfig) -> CliResult<FrameSource> {
    let synthetic = |cfg: &SourceConfig| match *cfg {
        SourceConfig::Synthetic { width, height, frames, cell } => FrameSource::synthetic(width, height, cell, frames),
        _ => {
            let SourceConfig::Synthetic { width, height, frames, cell } = SourceConfig::default() else { unreachable!() };
            FrameSource::synthetic(width, height, cell, frames)
        }
    };
    let source = match (input, config) {
        (Some("synthetic"), cfg) => synthetic(cfg),
        (Some(dir), _) => FrameSource::file_sequence(Path::new(dir)),
        (None, SourceConfig::Files { dir }) => FrameSource::file_sequence(dir),
        (None, cfg) => synthetic(cfg),
    };
    source.map_err(CliError::user)
}

fn undistort_luts(
    scene: &stereoar_core::scene::Scene,
) -> CliResult<Option<(UndistortionLut<f64>, UndistortionLut<f64>)>> {
    let (Some((left, right)), Some(paths)) = (&scene.calibration, &scene.config.calibration) else {
        return Ok(None);
    };
    let pin = &scene.config.pinhole;
    let lut = |intr, path: &Path| {
        let size = paths.undistort_size.unwrap_or_else(|| stereoar_core::omnicam::OmniIntrinsics::size(intr));
        build_undistortion_lut(intr, pin, size).map_err(|e| CliError::user(anyhow!("{}: {e}", path.display())))
    };
    Ok(Some((lut(left, &paths.left)?, lut(right, &paths.right)?)))
}

pub(crate) fn cmd_render(args: &RenderArgs) -> CliResult<RunStats> {
    let start = Instant::now();
    let scene = load_scene(&args.scene).map_err(CliError::user)?;
    let mut rig = StereoRigConfig::from_scene(&scene.config);
    if args.no_distortion {
        rig.distortion_enabled = false;
    }
    rig.validate().map_err(CliError::user)?;

    let mut source = open_source(args.input.as_deref(), &scene.config.source)?;
    let count = args.frames.map_or(source.len(), |n| n.min(source.len()));
    if count == 0 {
        return Err(CliError::user(anyhow!("the frame source is empty")));
    }
    let sequence = count > 1;

    let mut stats = RunStats::default();
    let lut_start = Instant::now();
    let luts = undistort_luts(&scene)?;
    let lut_time = lut_start.elapsed();

    let stereo_scene =
        StereoScene { models: &scene.models, light: &scene.config.light, head_position: scene.config.camera.position };
    let pose = scene.config.camera.pose;

    for index in 0..count {
        let pair = match source.next_pair() {
            Ok(p) => p,
            Err(CaptureError::EndOfStream) => break,
            Err(e) => return Err(CliError::user(e)),
        };
        let t0 = Instant::now();
        let (bg_left, bg_right) = match &luts {
            Some((l, r)) => {
                let remap_user = |e| CliError::user(anyhow!("camera frame does not fit the calibration: {e}"));
                (remap(&pair.left, l).map_err(remap_user)?, remap(&pair.right, r).map_err(remap_user)?)
            }
            None => (pair.left, pair.right),
        };
        let undistort = t0.elapsed() + if index == 0 { lut_time } else { Duration::ZERO };

        let frame = render_stereo_frame(&stereo_scene, pose, &bg_left, &bg_right, &rig).map_err(|e| match e {
            StereoError::InvalidRig(_) | StereoError::Projection(_) => CliError::user(e),
            StereoError::DimensionMismatch { .. } => CliError::internal(e),
        })?;
        stats.add_frame(undistort, &frame.timings);

        let out = frame_output_path(&args.output, index, sequence, "");
        save_image(&frame.combined, &out).map_err(CliError::user)?;
        if args.dump_eyes {
            save_image(&frame.raw_left, &frame_output_path(&args.output, index, sequence, "_left_eye"))
                .map_err(CliError::user)?;
            save_image(&frame.raw_right, &frame_output_path(&args.output, index, sequence, "_right_eye"))
                .map_err(CliError::user)?;
        }
    }
    stats.total = start.elapsed();
    if args.stats {
        println!("{stats}");
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_names() {
        let p = Path::new("out/frame.png");
        assert_eq!(frame_output_path(p, 3, false, ""), PathBuf::from("out/frame.png"));
        assert_eq!(frame_output_path(p, 3, true, ""), PathBuf::from("out/frame_000003.png"));
        assert_eq!(frame_output_path(p, 0, true, "_left_eye"), PathBuf::from("out/frame_left_eye_000000.png"));
    }
}
