use std::fmt::Write as _;

use anyhow::anyhow;
use stereoar_core::mathcore::Vec3;
use stereoar_core::omnicam::{fit_poly, save_calibration, Correspondence, OmniIntrinsics, PolyFit};

use crate::{CliError, CliResult, FitArgs};

/// Parsed correspondence file.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceFile {
    pub center: Option<(f64, f64)>,
    pub size: Option<(u32, u32)>,
    pub samples: Vec<Correspondence<f64>>,
}

/// Reads lines of `X Y Z u v` (a ray and the pixel it projects to), with
/// optional `center XC YC` and `size W H` lines. `#` starts a comment.
pub fn parse_correspondences(text: &str) -> anyhow::Result<CorrespondenceFile> {
    let mut file = CorrespondenceFile { center: None, size: None, samples: Vec::new() };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let nums = |f: &[&str]| -> anyhow::Result<Vec<f64>> {
            f.iter()
                .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| anyhow!("line {}: invalid number {v:?}", i + 1)))
                .collect()
        };
        match fields[0] {
            "center" if fields.len() == 3 => {
                let v = nums(&fields[1..])?;
                file.center = Some((v[0], v[1]));
            }
            "size" if fields.len() == 3 => {
                let p = |v: &str| v.parse::<u32>().ok().filter(|&n| n > 0).ok_or_else(|| anyhow!("line {}: invalid size {v:?}", i + 1));
                file.size = Some((p(fields[1])?, p(fields[2])?));
            }
            _ if fields.len() == 5 => {
                let v = nums(&fields)?;
                file.samples.push(Correspondence { ray: Vec3::new(v[0], v[1], v[2]), pixel: (v[3], v[4]) });
            }
            _ => return Err(anyhow!("line {}: expected `X Y Z u v`, `center XC YC` or `size W H`", i + 1)),
        }
    }
    Ok(file)
}

pub fn format_correspondences(file: &CorrespondenceFile) -> String {
    let mut s = String::from("# X Y Z u v\n");
    if let Some((x, y)) = file.center {
        let _ = writeln!(s, "center {x:?} {y:?}");
    }
    if let Some((w, h)) = file.size {
        let _ = writeln!(s, "size {w} {h}");
    }
    for c in &file.samples {
        let _ = writeln!(s, "{:?} {:?} {:?} {:?} {:?}", c.ray.x, c.ray.y, c.ray.z, c.pixel.0, c.pixel.1);
    }
    s
}

pub(crate) fn cmd_fit(args: &FitArgs) -> CliResult<PolyFit<f64>> {
    let path = &args.correspondences;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::user(anyhow!("cannot read {}: {e}", path.display())))?;
    let file = parse_correspondences(&text).map_err(|e| CliError::user(e.context(path.display().to_string())))?;
    let center = args
        .center
        .or(file.center)
        .ok_or_else(|| CliError::user(anyhow!("no distortion center: pass --center or add a `center` line")))?;
    let (w, h) = args
        .size
        .or(file.size)
        .ok_or_else(|| CliError::user(anyhow!("no image size: pass --size or add a `size` line")))?;
    let fit = fit_poly(&file.samples, center, args.degree).map_err(CliError::user)?;
    let intr = OmniIntrinsics::new(fit.coefficients.clone(), 1.0, 0.0, 0.0, center.0, center.1, w, h)
        .map_err(|e| CliError::user(anyhow!("fitted model is invalid: {e}")))?;
    save_calibration(&args.output, &intr).map_err(CliError::user)?;
    println!("fitted degree {} from {} samples, rms residual {:.3e} px", args.degree, file.samples.len(), fit.rms_residual);
    Ok(fit)
}
