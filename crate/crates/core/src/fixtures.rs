//! Calibration fixtures.
//!
//! The right-camera intrinsics come from a published rig whose listing only
//! discloses the constant coefficient `a0` and the top coefficient `a9`
//! (zero); the middle coefficients `a1..a8` were elided and are stored as
//! zero placeholders. With those placeholders the polynomial is constant and
//! the model degenerates to a pinhole of focal length `a0`, looking down +z.

use crate::omnicam::{OmniIntrinsics, VirtualPinhole};

/// Degree of the published right-camera polynomial (`p0..p9`).
pub const REFERENCE_POLY_DEGREE: usize = 9;

pub fn reference_right_camera() -> OmniIntrinsics<f64> {
    let mut poly = vec![0.0; REFERENCE_POLY_DEGREE + 1];
    poly[0] = 712.870100;
    OmniIntrinsics::new(poly, 1.000052, 0.000060, -0.000032, 236.646089, 394.135741, 752, 480)
        .expect("fixture intrinsics are valid")
}

/// Virtual pinhole values published alongside the right camera.
pub fn reference_pinhole() -> VirtualPinhole<f64> {
    VirtualPinhole { nxc: 79.4, nyc: 67.2, z: -177.0 }
}

/// Polynomial with every coefficient nonzero, shaped like a real fisheye
/// calibration (negative `a0`, axis along -z, over 180 degrees of view on a
/// 752x480 sensor).
pub const SYNTHETIC_FISHEYE_POLY: [f64; 5] = [-250.0, 0.05, 1.3e-3, -2.0e-7, 1.5e-9];

pub fn synthetic_fisheye() -> OmniIntrinsics<f64> {
    OmniIntrinsics::new(SYNTHETIC_FISHEYE_POLY.to_vec(), 1.0, 0.0, 0.0, 376.0, 240.0, 752, 480)
        .expect("fixture intrinsics are valid")
}

/// Corner indices (1-based) of the 12 outward-wound triangles of the unit
/// cube in `[0, 1]^3`.
const CUBE_FACES: [[usize; 3]; 12] = [
    [1, 3, 2],
    [1, 4, 3],
    [5, 6, 7],
    [5, 7, 8],
    [1, 2, 6],
    [1, 6, 5],
    [4, 8, 7],
    [4, 7, 3],
    [1, 5, 8],
    [1, 8, 4],
    [2, 3, 7],
    [2, 7, 6],
];

const CUBE_CORNERS: [[u8; 3]; 8] = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]];

/// OBJ text of the unit cube: 8 positions, 4 texture coordinates and 12
/// triangles without normals, so the loader derives flat ones.
pub fn unit_cube_obj() -> String {
    use std::fmt::Write as _;
    let mut s = String::from("# unit cube spanning [0, 1]^3\n");
    for c in CUBE_CORNERS {
        let _ = writeln!(s, "v {} {} {}", c[0], c[1], c[2]);
    }
    s.push_str("vt 0 0\nvt 1 0\nvt 1 1\nvt 0 1\n");
    for f in CUBE_FACES {
        let corners = f.map(|i| CUBE_CORNERS[i - 1]);
        // the axis shared by all three corners is the face normal axis
        let axis = (0..3).find(|&a| corners.iter().all(|c| c[a] == corners[0][a])).expect("planar face");
        let (ua, va) = ((axis + 1) % 3, (axis + 2) % 3);
        let vt = |c: [u8; 3]| match (c[ua], c[va]) {
            (0, 0) => 1,
            (1, 0) => 2,
            (1, 1) => 3,
            _ => 4,
        };
        let _ = writeln!(s, "f {}/{} {}/{} {}/{}", f[0], vt(corners[0]), f[1], vt(corners[1]), f[2], vt(corners[2]));
    }
    s
}

/// Checkerboard used to texture the fixture models.
pub fn checker() -> crate::scene::MaterialTexture {
    crate::scene::checker_texture(256, 8, [235, 120, 40, 255], [250, 245, 230, 255])
}

/// Grid test card for undistortion: dark lines every 32 pixels on a light
/// gradient.
pub fn grid_image(width: u32, height: u32) -> image::RgbaImage {
    image::RgbaImage::from_fn(width, height, |x, y| {
        if x % 32 == 0 || y % 32 == 0 {
            image::Rgba([20, 20, 20, 255])
        } else {
            image::Rgba([200, (150 + y * 100 / height) as u8, (150 + x * 100 / width) as u8, 255])
        }
    })
}

fn calibration_file(header: &str, intr: &OmniIntrinsics<f64>) -> String {
    let mut s = String::new();
    for line in header.lines() {
        s.push_str("# ");
        s.push_str(line);
        s.push('\n');
    }
    s.push_str(&crate::omnicam::format_calibration(intr));
    s
}

/// Writes the generated fixture files (meshes, textures, calibrations and
/// test images) into `dir`. `scene.toml` is maintained by hand.
pub fn write_fixture_files(dir: &std::path::Path) -> Result<(), Box<dyn std::error::Error>> {
    use crate::imaging::save_image;
    std::fs::create_dir_all(dir.join("calib"))?;
    std::fs::write(dir.join("cube.obj"), unit_cube_obj())?;
    std::fs::write(dir.join("sphere.obj"), crate::scene::to_obj_string(&crate::scene::uv_sphere(0.5, 16, 32)))?;
    save_image(checker().image(), &dir.join("checker.png"))?;
    save_image(&grid_image(752, 480), &dir.join("grid.png"))?;
    std::fs::write(
        dir.join("calib/right_camera.calib"),
        calibration_file(
            "Right camera of the reference rig.\n\
             Only a0 and a9 are published; a1..a8 are placeholders set to 0,\n\
             which makes the polynomial constant (a pinhole with focal a0).",
            &reference_right_camera(),
        ),
    )?;
    std::fs::write(
        dir.join("calib/synthetic_fisheye.calib"),
        calibration_file("Synthetic wide-angle fisheye with a full degree-4 polynomial.", &synthetic_fisheye()),
    )?;
    Ok(())
}
