use image::RgbaImage;
use rayon::prelude::*;

use crate::imaging::{bilinear_clamped, to_rgba8, OPAQUE_BLACK};
use crate::mathcore::{Scalar, Vec3};

use super::{OmniError, OmniIntrinsics};

/// Ideal perspective view resampled out of a fisheye frame.
///
/// Output pixel `(x, y)` looks along `(x - cx - nxc, y - cy - nyc, z)`, where
/// `(cx, cy)` is the output image center: `nxc`/`nyc` shift the principal
/// point and `z` is the focal distance in pixels. The sign of `z` picks the
/// viewing direction and must agree with the sign of the camera's `a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualPinhole<T> {
    pub nxc: T,
    pub nyc: T,
    pub z: T,
}

impl<T: Scalar> VirtualPinhole<T> {
    pub fn validate(&self) -> Result<(), OmniError> {
        if self.z == T::zero() || !self.z.is_finite() {
            return Err(OmniError::ZeroFocal);
        }
        Ok(())
    }

    /// Viewing ray of output pixel `(x, y)` in an `out_w x out_h` view.
    pub fn ray(&self, x: u32, y: u32, out_w: u32, out_h: u32) -> Vec3<T> {
        let cx = T::lit(out_w as f64) / T::lit(2.0);
        let cy = T::lit(out_h as f64) / T::lit(2.0);
        Vec3::new(T::lit(x as f64) - cx - self.nxc, T::lit(y as f64) - cy - self.nyc, self.z)
    }
}

/// Per-output-pixel source coordinates; `None` marks pixels whose ray falls
/// outside the source image.
#[derive(Debug, Clone, PartialEq)]
pub struct UndistortionLut<T> {
    out_width: u32,
    out_height: u32,
    src_width: u32,
    src_height: u32,
    entries: Vec<Option<(T, T)>>,
}

impl<T: Scalar> UndistortionLut<T> {
    /// Builds a table from explicit entries, row-major. Entries outside the
    /// source bounds are turned into sentinels.
    pub fn from_entries(
        out_size: (u32, u32),
        src_size: (u32, u32),
        mut entries: Vec<Option<(T, T)>>,
    ) -> Result<Self, OmniError> {
        if out_size.0 == 0 || out_size.1 == 0 {
            return Err(OmniError::ImageSize { width: out_size.0, height: out_size.1 });
        }
        let expected = out_size.0 as usize * out_size.1 as usize;
        if entries.len() != expected {
            return Err(OmniError::DimensionMismatch {
                expected: out_size,
                actual: (entries.len() as u32, 1),
            });
        }
        let (sw, sh) = (T::lit(src_size.0 as f64), T::lit(src_size.1 as f64));
        for e in entries.iter_mut() {
            if let Some((x, y)) = *e {
                if !(x >= T::zero() && x < sw && y >= T::zero() && y < sh) {
                    *e = None;
                }
            }
        }
        Ok(Self {
            out_width: out_size.0,
            out_height: out_size.1,
            src_width: src_size.0,
            src_height: src_size.1,
            entries,
        })
    }

    pub fn out_size(&self) -> (u32, u32) {
        (self.out_width, self.out_height)
    }

    pub fn src_size(&self) -> (u32, u32) {
        (self.src_width, self.src_height)
    }

    pub fn get(&self, x: u32, y: u32) -> Option<(T, T)> {
        self.entries[(y * self.out_width + x) as usize]
    }

    pub fn entries(&self) -> &[Option<(T, T)>] {
        &self.entries
    }
}

/// Round-off can leave a coordinate that is exactly 0 in theory slightly
/// negative; such values are moved onto the edge.
fn snap_to_edge<T: Scalar>((x, y): (T, T)) -> (T, T) {
    let eps = T::lit(1e-9);
    let snap = |v: T| if v < T::zero() && v > -eps { T::zero() } else { v };
    (snap(x), snap(y))
}

pub fn build_undistortion_lut<T: Scalar>(
    intr: &OmniIntrinsics<T>,
    pin: &VirtualPinhole<T>,
    out_size: (u32, u32),
) -> Result<UndistortionLut<T>, OmniError> {
    pin.validate()?;
    let (w, h) = out_size;
    if w == 0 || h == 0 {
        return Err(OmniError::ImageSize { width: w, height: h });
    }
    let mut entries = vec![None; w as usize * h as usize];
    entries.par_chunks_mut(w as usize).enumerate().for_each(|(y, row)| {
        for (x, slot) in row.iter_mut().enumerate() {
            let ray = pin.ray(x as u32, y as u32, w, h);
            *slot = intr.world_to_cam(ray).ok().map(snap_to_edge).filter(|&p| intr.contains(p));
        }
    });
    Ok(UndistortionLut {
        out_width: w,
        out_height: h,
        src_width: intr.size().0,
        src_height: intr.size().1,
        entries,
    })
}

/// Resamples `image` through the table with bilinear filtering. Sentinel
/// pixels become opaque black.
pub fn remap<T: Scalar>(image: &RgbaImage, lut: &UndistortionLut<T>) -> Result<RgbaImage, OmniError> {
    if image.dimensions() != lut.src_size() {
        return Err(OmniError::DimensionMismatch { expected: lut.src_size(), actual: image.dimensions() });
    }
    let (w, h) = lut.out_size();
    let mut out = RgbaImage::new(w, h);
    let row_bytes = w as usize * 4;
    out.as_mut()
        .par_chunks_mut(row_bytes)
        .zip(lut.entries.par_chunks(w as usize))
        .for_each(|(row, src)| {
            for (px, entry) in row.chunks_exact_mut(4).zip(src) {
                let color = match entry {
                    Some((sx, sy)) => to_rgba8(bilinear_clamped(
                        image,
                        sx.to_f64().unwrap_or(0.0),
                        sy.to_f64().unwrap_or(0.0),
                    )),
                    None => OPAQUE_BLACK,
                };
                px.copy_from_slice(&color.0);
            }
        });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{reference_right_camera, synthetic_fisheye};
    use image::Rgba;

    fn gradient(w: u32, h: u32) -> RgbaImage {
        RgbaImage::from_fn(w, h, |x, y| Rgba([(x * 17 % 256) as u8, (y * 29 % 256) as u8, ((x + y) % 256) as u8, 255]))
    }

    fn identity_lut(w: u32, h: u32) -> UndistortionLut<f64> {
        let entries = (0..h).flat_map(|y| (0..w).map(move |x| Some((x as f64, y as f64)))).collect();
        UndistortionLut::from_entries((w, h), (w, h), entries).unwrap()
    }

    #[test]
    fn identity_table_copies_exactly() {
        let img = gradient(13, 9);
        assert_eq!(remap(&img, &identity_lut(13, 9)).unwrap(), img);
    }

    #[test]
    fn shifted_table_shifts_with_black_edge() {
        let (w, h) = (11, 7);
        let img = gradient(w, h);
        let entries = (0..h).flat_map(|y| (0..w).map(move |x| Some((x as f64 + 1.0, y as f64)))).collect();
        let lut = UndistortionLut::from_entries((w, h), (w, h), entries).unwrap();
        let out = remap(&img, &lut).unwrap();
        for y in 0..h {
            for x in 0..w {
                let want = if x + 1 < w { *img.get_pixel(x + 1, y) } else { OPAQUE_BLACK };
                assert_eq!(*out.get_pixel(x, y), want);
            }
        }
    }

    #[test]
    fn all_sentinel_table_is_black() {
        let lut = UndistortionLut::<f64>::from_entries((4, 3), (5, 5), vec![None; 12]).unwrap();
        let out = remap(&gradient(5, 5), &lut).unwrap();
        assert!(out.pixels().all(|p| *p == OPAQUE_BLACK));
    }

    #[test]
    fn remap_rejects_wrong_source_size() {
        let lut = identity_lut(4, 4);
        assert!(matches!(remap(&gradient(5, 4), &lut), Err(OmniError::DimensionMismatch { .. })));
    }

    #[test]
    fn center_pixel_round_trips_through_model() {
        let intr = synthetic_fisheye();
        let pin = VirtualPinhole { nxc: 0.0, nyc: 0.0, z: -177.0 };
        let lut = build_undistortion_lut(&intr, &pin, (320, 240)).unwrap();
        let src = lut.get(160, 120).unwrap();
        let ray = intr.cam_to_world(src);
        let want = Vec3::new(0.0, 0.0, -1.0);
        assert!((ray - want).norm() < 1e-4);
        assert!((src.0 - 376.0).abs() < 1e-9 && (src.1 - 240.0).abs() < 1e-9);
    }

    #[test]
    fn entries_stay_in_source_bounds() {
        let intr = synthetic_fisheye();
        let lut = build_undistortion_lut(&intr, &VirtualPinhole { nxc: 30.0, nyc: -20.0, z: -60.0 }, (400, 300)).unwrap();
        assert!(lut.entries().iter().flatten().all(|&(x, y)| (0.0..752.0).contains(&x) && (0.0..480.0).contains(&y)));
        assert!(lut.entries().iter().any(Option::is_none));
    }

    #[test]
    fn source_radius_grows_along_output_ray() {
        let intr = synthetic_fisheye();
        let pin = VirtualPinhole { nxc: 0.0, nyc: 0.0, z: -100.0 };
        let (w, h) = (600, 400);
        let lut = build_undistortion_lut(&intr, &pin, (w, h)).unwrap();
        let (cx, cy) = (300i64, 200i64);
        // diagonal ray towards the lower right corner
        let mut radii = Vec::new();
        for t in 0..200i64 {
            let (x, y) = (cx + t, cy + (t * 2) / 3);
            if let Some((sx, sy)) = lut.get(x as u32, y as u32) {
                radii.push((sx - 376.0).hypot(sy - 240.0));
            } else {
                break;
            }
        }
        assert!(radii.len() > 50);
        assert!(radii.windows(2).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn constant_polynomial_matches_pinhole_closed_form() {
        let k = 400.0;
        let intr = OmniIntrinsics::new(vec![k], 1.0002, 0.0003, -0.0001, 320.0, 240.0, 640, 480).unwrap();
        let pin = VirtualPinhole { nxc: 12.5, nyc: -7.0, z: 250.0 };
        let (w, h) = (200u32, 150u32);
        let lut = build_undistortion_lut(&intr, &pin, (w, h)).unwrap();
        for y in 0..h {
            for x in 0..w {
                let dx = x as f64 - 100.0 - 12.5;
                let dy = y as f64 - 75.0 + 7.0;
                let (su, sv) = (dx * k / 250.0, dy * k / 250.0);
                let want = (1.0002 * su + 0.0003 * sv + 320.0, -0.0001 * su + sv + 240.0);
                let got = lut.get(x, y).unwrap();
                assert!((got.0 - want.0).abs() < 1e-9 && (got.1 - want.1).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let intr = reference_right_camera();
        let pin = VirtualPinhole { nxc: 79.4, nyc: 67.2, z: 177.0 };
        let a = build_undistortion_lut(&intr, &pin, (160, 120)).unwrap();
        let b = build_undistortion_lut(&intr, &pin, (160, 120)).unwrap();
        let bits = |l: &UndistortionLut<f64>| -> Vec<Option<(u64, u64)>> {
            l.entries().iter().map(|e| e.map(|(x, y)| (x.to_bits(), y.to_bits()))).collect()
        };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn zero_focal_is_rejected() {
        let intr = reference_right_camera();
        assert_eq!(
            build_undistortion_lut(&intr, &VirtualPinhole { nxc: 0.0, nyc: 0.0, z: 0.0 }, (2, 2)),
            Err(OmniError::ZeroFocal)
        );
    }
}
