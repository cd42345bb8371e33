use image::RgbaImage;

use crate::imaging::{bilinear_clamped, to_rgba8, OPAQUE_BLACK};

/// Pixel index of an NDC point; the distortion center is snapped to it so
/// that it is an exact fixed point.
pub fn ndc_to_pixel_center(center_ndc: [f64; 2], width: u32, height: u32) -> (f64, f64) {
    let x = ((center_ndc[0] + 1.0) * 0.5 * width as f64).floor();
    let y = ((1.0 - center_ndc[1]) * 0.5 * height as f64).floor();
    (x.clamp(0.0, width as f64 - 1.0), y.clamp(0.0, height as f64 - 1.0))
}

/// Radial scale factor `(k0 + k1 r^2 + k2 r^4 + k3 r^6) * scale`.
pub fn radial_factor(k: [f64; 4], scale: f64, r2: f64) -> f64 {
    (k[0] + r2 * (k[1] + r2 * (k[2] + r2 * k[3]))) * scale
}

/// Inverse-mapped barrel distortion.
///
/// Output pixel `p` samples the source at `c + (p - c) * factor(r)`, where `c`
/// is the distortion center and `r = |p - c| / (width / 2)`. Samples are
/// bilinear; points outside the source are opaque black.
pub fn barrel_distort(image: &RgbaImage, k: [f64; 4], center_ndc: [f64; 2], scale: f64) -> RgbaImage {
    let (w, h) = image.dimensions();
    if w == 0 || h == 0 {
        return image.clone();
    }
    let (cx, cy) = ndc_to_pixel_center(center_ndc, w, h);
    let norm = 2.0 / w as f64;
    let (max_x, max_y) = ((w - 1) as f64, (h - 1) as f64);
    RgbaImage::from_fn(w, h, |x, y| {
        let dx = x as f64 - cx;
        let dy = y as f64 - cy;
        let r2 = (dx * norm) * (dx * norm) + (dy * norm) * (dy * norm);
        let f = radial_factor(k, scale, r2);
        let sx = cx + dx * f;
        let sy = cy + dy * f;
        if (0.0..=max_x).contains(&sx) && (0.0..=max_y).contains(&sy) {
            to_rgba8(bilinear_clamped(image, sx, sy))
        } else {
            OPAQUE_BLACK
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgba;

    const DK1: [f64; 4] = [1.0, 0.22, 0.24, 0.0];

    fn gradient(w: u32, h: u32) -> RgbaImage {
        RgbaImage::from_fn(w, h, |x, y| Rgba([(x * 255 / w) as u8, (y * 255 / h) as u8, 128, 255]))
    }

    #[test]
    fn unit_polynomial_is_identity() {
        let img = gradient(97, 61);
        let out = barrel_distort(&img, [1.0, 0.0, 0.0, 0.0], [0.0, 0.0], 1.0);
        for (a, b) in img.pixels().zip(out.pixels()) {
            for c in 0..4 {
                assert!((a[c] as i32 - b[c] as i32).abs() <= 1);
            }
        }
    }

    #[test]
    fn center_is_fixed_for_any_coefficients() {
        let img = gradient(64, 48);
        for (k, center) in [(DK1, [0.0, 0.0]), ([0.7, -0.1, 0.5, 0.3], [0.3, -0.25])] {
            let out = barrel_distort(&img, k, center, 1.3);
            let (cx, cy) = ndc_to_pixel_center(center, 64, 48);
            assert_eq!(out.get_pixel(cx as u32, cy as u32), img.get_pixel(cx as u32, cy as u32));
        }
    }

    #[test]
    fn dimensions_preserved_and_not_idempotent() {
        let img = gradient(50, 40);
        let once = barrel_distort(&img, DK1, [0.0, 0.0], 1.0);
        assert_eq!(once.dimensions(), img.dimensions());
        assert_ne!(barrel_distort(&once, DK1, [0.0, 0.0], 1.0), once);
    }

    #[test]
    fn straight_line_bows_away_from_center() {
        // a vertical line right of center, then locate it in every output row
        let (w, h) = (201u32, 201u32);
        let line_x = 160u32;
        let img = RgbaImage::from_fn(w, h, |x, _| if x == line_x { Rgba([255; 4]) } else { OPAQUE_BLACK });
        let k = [1.0, 0.3, 0.0, 0.0];
        let out = barrel_distort(&img, k, [0.0, 0.0], 1.0);
        let (cx, cy) = ndc_to_pixel_center([0.0, 0.0], w, h);
        let column = |y: u32| -> Option<f64> {
            let (mut sum, mut wsum) = (0.0, 0.0);
            for x in 0..w {
                let v = out.get_pixel(x, y)[0] as f64;
                sum += v * x as f64;
                wsum += v;
            }
            (wsum > 0.0).then(|| sum / wsum)
        };
        let mid = column(cy as u32).unwrap();
        let top = column(cy as u32 - 60).unwrap();
        let bottom = column(cy as u32 + 60).unwrap();
        // farther from center at the middle row than towards the ends
        assert!(mid - cx > top - cx && mid - cx > bottom - cx, "{top} {mid} {bottom}");
        // forward oracle: solve q * f(|q|) = p for the middle row
        let norm = 2.0 / w as f64;
        let target = line_x as f64 - cx;
        let (mut lo, mut hi) = (0.0, target);
        for _ in 0..60 {
            let q = 0.5 * (lo + hi);
            if q * radial_factor(k, 1.0, (q * norm).powi(2)) < target {
                lo = q;
            } else {
                hi = q;
            }
        }
        assert!((mid - cx - lo).abs() < 0.75, "{mid} vs {}", cx + lo);
    }
}
