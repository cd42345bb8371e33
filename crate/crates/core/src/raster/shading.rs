use crate::mathcore::Vec3;
use crate::scene::{Light, MaterialTexture};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TextureFilter {
    Nearest,
    #[default]
    Bilinear,
}

/// Interpolated attributes of one fragment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FragmentInput {
    pub uv: [f64; 2],
    /// World-space normal; not necessarily unit length after interpolation.
    pub normal: Vec3<f64>,
    /// NDC depth in `[0, 1]`.
    pub depth: f64,
}

fn texel(texture: &MaterialTexture, x: i64, y: i64) -> [f64; 4] {
    let (w, h) = (texture.width() as i64, texture.height() as i64);
    let p = texture.image().get_pixel(x.rem_euclid(w) as u32, y.rem_euclid(h) as u32).0;
    p.map(|c| c as f64 / 255.0)
}

/// Samples with repeat wrapping; texel `i` has its center at `(i + 0.5) / size`.
/// Channels are returned in `[0, 1]`.
pub fn sample_texture(texture: &MaterialTexture, uv: [f64; 2], mode: TextureFilter) -> [f64; 4] {
    let u = uv[0] - uv[0].floor();
    let v = uv[1] - uv[1].floor();
    let (w, h) = (texture.width() as f64, texture.height() as f64);
    match mode {
        TextureFilter::Nearest => texel(texture, (u * w).floor() as i64, (v * h).floor() as i64),
        TextureFilter::Bilinear => {
            let x = u * w - 0.5;
            let y = v * h - 0.5;
            let (x0, y0) = (x.floor(), y.floor());
            let (fx, fy) = (x - x0, y - y0);
            let (x0, y0) = (x0 as i64, y0 as i64);
            let a = texel(texture, x0, y0);
            let b = texel(texture, x0 + 1, y0);
            let c = texel(texture, x0, y0 + 1);
            let d = texel(texture, x0 + 1, y0 + 1);
            let mut out = [0.0; 4];
            for i in 0..4 {
                let top = a[i] * (1.0 - fx) + b[i] * fx;
                let bottom = c[i] * (1.0 - fx) + d[i] * fx;
                out[i] = top * (1.0 - fy) + bottom * fy;
            }
            out
        }
    }
}

/// Lambertian shading: `texel * (ambient + diffuse * max(n . s, 0))` per
/// color channel, clamped to `[0, 1]`. `normal` must be unit length; alpha is
/// passed through.
pub fn shade(texel: [f64; 4], normal: Vec3<f64>, light: &Light) -> [f64; 4] {
    let lambert = normal.dot(light.to_light()).max(0.0);
    let mut out = texel;
    for i in 0..3 {
        out[i] = (texel[i] * (light.ambient[i] + light.diffuse[i] * lambert)).clamp(0.0, 1.0);
    }
    out[3] = texel[3].clamp(0.0, 1.0);
    out
}

/// Samples the texture at the fragment's uv and lights it with the
/// renormalized interpolated normal. A degenerate normal gets ambient only.
pub fn shade_fragment(frag: &FragmentInput, texture: &MaterialTexture, light: &Light, mode: TextureFilter) -> [f64; 4] {
    let t = sample_texture(texture, frag.uv, mode);
    match frag.normal.normalized() {
        Some(n) => shade(t, n, light),
        None => shade(t, light.to_light() * 0.0, light),
    }
}

/// Converts a `[0, 1]` color to 8 bits per channel.
pub fn quantize(c: [f64; 4]) -> [u8; 4] {
    c.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{Rgba, RgbaImage};

    fn two_by_one() -> MaterialTexture {
        let mut img = RgbaImage::new(2, 1);
        img.put_pixel(0, 0, Rgba([0, 100, 200, 255]));
        img.put_pixel(1, 0, Rgba([100, 200, 0, 255]));
        MaterialTexture::new(img).unwrap()
    }

    #[test]
    fn texel_center_is_exact_in_both_modes() {
        let t = two_by_one();
        for mode in [TextureFilter::Nearest, TextureFilter::Bilinear] {
            assert_eq!(quantize(sample_texture(&t, [0.75, 0.5], mode)), [100, 200, 0, 255]);
            assert_eq!(quantize(sample_texture(&t, [0.25, 0.5], mode)), [0, 100, 200, 255]);
        }
    }

    #[test]
    fn uv_wraps_by_repeat() {
        let t = two_by_one();
        for mode in [TextureFilter::Nearest, TextureFilter::Bilinear] {
            assert_eq!(sample_texture(&t, [1.25, 0.5], mode), sample_texture(&t, [0.25, 0.5], mode));
            assert_eq!(sample_texture(&t, [-0.75, 1.5], mode), sample_texture(&t, [0.25, 0.5], mode));
        }
    }

    #[test]
    fn bilinear_midpoint_is_average() {
        let t = two_by_one();
        let mid = sample_texture(&t, [0.5, 0.5], TextureFilter::Bilinear);
        let want = [50.0, 150.0, 100.0, 255.0].map(|c: f64| c / 255.0);
        for i in 0..4 {
            assert!((mid[i] - want[i]).abs() < 1e-12);
        }
    }

    fn light(diffuse: f64, ambient: f64) -> Light {
        Light::new(Vec3::new(0.0, 0.0, -1.0), [diffuse; 3], [ambient; 3]).unwrap()
    }

    #[test]
    fn facing_away_gives_ambient_only() {
        let l = light(1.0, 0.15);
        let out = shade([1.0, 0.5, 0.2, 1.0], Vec3::new(0.0, 0.0, -1.0), &l);
        assert_eq!(out, [0.15, 0.5 * 0.15, 0.2 * 0.15, 1.0]);
    }

    #[test]
    fn normal_incidence_white_is_full() {
        let out = shade([1.0; 4], Vec3::new(0.0, 0.0, 1.0), &light(1.0, 0.0));
        assert_eq!(out, [1.0; 4]);
    }

    #[test]
    fn half_incidence_example() {
        // light straight down the z axis, normal tilted 60 degrees from it
        let l = light(1.0, 0.15);
        let n = Vec3::new(0.0, 3f64.sqrt() / 2.0, 0.5);
        assert_eq!(n.dot(l.to_light()), 0.5);
        let out = shade([1.0, 0.5, 1.0, 1.0], n, &l);
        assert_eq!(out, [0.65, 0.325, 0.65, 1.0]);
    }

    #[test]
    fn no_light_is_black_and_output_is_clamped() {
        let dark = shade([1.0; 4], Vec3::new(0.0, 0.0, 1.0), &light(0.0, 0.0));
        assert_eq!(&dark[..3], &[0.0; 3]);
        let hot = shade([1.0; 4], Vec3::new(0.0, 0.0, 1.0), &light(1.0, 1.0));
        assert_eq!(&hot[..3], &[1.0; 3]);
    }
}
