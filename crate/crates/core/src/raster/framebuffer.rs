use image::{Rgba, RgbaImage};

use crate::imaging::{bilinear_clamped, to_rgba8};
use crate::mathcore::{orthographic_projection, Vec3};

/// Color and depth target of one render pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Framebuffer {
    color: RgbaImage,
    depth: Vec<f64>,
}

impl Framebuffer {
    /// A framebuffer cleared to transparent black at far depth.
    ///
    /// # Panics
    /// If either dimension is zero.
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "framebuffer dimensions must be positive");
        Self { color: RgbaImage::new(width, height), depth: vec![1.0; width as usize * height as usize] }
    }

    pub fn width(&self) -> u32 {
        self.color.width()
    }

    pub fn height(&self) -> u32 {
        self.color.height()
    }

    pub fn color(&self) -> &RgbaImage {
        &self.color
    }

    pub fn into_color(self) -> RgbaImage {
        self.color
    }

    pub fn depth(&self) -> &[f64] {
        &self.depth
    }

    pub fn depth_at(&self, x: u32, y: u32) -> f64 {
        self.depth[self.index(x, y)]
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 4] {
        self.color.get_pixel(x, y).0
    }

    fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width() as usize + x as usize
    }

    /// Writes `rgba` and `depth` if `depth` is strictly nearer than the
    /// stored value. Returns whether the fragment was kept.
    pub fn depth_test_and_write(&mut self, x: u32, y: u32, depth: f64, rgba: [u8; 4]) -> bool {
        let i = self.index(x, y);
        if depth < self.depth[i] {
            self.depth[i] = depth;
            self.color.put_pixel(x, y, Rgba(rgba));
            true
        } else {
            false
        }
    }

    pub fn clear(&mut self, rgba: [u8; 4]) {
        clear(self, rgba)
    }
}

/// Sets every pixel to `rgba` and every depth to 1.0.
pub fn clear(fb: &mut Framebuffer, rgba: [u8; 4]) {
    for p in fb.color.pixels_mut() {
        *p = Rgba(rgba);
    }
    fb.depth.fill(1.0);
}

/// Draws `image` stretched over the whole viewport with depth test and depth
/// write disabled.
///
/// Each pixel center goes through the pixel-space orthographic projection;
/// the resulting NDC position selects the image coordinate, which is then
/// sampled bilinearly with edge clamping.
pub fn draw_background(fb: &mut Framebuffer, image: &RgbaImage) {
    if image.width() == 0 || image.height() == 0 {
        return;
    }
    let (w, h) = (fb.width(), fb.height());
    let ortho = orthographic_projection(w as f64, h as f64, 0.0, 1.0).expect("positive framebuffer size");
    let (iw, ih) = (image.width() as f64, image.height() as f64);
    for y in 0..h {
        for x in 0..w {
            let ndc = ortho.transform_point(Vec3::new(x as f64 + 0.5, y as f64 + 0.5, 0.0));
            let u = (ndc.x + 1.0) * 0.5;
            let v = (1.0 - ndc.y) * 0.5;
            let sx = (u * iw - 0.5).clamp(0.0, iw - 1.0);
            let sy = (v * ih - 0.5).clamp(0.0, ih - 1.0);
            fb.color.put_pixel(x, y, to_rgba8(bilinear_clamped(image, sx, sy)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(w: u32, h: u32) -> RgbaImage {
        RgbaImage::from_fn(w, h, |x, y| Rgba([(x * 37 % 256) as u8, (y * 11 % 256) as u8, ((x ^ y) % 256) as u8, 255]))
    }

    #[test]
    fn clear_sets_color_and_far_depth() {
        let mut fb = Framebuffer::new(7, 5);
        fb.depth_test_and_write(3, 3, 0.25, [1, 2, 3, 4]);
        clear(&mut fb, [10, 20, 30, 255]);
        assert_eq!(fb.pixel(6, 4), [10, 20, 30, 255]);
        assert_eq!(fb.depth_at(0, 0), 1.0);
        let once = fb.clone();
        clear(&mut fb, [10, 20, 30, 255]);
        assert_eq!(fb, once);
    }

    #[test]
    fn background_of_viewport_size_is_exact_copy() {
        for (w, h) in [(64, 64), (640, 800), (33, 17)] {
            let img = pattern(w, h);
            let mut fb = Framebuffer::new(w, h);
            draw_background(&mut fb, &img);
            assert_eq!(fb.color(), &img, "{w}x{h}");
        }
    }

    #[test]
    fn background_leaves_depth_untouched() {
        let mut fb = Framebuffer::new(20, 10);
        fb.depth_test_and_write(4, 4, 0.5, [0; 4]);
        let before = fb.depth().to_vec();
        draw_background(&mut fb, &pattern(37, 23));
        assert_eq!(fb.depth(), &before[..]);
    }

    #[test]
    fn depth_test_is_strict() {
        let mut fb = Framebuffer::new(1, 1);
        assert!(fb.depth_test_and_write(0, 0, 0.5, [1, 1, 1, 1]));
        assert!(!fb.depth_test_and_write(0, 0, 0.5, [2, 2, 2, 2]));
        assert_eq!(fb.pixel(0, 0), [1, 1, 1, 1]);
        assert!(!fb.depth_test_and_write(0, 0, 1.0, [3; 4]));
    }
}
