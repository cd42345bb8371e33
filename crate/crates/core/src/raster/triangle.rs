use crate::mathcore::{Mat4, Vec3, Vec4};
use crate::scene::{Light, MaterialTexture, Mesh};

use super::framebuffer::Framebuffer;
use super::shading::{quantize, shade_fragment, FragmentInput, TextureFilter};

/// Sub-pixel precision of snapped screen coordinates.
pub const SUBPIXEL_BITS: u32 = 8;
const SUBPIXEL: i64 = 1 << SUBPIXEL_BITS;
/// Clip-space guard band, in multiples of w.
const GUARD_BAND: f64 = 64.0;

/// A vertex after the model-view-projection transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipVertex {
    pub position: Vec4<f64>,
    pub uv: [f64; 2],
    pub normal: Vec3<f64>,
}

impl ClipVertex {
    fn lerp(&self, other: &Self, t: f64) -> Self {
        let l = |a: f64, b: f64| a + (b - a) * t;
        let p = |a: Vec4<f64>, b: Vec4<f64>| Vec4::new(l(a.x, b.x), l(a.y, b.y), l(a.z, b.z), l(a.w, b.w));
        Self {
            position: p(self.position, other.position),
            uv: [l(self.uv[0], other.uv[0]), l(self.uv[1], other.uv[1])],
            normal: Vec3::new(l(self.normal.x, other.normal.x), l(self.normal.y, other.normal.y), l(self.normal.z, other.normal.z)),
        }
    }
}

/// Model, view and projection matrices of one draw call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transforms {
    pub model: Mat4<f64>,
    pub view: Mat4<f64>,
    pub projection: Mat4<f64>,
}

impl Transforms {
    pub fn mvp(&self) -> Mat4<f64> {
        self.model * self.view * self.projection
    }
}

fn outside_all(tri: &[ClipVertex; 3], plane: impl Fn(&Vec4<f64>) -> f64) -> bool {
    tri.iter().all(|v| plane(&v.position) < 0.0)
}

/// Sutherland-Hodgman against the half-space `plane(p) >= 0`.
fn clip_polygon(poly: &[ClipVertex], plane: impl Fn(&Vec4<f64>) -> f64) -> Vec<ClipVertex> {
    let mut out = Vec::with_capacity(poly.len() + 2);
    for i in 0..poly.len() {
        let a = &poly[i];
        let b = &poly[(i + 1) % poly.len()];
        let (da, db) = (plane(&a.position), plane(&b.position));
        if da >= 0.0 {
            out.push(*a);
        }
        if (da >= 0.0) != (db >= 0.0) {
            out.push(a.lerp(b, da / (da - db)));
        }
    }
    out
}

#[derive(Clone, Copy)]
struct ScreenVertex {
    x: i64,
    y: i64,
    z: f64,
    inv_w: f64,
    uv_w: [f64; 2],
    n_w: Vec3<f64>,
}

fn to_screen(v: &ClipVertex, width: u32, height: u32) -> ScreenVertex {
    let inv_w = 1.0 / v.position.w;
    let nx = v.position.x * inv_w;
    let ny = v.position.y * inv_w;
    let sx = (nx + 1.0) * 0.5 * width as f64;
    let sy = (1.0 - ny) * 0.5 * height as f64;
    ScreenVertex {
        x: (sx * SUBPIXEL as f64).round() as i64,
        y: (sy * SUBPIXEL as f64).round() as i64,
        z: v.position.z * inv_w,
        inv_w,
        uv_w: [v.uv[0] * inv_w, v.uv[1] * inv_w],
        n_w: v.normal * inv_w,
    }
}

fn edge(a: &ScreenVertex, b: &ScreenVertex, px: i64, py: i64) -> i64 {
    (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x)
}

/// Top edges (horizontal, interior below) and left edges own the pixels
/// lying exactly on them.
fn is_top_left(a: &ScreenVertex, b: &ScreenVertex) -> bool {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    dy < 0 || (dy == 0 && dx > 0)
}

fn raster_screen_triangle(
    width: u32,
    height: u32,
    v: [ScreenVertex; 3],
    emit: &mut impl FnMut(u32, u32, &FragmentInput),
) {
    let [a, mut b, mut c] = v;
    let mut area = edge(&a, &b, c.x, c.y);
    if area == 0 {
        return;
    }
    if area < 0 {
        std::mem::swap(&mut b, &mut c);
        area = -area;
    }
    let min_x = a.x.min(b.x).min(c.x);
    let max_x = a.x.max(b.x).max(c.x);
    let min_y = a.y.min(b.y).min(c.y);
    let max_y = a.y.max(b.y).max(c.y);
    let half = SUBPIXEL / 2;
    // pixel px has its center at px * SUBPIXEL + half
    let x0 = ((min_x - half).div_euclid(SUBPIXEL)).max(0);
    let x1 = ((max_x - half).div_euclid(SUBPIXEL) + 1).min(width as i64 - 1);
    let y0 = ((min_y - half).div_euclid(SUBPIXEL)).max(0);
    let y1 = ((max_y - half).div_euclid(SUBPIXEL) + 1).min(height as i64 - 1);
    if x0 > x1 || y0 > y1 {
        return;
    }
    let bias = |p: &ScreenVertex, q: &ScreenVertex| if is_top_left(p, q) { 0 } else { -1 };
    let (bias_bc, bias_ca, bias_ab) = (bias(&b, &c), bias(&c, &a), bias(&a, &b));
    let inv_area = 1.0 / area as f64;
    for py in y0..=y1 {
        let sy = py * SUBPIXEL + half;
        for px in x0..=x1 {
            let sx = px * SUBPIXEL + half;
            let w0 = edge(&b, &c, sx, sy);
            let w1 = edge(&c, &a, sx, sy);
            let w2 = edge(&a, &b, sx, sy);
            if w0 + bias_bc < 0 || w1 + bias_ca < 0 || w2 + bias_ab < 0 {
                continue;
            }
            let (l0, l1, l2) = (w0 as f64 * inv_area, w1 as f64 * inv_area, w2 as f64 * inv_area);
            let depth = l0 * a.z + l1 * b.z + l2 * c.z;
            if !(0.0..=1.0).contains(&depth) {
                continue;
            }
            let iw = l0 * a.inv_w + l1 * b.inv_w + l2 * c.inv_w;
            let k = 1.0 / iw;
            let uv = [
                (l0 * a.uv_w[0] + l1 * b.uv_w[0] + l2 * c.uv_w[0]) * k,
                (l0 * a.uv_w[1] + l1 * b.uv_w[1] + l2 * c.uv_w[1]) * k,
            ];
            let normal = (a.n_w * l0 + b.n_w * l1 + c.n_w * l2) * k;
            emit(px as u32, py as u32, &FragmentInput { uv, normal, depth });
        }
    }
}

/// Rasterizes one clip-space triangle into a `width x height` viewport,
/// calling `emit` once per covered pixel center.
///
/// Triangles entirely outside any frustum plane are rejected; the near plane
/// (`z >= 0`) and a guard band far outside the viewport clip the rest.
/// Coverage follows the top-left rule on a grid snapped to
/// 1/256 pixel, so triangles sharing an edge cover each pixel on it once.
/// Winding is ignored.
pub fn rasterize_triangle(width: u32, height: u32, tri: &[ClipVertex; 3], mut emit: impl FnMut(u32, u32, &FragmentInput)) {
    if outside_all(tri, |p| p.w + p.x)
        || outside_all(tri, |p| p.w - p.x)
        || outside_all(tri, |p| p.w + p.y)
        || outside_all(tri, |p| p.w - p.y)
        || outside_all(tri, |p| p.z)
        || outside_all(tri, |p| p.w - p.z)
    {
        return;
    }
    let needs_clip = tri.iter().any(|v| {
        let p = v.position;
        p.z < 0.0 || p.x.abs() > GUARD_BAND * p.w || p.y.abs() > GUARD_BAND * p.w
    });
    let poly: Vec<ClipVertex> = if needs_clip {
        let mut poly = clip_polygon(tri, |p| p.z);
        for plane in [
            (|p: &Vec4<f64>| GUARD_BAND * p.w - p.x) as fn(&Vec4<f64>) -> f64,
            |p| GUARD_BAND * p.w + p.x,
            |p| GUARD_BAND * p.w - p.y,
            |p| GUARD_BAND * p.w + p.y,
        ] {
            if poly.len() < 3 {
                return;
            }
            poly = clip_polygon(&poly, plane);
        }
        poly
    } else {
        tri.to_vec()
    };
    if poly.len() < 3 || poly.iter().any(|v| !(v.position.w > 0.0)) {
        return;
    }
    let screen: Vec<ScreenVertex> = poly.iter().map(|v| to_screen(v, width, height)).collect();
    for i in 1..screen.len() - 1 {
        raster_screen_triangle(width, height, [screen[0], screen[i], screen[i + 1]], &mut emit);
    }
}

/// Draws a textured, lit mesh with depth test and depth write.
pub fn rasterize_mesh(
    fb: &mut Framebuffer,
    mesh: &Mesh,
    texture: &MaterialTexture,
    transforms: &Transforms,
    light: &Light,
    filter: TextureFilter,
) {
    let mvp = transforms.mvp();
    let normal_matrix = transforms.model.normal_matrix();
    let clip: Vec<ClipVertex> = mesh
        .vertices()
        .iter()
        .map(|v| ClipVertex {
            position: mvp.transform(v.position.point()),
            uv: v.uv,
            normal: normal_matrix.transform_direction(v.normal),
        })
        .collect();
    let (w, h) = (fb.width(), fb.height());
    for idx in mesh.indices().chunks_exact(3) {
        let tri = [clip[idx[0] as usize], clip[idx[1] as usize], clip[idx[2] as usize]];
        rasterize_triangle(w, h, &tri, |x, y, frag| {
            if frag.depth < fb.depth_at(x, y) {
                let color = quantize(shade_fragment(frag, texture, light, filter));
                fb.depth_test_and_write(x, y, frag.depth, color);
            }
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(x: f64, y: f64, z: f64, w: f64) -> ClipVertex {
        ClipVertex { position: Vec4::new(x, y, z, w), uv: [0.0, 0.0], normal: Vec3::new(0.0, 0.0, -1.0) }
    }

    fn coverage(w: u32, h: u32, tris: &[[ClipVertex; 3]]) -> Vec<u32> {
        let mut hits = vec![0u32; (w * h) as usize];
        for t in tris {
            rasterize_triangle(w, h, t, |x, y, _| hits[(y * w + x) as usize] += 1);
        }
        hits
    }

    #[test]
    fn full_screen_quad_covers_every_pixel_once() {
        let (a, b, c, d) = (cv(-1.0, 1.0, 0.5, 1.0), cv(1.0, 1.0, 0.5, 1.0), cv(1.0, -1.0, 0.5, 1.0), cv(-1.0, -1.0, 0.5, 1.0));
        let hits = coverage(16, 12, &[[a, b, c], [a, c, d]]);
        assert!(hits.iter().all(|&n| n == 1));
    }

    #[test]
    fn triangle_behind_camera_is_dropped() {
        let hits = coverage(8, 8, &[[cv(-1.0, -1.0, -2.0, -1.0), cv(1.0, -1.0, -2.0, -1.0), cv(0.0, 1.0, -2.0, -1.0)]]);
        assert!(hits.iter().all(|&n| n == 0));
    }

    #[test]
    fn near_clipped_triangle_keeps_visible_part() {
        // one vertex behind the near plane
        let tri = [cv(-0.5, -0.5, 0.5, 1.0), cv(0.5, -0.5, 0.5, 1.0), cv(0.0, 0.5, -0.5, 1.0)];
        let hits = coverage(32, 32, &[tri]);
        let covered = hits.iter().filter(|&&n| n == 1).count();
        assert!(covered > 0 && covered < 32 * 32 / 8);
    }

    #[test]
    fn winding_does_not_matter() {
        let t = [cv(-0.7, -0.3, 0.2, 1.0), cv(0.6, -0.8, 0.2, 1.0), cv(0.1, 0.9, 0.2, 1.0)];
        let r = [t[0], t[2], t[1]];
        assert_eq!(coverage(40, 40, &[t]), coverage(40, 40, &[r]));
    }

    #[test]
    fn huge_triangle_is_clipped_to_guard_band() {
        let t = [cv(-1e6, -1e6, 0.5, 1.0), cv(1e6, -1e6, 0.5, 1.0), cv(0.0, 1e6, 0.5, 1.0)];
        assert!(coverage(10, 10, &[t]).iter().all(|&n| n == 1));
    }

    #[test]
    fn uv_interpolation_is_perspective_correct() {
        // screen triangle (0,64) (64,64) (0,0); vertex b sits three times as far
        let mut a = cv(-1.0, -1.0, 0.0, 1.0);
        let mut b = cv(3.0, -3.0, 2.5, 3.0);
        let c = cv(-1.0, 1.0, 0.0, 1.0);
        a.uv = [0.0, 0.0];
        b.uv = [1.0, 0.0];
        let mut seen = 0;
        rasterize_triangle(64, 64, &[a, b, c], |x, y, f| {
            let l1 = (x as f64 + 0.5) / 64.0;
            let l2 = (64.0 - (y as f64 + 0.5)) / 64.0;
            let l0 = 1.0 - l1 - l2;
            let want = (l1 / 3.0) / (l0 + l1 / 3.0 + l2);
            assert!((f.uv[0] - want).abs() < 1e-9, "({x},{y}) {} vs {want}", f.uv[0]);
            seen += 1;
        });
        assert!(seen > 1500);
    }
}
