//! Deterministic CPU rasterizer for the two-pass eye render: an unlit
//! background without depth, then depth-tested, textured, diffusely lit
//! meshes.
//!
//! Screen space has its origin at the top-left corner with y down; pixel
//! `(x, y)` is sampled at `(x + 0.5, y + 0.5)`. NDC depth runs from 0 at the
//! near plane to 1 at the far plane, and the depth test is strict less-than.

mod framebuffer;
mod shading;
mod triangle;

pub use framebuffer::{clear, draw_background, Framebuffer};
pub use shading::{quantize, sample_texture, shade, shade_fragment, FragmentInput, TextureFilter};
pub use triangle::{rasterize_mesh, rasterize_triangle, ClipVertex, Transforms, SUBPIXEL_BITS};
