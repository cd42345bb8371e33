//! Image buffers and file IO shared by the pipeline stages.
//!
//! All images are 8-bit RGBA in memory. Files are read from PNG or binary
//! PPM (`P6`) and written in the format implied by the extension; PPM output
//! drops the alpha channel.

use std::path::{Path, PathBuf};

use image::{ImageFormat, Rgba, RgbaImage};
use thiserror::Error;

pub type Rgba8 = Rgba<u8>;

pub const OPAQUE_BLACK: Rgba8 = Rgba([0, 0, 0, 255]);

#[derive(Debug, Error)]
pub enum ImageIoError {
    #[error("cannot read image {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("cannot write image {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("unsupported image extension for {0} (expected .png or .ppm)")]
    Extension(PathBuf),
}

fn format_for(path: &Path) -> Result<ImageFormat, ImageIoError> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("png") => Ok(ImageFormat::Png),
        Some("ppm") => Ok(ImageFormat::Pnm),
        _ => Err(ImageIoError::Extension(path.to_path_buf())),
    }
}

pub fn load_image(path: &Path) -> Result<RgbaImage, ImageIoError> {
    let format = format_for(path)?;
    let read = || -> Result<RgbaImage, image::ImageError> {
        let reader = image::ImageReader::open(path)?;
        let mut reader = reader;
        reader.set_format(format);
        Ok(reader.decode()?.to_rgba8())
    };
    read().map_err(|source| ImageIoError::Read { path: path.to_path_buf(), source })
}

pub fn save_image(img: &RgbaImage, path: &Path) -> Result<(), ImageIoError> {
    let format = format_for(path)?;
    let result = match format {
        ImageFormat::Pnm => write_ppm(img, path),
        _ => img.save_with_format(path, format),
    };
    result.map_err(|source| ImageIoError::Write { path: path.to_path_buf(), source })
}

fn write_ppm(img: &RgbaImage, path: &Path) -> Result<(), image::ImageError> {
    use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
    use image::ImageEncoder;
    let rgb = image::DynamicImage::ImageRgba8(img.clone()).to_rgb8();
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    PnmEncoder::new(file)
        .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
        .write_image(rgb.as_raw(), rgb.width(), rgb.height(), image::ExtendedColorType::Rgb8)
}

/// Bilinear sample with integer coordinates at texel centers. Neighbors past
/// the last row or column clamp to the edge. The caller guarantees
/// `0 <= x < width` and `0 <= y < height`.
pub fn bilinear_clamped(img: &RgbaImage, x: f64, y: f64) -> [f64; 4] {
    let (w, h) = img.dimensions();
    let x0 = (x.floor() as i64).clamp(0, w as i64 - 1) as u32;
    let y0 = (y.floor() as i64).clamp(0, h as i64 - 1) as u32;
    let fx = (x - x0 as f64).clamp(0.0, 1.0);
    let fy = (y - y0 as f64).clamp(0.0, 1.0);
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let p = |xx, yy| img.get_pixel(xx, yy).0;
    let (a, b, c, d) = (p(x0, y0), p(x1, y0), p(x0, y1), p(x1, y1));
    let mut out = [0.0; 4];
    for ch in 0..4 {
        let top = a[ch] as f64 + (b[ch] as f64 - a[ch] as f64) * fx;
        let bottom = c[ch] as f64 + (d[ch] as f64 - c[ch] as f64) * fx;
        out[ch] = top + (bottom - top) * fy;
    }
    out
}

/// Rounds a `[0, 255]` float color to 8 bits.
pub fn to_rgba8(c: [f64; 4]) -> Rgba8 {
    Rgba(c.map(|v| v.round().clamp(0.0, 255.0) as u8))
}

/// Horizontal concatenation of two equally sized images.
pub fn concat_horizontal(left: &RgbaImage, right: &RgbaImage) -> RgbaImage {
    let (w, h) = left.dimensions();
    let mut out = RgbaImage::new(w * 2, h);
    image::imageops::replace(&mut out, left, 0, 0);
    image::imageops::replace(&mut out, right, w as i64, 0);
    out
}
