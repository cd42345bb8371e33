//! Camera frame acquisition from files or a synthetic pattern, plus the
//! latest-value mailbox that hands frame pairs from a producer to the
//! renderer.
//!
//! The right camera of the rig is mounted upside down, so every source
//! returns the right frame rotated by 180 degrees.

mod mailbox;

use std::path::{Path, PathBuf};

use image::{Rgba, RgbaImage};
use thiserror::Error;

pub use mailbox::{FrameMailbox, MailboxEntry};

use crate::imaging::{load_image, ImageIoError};

#[derive(Debug, Error)]
pub enum CaptureError {
    #[error("end of stream")]
    EndOfStream,
    #[error(transparent)]
    Read(#[from] ImageIoError),
    #[error("cannot list frame directory {path}: {source}")]
    Directory {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no frame pairs (left_NNNNNN.png with matching right_NNNNNN.png) in {0}")]
    NoFrames(PathBuf),
    #[error("left and right frames differ in size: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },
    #[error("synthetic frames need a positive size and cell, got {width}x{height} cell {cell}")]
    InvalidPattern { width: u32, height: u32, cell: u32 },
    #[error("mailbox read before the first deposit")]
    ReadBeforeFirstDeposit,
}

/// A matched left/right frame pair, right frame already flipped.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePair {
    pub left: RgbaImage,
    pub right: RgbaImage,
}

/// Rotates by 180 degrees: pixel `(x, y)` moves to `(w-1-x, h-1-y)`.
pub fn flip_180(image: &RgbaImage) -> RgbaImage {
    image::imageops::rotate180(image)
}

pub fn left_frame_name(index: usize) -> String {
    format!("left_{index:06}.png")
}

pub fn right_frame_name(index: usize) -> String {
    format!("right_{index:06}.png")
}

/// Frames seen by each camera before the right one is flipped. The pattern
/// is a checkerboard with a color gradient, shifted by one pixel per frame;
/// the right view is offset horizontally by a quarter cell.
pub fn synthetic_raw_pair(width: u32, height: u32, cell: u32, frame: usize) -> (RgbaImage, RgbaImage) {
    let shift = frame as u32;
    let view = |offset: u32| {
        RgbaImage::from_fn(width, height, |x, y| {
            let on = (((x + shift + offset) / cell) + (y / cell)).is_multiple_of(2);
            let r = (x * 255 / width.max(1)) as u8;
            let g = (y * 255 / height.max(1)) as u8;
            if on {
                Rgba([r / 2 + 128, g / 2 + 128, 230, 255])
            } else {
                Rgba([r / 4, g / 4, 40, 255])
            }
        })
    };
    (view(0), view(cell / 4))
}

#[derive(Debug, Clone)]
enum Kind {
    Files { dir: PathBuf, indices: Vec<usize> },
    Single { left: PathBuf, right: PathBuf },
    Synthetic { width: u32, height: u32, cell: u32, frames: usize },
}

/// A finite stream of frame pairs.
#[derive(Debug, Clone)]
pub struct FrameSource {
    kind: Kind,
    position: usize,
    dimensions: Option<(u32, u32)>,
}

impl FrameSource {
    /// All `left_NNNNNN.png` files in `dir` that have a matching right
    /// frame, in ascending index order.
    pub fn file_sequence(dir: &Path) -> Result<Self, CaptureError> {
        let entries = std::fs::read_dir(dir).map_err(|source| CaptureError::Directory { path: dir.to_path_buf(), source })?;
        let mut indices = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|source| CaptureError::Directory { path: dir.to_path_buf(), source })?;
            let name = entry.file_name();
            let Some(name) = name.to_str() else { continue };
            let Some(digits) = name.strip_prefix("left_").and_then(|n| n.strip_suffix(".png")) else { continue };
            if digits.len() != 6 || !digits.bytes().all(|b| b.is_ascii_digit()) {
                continue;
            }
            let index: usize = digits.parse().expect("six ascii digits");
            if dir.join(right_frame_name(index)).is_file() {
                indices.push(index);
            }
        }
        if indices.is_empty() {
            return Err(CaptureError::NoFrames(dir.to_path_buf()));
        }
        indices.sort_unstable();
        Ok(Self { kind: Kind::Files { dir: dir.to_path_buf(), indices }, position: 0, dimensions: None })
    }

    pub fn single_pair(left: &Path, right: &Path) -> Self {
        Self {
            kind: Kind::Single { left: left.to_path_buf(), right: right.to_path_buf() },
            position: 0,
            dimensions: None,
        }
    }

    pub fn synthetic(width: u32, height: u32, cell: u32, frames: usize) -> Result<Self, CaptureError> {
        if width == 0 || height == 0 || cell == 0 {
            return Err(CaptureError::InvalidPattern { width, height, cell });
        }
        Ok(Self { kind: Kind::Synthetic { width, height, cell, frames }, position: 0, dimensions: Some((width, height)) })
    }

    /// Number of pairs the source yields in total.
    pub fn len(&self) -> usize {
        match &self.kind {
            Kind::Files { indices, .. } => indices.len(),
            Kind::Single { .. } => 1,
            Kind::Synthetic { frames, .. } => *frames,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of the next pair to be returned.
    pub fn frame_index(&self) -> usize {
        self.position
    }

    /// Frame size, known up front for synthetic sources and after the first
    /// read otherwise.
    pub fn dimensions(&self) -> Option<(u32, u32)> {
        self.dimensions
    }

    pub fn next_pair(&mut self) -> Result<FramePair, CaptureError> {
        if self.position >= self.len() {
            return Err(CaptureError::EndOfStream);
        }
        let (left, right_raw) = match &self.kind {
            Kind::Files { dir, indices } => {
                let i = indices[self.position];
                (load_image(&dir.join(left_frame_name(i)))?, load_image(&dir.join(right_frame_name(i)))?)
            }
            Kind::Single { left, right } => (load_image(left)?, load_image(right)?),
            Kind::Synthetic { width, height, cell, .. } => synthetic_raw_pair(*width, *height, *cell, self.position),
        };
        if left.dimensions() != right_raw.dimensions() {
            return Err(CaptureError::DimensionMismatch { left: left.dimensions(), right: right_raw.dimensions() });
        }
        if let Some(d) = self.dimensions {
            if d != left.dimensions() {
                return Err(CaptureError::DimensionMismatch { left: d, right: left.dimensions() });
            }
        }
        self.dimensions = Some(left.dimensions());
        self.position += 1;
        Ok(FramePair { right: flip_180(&right_raw), left })
    }
}

impl Iterator for FrameSource {
    type Item = Result<FramePair, CaptureError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.next_pair() {
            Err(CaptureError::EndOfStream) => None,
            other => Some(other),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::save_image;
    use proptest::prelude::*;

    #[test]
    fn flip_small_cases() {
        let one = RgbaImage::from_pixel(1, 1, Rgba([1, 2, 3, 4]));
        assert_eq!(flip_180(&one), one);
        let mut ab = RgbaImage::new(2, 1);
        ab.put_pixel(0, 0, Rgba([1, 0, 0, 255]));
        ab.put_pixel(1, 0, Rgba([2, 0, 0, 255]));
        let ba = flip_180(&ab);
        assert_eq!(ba.get_pixel(0, 0)[0], 2);
        assert_eq!(ba.get_pixel(1, 0)[0], 1);
    }

    proptest! {
        #[test]
        fn flip_is_involution_and_keeps_histogram(w in 1u32..12, h in 1u32..12, seed in any::<u64>()) {
            let img = RgbaImage::from_fn(w, h, |x, y| {
                let v = seed.wrapping_mul(6364136223846793005).wrapping_add((x * 131 + y * 7919) as u64);
                Rgba((v >> 24).to_le_bytes()[..4].try_into().unwrap())
            });
            let flipped = flip_180(&img);
            prop_assert_eq!(flip_180(&flipped), img.clone());
            for y in 0..h {
                for x in 0..w {
                    prop_assert_eq!(flipped.get_pixel(w - 1 - x, h - 1 - y), img.get_pixel(x, y));
                }
            }
            let mut a: Vec<[u8; 4]> = img.pixels().map(|p| p.0).collect();
            let mut b: Vec<[u8; 4]> = flipped.pixels().map(|p| p.0).collect();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn synthetic_pair_is_deterministic_and_flipped() {
        let mut s1 = FrameSource::synthetic(40, 30, 8, 2).unwrap();
        let mut s2 = FrameSource::synthetic(40, 30, 8, 2).unwrap();
        let p = s1.next_pair().unwrap();
        assert_eq!(p, s2.next_pair().unwrap());
        let (_, raw_right) = synthetic_raw_pair(40, 30, 8, 0);
        assert_eq!(p.right, flip_180(&raw_right));
        assert_ne!(p.right, raw_right);
        assert!(s1.next_pair().is_ok());
        assert!(matches!(s1.next_pair(), Err(CaptureError::EndOfStream)));
    }

    #[test]
    fn file_sequence_yields_each_pair_then_ends() {
        let dir = tempfile::tempdir().unwrap();
        for i in [3usize, 1, 2] {
            let (l, r) = synthetic_raw_pair(6, 4, 2, i);
            save_image(&l, &dir.path().join(left_frame_name(i))).unwrap();
            save_image(&r, &dir.path().join(right_frame_name(i))).unwrap();
        }
        // unmatched left frame is ignored
        save_image(&RgbaImage::new(6, 4), &dir.path().join(left_frame_name(9))).unwrap();
        let mut src = FrameSource::file_sequence(dir.path()).unwrap();
        assert_eq!(src.len(), 3);
        for i in 1..=3 {
            let pair = src.next_pair().unwrap();
            let (l, r) = synthetic_raw_pair(6, 4, 2, i);
            assert_eq!(pair.left, l);
            assert_eq!(pair.right, flip_180(&r));
        }
        assert!(matches!(src.next_pair(), Err(CaptureError::EndOfStream)));
        assert!(matches!(src.next_pair(), Err(CaptureError::EndOfStream)));
    }

    #[test]
    fn missing_files_report_the_path() {
        let mut src = FrameSource::single_pair(Path::new("/nonexistent/l.png"), Path::new("/nonexistent/r.png"));
        let err = src.next_pair().unwrap_err();
        assert!(err.to_string().contains("/nonexistent/l.png"), "{err}");
        assert!(matches!(FrameSource::file_sequence(Path::new("/nonexistent")), Err(CaptureError::Directory { .. })));
    }

    #[test]
    fn mismatched_pair_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let (l, r) = (dir.path().join("l.png"), dir.path().join("r.png"));
        save_image(&RgbaImage::new(4, 4), &l).unwrap();
        save_image(&RgbaImage::new(5, 4), &r).unwrap();
        assert!(matches!(FrameSource::single_pair(&l, &r).next_pair(), Err(CaptureError::DimensionMismatch { .. })));
    }
}
