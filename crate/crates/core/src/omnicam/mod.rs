//! Omnidirectional polynomial camera model for fisheye lenses.
//!
//! A pixel `(u, v)` is related to sensor coordinates `(u', v')` by an affine
//! stretch about the distortion center,
//!
//! ```text
//! [u]   [c d] [u']   [xc]
//! [v] = [e 1] [v'] + [yc]
//! ```
//!
//! and the sensor point back-projects to the ray `(u', v', f(rho))` where
//! `rho = |(u', v')|` and `f(rho) = a0 + a1 rho + ... + aN rho^N`.
//!
//! Pixel coordinates put integer values at pixel centers; `u` runs along the
//! image width and `v` along its height.

mod calib;
mod fit;
mod lut;
mod model;

pub use calib::{format_calibration, load_calibration, parse_calibration, save_calibration, CalibrationError};
pub use fit::{fit_poly, Correspondence, PolyFit};
pub use lut::{build_undistortion_lut, remap, UndistortionLut, VirtualPinhole};
pub use model::OmniIntrinsics;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OmniError {
    #[error("projection polynomial has no coefficients")]
    EmptyPolynomial,
    #[error("constant coefficient a0 must be nonzero")]
    DegenerateAxis,
    #[error("image size must be positive, got {width}x{height}")]
    ImageSize { width: u32, height: u32 },
    #[error("affine matrix [[c, d], [e, 1]] is singular (det = {0})")]
    SingularAffine(f64),
    #[error("point lies outside the camera field of view")]
    NoProjection,
    #[error("image is {actual:?} but the lookup table expects {expected:?}")]
    DimensionMismatch { expected: (u32, u32), actual: (u32, u32) },
    #[error("design matrix is rank deficient ({samples} samples for degree {degree})")]
    RankDeficient { samples: usize, degree: usize },
    #[error("virtual pinhole focal distance z must be nonzero")]
    ZeroFocal,
}
