//! Plain-text calibration files.
//!
//! One value per line in a fixed order: polynomial degree `N`, the `N + 1`
//! coefficients `a0..aN` (lowest order first), then `c`, `d`, `e`, `xc`,
//! `yc`, `width`, `height`. Everything after a `#` is a comment and blank
//! lines are ignored.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::mathcore::Scalar;

use super::{OmniError, OmniIntrinsics};

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("cannot read calibration file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("calibration ends after {found} values, expected {expected}")]
    Truncated { found: usize, expected: usize },
    #[error("line {line}: unexpected trailing value")]
    Trailing { line: usize },
    #[error("invalid calibration: {0}")]
    Invalid(#[from] OmniError),
}

const FIELD_NAMES: [&str; 7] = ["c", "d", "e", "xc", "yc", "width", "height"];

pub fn parse_calibration<T: Scalar>(text: &str) -> Result<OmniIntrinsics<T>, CalibrationError> {
    let values: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let v = l.split('#').next().unwrap_or("").trim();
            (!v.is_empty()).then_some((i + 1, v))
        })
        .collect();

    let number = |idx: usize, what: &str| -> Result<f64, CalibrationError> {
        let (line, raw) = values.get(idx).copied().ok_or(CalibrationError::Truncated {
            found: values.len(),
            expected: idx + 1,
        })?;
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CalibrationError::Parse { line, message: format!("expected a number for {what}, got {raw:?}") })
    };

    let (degree_line, degree_raw) = values.first().copied().ok_or(CalibrationError::Truncated { found: 0, expected: 1 })?;
    let degree: usize = degree_raw.parse().map_err(|_| CalibrationError::Parse {
        line: degree_line,
        message: format!("expected a non-negative integer degree, got {degree_raw:?}"),
    })?;
    let expected = 1 + degree + 1 + FIELD_NAMES.len();

    let mut poly = Vec::with_capacity(degree + 1);
    for k in 0..=degree {
        poly.push(T::lit(number(1 + k, &format!("a{k}"))?));
    }
    let mut fields = [0.0; 7];
    for (i, name) in FIELD_NAMES.iter().enumerate() {
        fields[i] = number(2 + degree + i, name)?;
    }
    if let Some(&(line, _)) = values.get(expected) {
        return Err(CalibrationError::Trailing { line });
    }
    let dim = |idx: usize| -> Result<u32, CalibrationError> {
        let v = fields[idx];
        if v.fract() != 0.0 || v < 1.0 || v > u32::MAX as f64 {
            let line = values[2 + degree + idx].0;
            return Err(CalibrationError::Parse { line, message: format!("{} must be a positive integer", FIELD_NAMES[idx]) });
        }
        Ok(v as u32)
    };
    let (width, height) = (dim(5)?, dim(6)?);
    Ok(OmniIntrinsics::new(
        poly,
        T::lit(fields[0]),
        T::lit(fields[1]),
        T::lit(fields[2]),
        T::lit(fields[3]),
        T::lit(fields[4]),
        width,
        height,
    )?)
}

pub fn load_calibration<T: Scalar>(path: &Path) -> Result<OmniIntrinsics<T>, CalibrationError> {
    let text = std::fs::read_to_string(path).map_err(|source| CalibrationError::Io { path: path.to_path_buf(), source })?;
    parse_calibration(&text)
}

/// Serializes intrinsics in the calibration file format.
pub fn format_calibration<T: Scalar>(intr: &OmniIntrinsics<T>) -> String {
    let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
    let mut s = String::new();
    let poly = intr.poly();
    let (c, d, e) = intr.affine();
    let (xc, yc) = intr.center();
    let (w, h) = intr.size();
    let _ = writeln!(s, "# omnidirectional camera calibration");
    let _ = writeln!(s, "{}  # degree", poly.len() - 1);
    for (k, a) in poly.iter().enumerate() {
        let _ = writeln!(s, "{}  # a{k}", f(*a));
    }
    for (name, v) in FIELD_NAMES.iter().zip([f(c), f(d), f(e), f(xc), f(yc), w as f64, h as f64]) {
        let _ = writeln!(s, "{v}  # {name}");
    }
    s
}

pub fn save_calibration<T: Scalar>(path: &Path, intr: &OmniIntrinsics<T>) -> Result<(), CalibrationError> {
    std::fs::write(path, format_calibration(intr)).map_err(|source| CalibrationError::Io { path: path.to_path_buf(), source })
}
