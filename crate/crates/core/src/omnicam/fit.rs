use crate::mathcore::{Scalar, Vec3};

use super::OmniError;

/// A known viewing ray paired with the pixel it was observed at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence<T> {
    pub ray: Vec3<T>,
    pub pixel: (T, T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit<T> {
    /// `a0..a_degree`, lowest order first.
    pub coefficients: Vec<T>,
    /// RMS of `f(rho_i) - z_i * rho_i / r_i` over off-axis samples, in pixels.
    pub rms_residual: T,
}

/// Linear least-squares fit of the projection polynomial, assuming an
/// identity affine part and a known distortion center.
///
/// Each correspondence contributes the collinearity condition
/// `r * f(rho) = z * rho` between the unit ray (radial part `r`, axial part
/// `z`) and the sensor radius `rho` of its pixel, which is linear in the
/// coefficients. Radii are normalized before solving with Householder QR.
pub fn fit_poly<T: Scalar>(
    correspondences: &[Correspondence<T>],
    center: (T, T),
    degree: usize,
) -> Result<PolyFit<T>, OmniError> {
    let n = degree + 1;
    let rank_deficient = || OmniError::RankDeficient { samples: correspondences.len(), degree };
    if correspondences.len() < n {
        return Err(rank_deficient());
    }

    let samples: Vec<(T, T, T)> = correspondences
        .iter()
        .filter_map(|c| {
            let ray = c.ray.normalized()?;
            let rho = (c.pixel.0 - center.0).hypot(c.pixel.1 - center.1);
            Some((ray.x.hypot(ray.y), ray.z, rho))
        })
        .collect();
    let rho_scale = samples.iter().map(|s| s.2).fold(T::zero(), T::max);
    if samples.len() < n || rho_scale == T::zero() {
        return Err(rank_deficient());
    }

    let rows = samples.len();
    let mut a = vec![T::zero(); rows * n];
    let mut b = vec![T::zero(); rows];
    for (i, &(r, z, rho)) in samples.iter().enumerate() {
        let t = rho / rho_scale;
        let mut p = T::one();
        for k in 0..n {
            a[i * n + k] = r * p;
            p = p * t;
        }
        b[i] = z * rho;
    }

    // equilibrate columns so the rank test is scale-free
    let mut col_scale = vec![T::one(); n];
    for (k, s) in col_scale.iter_mut().enumerate() {
        let norm = (0..rows).map(|i| a[i * n + k] * a[i * n + k]).fold(T::zero(), |x, y| x + y).sqrt();
        if norm == T::zero() {
            return Err(rank_deficient());
        }
        *s = norm;
        for i in 0..rows {
            a[i * n + k] = a[i * n + k] / norm;
        }
    }

    let solution = householder_least_squares(&mut a, &mut b, rows, n).ok_or_else(rank_deficient)?;

    let mut coefficients = Vec::with_capacity(n);
    let mut scale_pow = T::one();
    for k in 0..n {
        coefficients.push(solution[k] / col_scale[k] / scale_pow);
        scale_pow = scale_pow * rho_scale;
    }

    let eval = |rho: T| coefficients.iter().rev().fold(T::zero(), |acc, &c| acc * rho + c);
    let (mut sq, mut count) = (T::zero(), 0usize);
    for &(r, z, rho) in &samples {
        if r > T::epsilon() {
            let res = eval(rho) - z * rho / r;
            sq = sq + res * res;
            count += 1;
        }
    }
    let rms_residual = if count > 0 { (sq / T::lit(count as f64)).sqrt() } else { T::zero() };
    Ok(PolyFit { coefficients, rms_residual })
}

/// Solves `min |A x - b|` in place for a row-major `rows x cols` matrix.
/// Returns `None` when `A` is numerically rank deficient.
fn householder_least_squares<T: Scalar>(a: &mut [T], b: &mut [T], rows: usize, cols: usize) -> Option<Vec<T>> {
    let mut diag = vec![T::zero(); cols];
    for k in 0..cols {
        let norm = (k..rows).map(|i| a[i * cols + k] * a[i * cols + k]).fold(T::zero(), |x, y| x + y).sqrt();
        if norm == T::zero() {
            return None;
        }
        let alpha = if a[k * cols + k] > T::zero() { -norm } else { norm };
        // v = x - alpha e1, stored in column k below the diagonal
        a[k * cols + k] = a[k * cols + k] - alpha;
        let vnorm2 = (k..rows).map(|i| a[i * cols + k] * a[i * cols + k]).fold(T::zero(), |x, y| x + y);
        diag[k] = alpha;
        if vnorm2 == T::zero() {
            continue;
        }
        for j in k + 1..cols {
            let dot = (k..rows).map(|i| a[i * cols + k] * a[i * cols + j]).fold(T::zero(), |x, y| x + y);
            let f = T::lit(2.0) * dot / vnorm2;
            for i in k..rows {
                a[i * cols + j] = a[i * cols + j] - f * a[i * cols + k];
            }
        }
        let dot = (k..rows).map(|i| a[i * cols + k] * b[i]).fold(T::zero(), |x, y| x + y);
        let f = T::lit(2.0) * dot / vnorm2;
        for i in k..rows {
            b[i] = b[i] - f * a[i * cols + k];
        }
    }

    let max_diag = diag.iter().fold(T::zero(), |m, d| m.max(d.abs()));
    let tol = T::lit(rows.max(cols) as f64) * T::epsilon() * T::lit(10.0) * max_diag;
    if diag.iter().any(|d| d.abs() <= tol) {
        return None;
    }

    let mut x = vec![T::zero(); cols];
    for k in (0..cols).rev() {
        let mut s = b[k];
        for j in k + 1..cols {
            s = s - a[k * cols + j] * x[j];
        }
        x[k] = s / diag[k];
    }
    Some(x)
}
