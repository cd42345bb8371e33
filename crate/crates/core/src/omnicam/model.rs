use crate::mathcore::{Scalar, Vec3};

use super::OmniError;

/// Intrinsic calibration of one fisheye camera.
#[derive(Debug, Clone, PartialEq)]
pub struct OmniIntrinsics<T> {
    poly: Vec<T>,
    c: T,
    d: T,
    e: T,
    xc: T,
    yc: T,
    width: u32,
    height: u32,
    inv_det: T,
    max_rho: T,
}

const REFINE_MAX_ITER: usize = 100;
const BRACKET_SAMPLES: usize = 64;

impl<T: Scalar> OmniIntrinsics<T> {
    /// `poly` holds `a0..aN`, lowest order first.
    #[allow(clippy::too_many_arguments)]
    pub fn new(poly: Vec<T>, c: T, d: T, e: T, xc: T, yc: T, width: u32, height: u32) -> Result<Self, OmniError> {
        if poly.is_empty() {
            return Err(OmniError::EmptyPolynomial);
        }
        if poly[0] == T::zero() {
            return Err(OmniError::DegenerateAxis);
        }
        if width == 0 || height == 0 {
            return Err(OmniError::ImageSize { width, height });
        }
        let det = c - d * e;
        if !(det.abs() > T::lit(1e-12)) {
            return Err(OmniError::SingularAffine(det.to_f64().unwrap_or(f64::NAN)));
        }
        let mut intr = Self {
            poly,
            c,
            d,
            e,
            xc,
            yc,
            width,
            height,
            inv_det: T::one() / det,
            max_rho: T::zero(),
        };
        let (w, h) = (T::lit(width as f64), T::lit(height as f64));
        intr.max_rho = [(T::zero(), T::zero()), (w, T::zero()), (T::zero(), h), (w, h)]
            .into_iter()
            .map(|(u, v)| {
                let (su, sv) = intr.pixel_to_sensor(u, v);
                su.hypot(sv)
            })
            .fold(T::zero(), T::max);
        Ok(intr)
    }

    pub fn poly(&self) -> &[T] {
        &self.poly
    }

    pub fn affine(&self) -> (T, T, T) {
        (self.c, self.d, self.e)
    }

    pub fn center(&self) -> (T, T) {
        (self.xc, self.yc)
    }

    pub fn size(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    /// Largest sensor radius reachable inside the image, the upper end of the
    /// projection root search.
    pub fn max_rho(&self) -> T {
        self.max_rho
    }

    /// Horner evaluation of `f(rho)`.
    pub fn eval_poly(&self, rho: T) -> T {
        self.poly.iter().rev().fold(T::zero(), |acc, &a| acc * rho + a)
    }

    fn eval_poly_derivative(&self, rho: T) -> T {
        self.poly
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(T::zero(), |acc, (k, &a)| acc * rho + a * T::lit(k as f64))
    }

    fn pixel_to_sensor(&self, u: T, v: T) -> (T, T) {
        let du = u - self.xc;
        let dv = v - self.yc;
        (
            self.inv_det * (du - self.d * dv),
            self.inv_det * (-self.e * du + self.c * dv),
        )
    }

    fn sensor_to_pixel(&self, su: T, sv: T) -> (T, T) {
        (self.c * su + self.d * sv + self.xc, self.e * su + sv + self.yc)
    }

    /// Back-projects a pixel to a unit-length viewing ray.
    pub fn cam_to_world(&self, pixel: (T, T)) -> Vec3<T> {
        let (su, sv) = self.pixel_to_sensor(pixel.0, pixel.1);
        let rho = su.hypot(sv);
        let ray = Vec3::new(su, sv, self.eval_poly(rho));
        // a0 != 0 keeps the ray away from zero
        ray * (T::one() / ray.norm())
    }

    /// Projects a 3D point (or direction) to pixel coordinates.
    ///
    /// Solves `r * f(rho) - z * rho = 0` for the smallest root in
    /// `[0, max_rho]`, where `r` is the point's distance from the optical axis:
    /// a uniform scan brackets the first sign change and bracketed Newton
    /// steps refine `rho` to `1e-10`.
    pub fn world_to_cam(&self, point: Vec3<T>) -> Result<(T, T), OmniError> {
        let r = point.x.hypot(point.y);
        let z = point.z;
        if !(r.is_finite() && z.is_finite()) {
            return Err(OmniError::NoProjection);
        }
        if r == T::zero() {
            let a0 = self.poly[0];
            return if z != T::zero() && (z > T::zero()) == (a0 > T::zero()) {
                Ok((self.xc, self.yc))
            } else {
                Err(OmniError::NoProjection)
            };
        }
        let rho = self.solve_rho(r, z).ok_or(OmniError::NoProjection)?;
        let scale = rho / r;
        Ok(self.sensor_to_pixel(point.x * scale, point.y * scale))
    }

    fn solve_rho(&self, r: T, z: T) -> Option<T> {
        let h = |rho: T| r * self.eval_poly(rho) - z * rho;
        let dh = |rho: T| r * self.eval_poly_derivative(rho) - z;
        let step = self.max_rho / T::lit(BRACKET_SAMPLES as f64);
        let mut lo = T::zero();
        let mut h_lo = h(lo);
        let mut bracket = None;
        for i in 1..=BRACKET_SAMPLES {
            if h_lo == T::zero() {
                return Some(lo);
            }
            let hi = if i == BRACKET_SAMPLES { self.max_rho } else { step * T::lit(i as f64) };
            let h_hi = h(hi);
            if h_hi == T::zero() {
                return Some(hi);
            }
            if (h_lo < T::zero()) != (h_hi < T::zero()) {
                bracket = Some((lo, hi, h_lo));
                break;
            }
            lo = hi;
            h_lo = h_hi;
        }
        let (mut lo, mut hi, mut h_lo) = bracket?;
        // Newton steps safeguarded by the bracket: a step that leaves it is
        // replaced by bisection, and every evaluation shrinks the bracket.
        let mut rho = (lo + hi) / T::lit(2.0);
        for _ in 0..REFINE_MAX_ITER {
            let h_rho = h(rho);
            if h_rho == T::zero() {
                return Some(rho);
            }
            if (h_rho < T::zero()) == (h_lo < T::zero()) {
                lo = rho;
                h_lo = h_rho;
            } else {
                hi = rho;
            }
            let tol = T::lit(1e-10).max(T::epsilon() * T::lit(8.0) * hi);
            let slope = dh(rho);
            let newton = rho - h_rho / slope;
            let next = if slope != T::zero() && newton > lo && newton < hi { newton } else { (lo + hi) / T::lit(2.0) };
            let done = (next - rho).abs() <= tol || hi - lo <= tol;
            rho = next;
            if done {
                break;
            }
        }
        Some(rho)
    }

    /// True when `(u, v)` lies in `[0, width) x [0, height)`.
    pub fn contains(&self, pixel: (T, T)) -> bool {
        let (w, h) = (T::lit(self.width as f64), T::lit(self.height as f64));
        pixel.0 >= T::zero() && pixel.0 < w && pixel.1 >= T::zero() && pixel.1 < h
    }
}
