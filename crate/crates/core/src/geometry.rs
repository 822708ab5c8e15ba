//! Evader path geometry.
//!
//! The evader runs counterclockwise at unit speed around the ellipse
//! `X²/a² + Y²/b² = 1`. Points on the path are parametrized by the tangent
//! angle `φ` of the evader's velocity, so `dE/dt = (cos φ, sin φ)` and the
//! angular rate `dφ/dt = f(φ)` is the curvature of the ellipse at that point.

use nalgebra::Vector2;
use thiserror::Error;

/// A point or vector in the plane.
pub type Point = Vector2<f64>;

/// Absolute tolerance used by [`EllipseGeometry::t_of_phi`].
pub const QUADRATURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeometryError {
    #[error("semi-axes must satisfy a >= b > 0 and be finite, got a = {a}, b = {b}")]
    InvalidAxes { a: f64, b: f64 },
}

/// Semi-axes of the evader's ellipse, with `a >= b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseGeometry {
    a: f64,
    b: f64,
}

impl EllipseGeometry {
    pub fn new(a: f64, b: f64) -> Result<Self, GeometryError> {
        if !(a.is_finite() && b.is_finite() && b > 0.0 && a >= b) {
            return Err(GeometryError::InvalidAxes { a, b });
        }
        Ok(Self { a, b })
    }

    /// Circle of the given radius (the `a = b` specialization).
    pub fn circle(radius: f64) -> Result<Self, GeometryError> {
        Self::new(radius, radius)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_circular(&self) -> bool {
        self.a == self.b
    }

    /// `a² sin²φ + b² cos²φ`, the quantity shared by the position and rate formulas.
    fn radicand(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        self.a * self.a * s * s + self.b * self.b * c * c
    }

    /// Angular rate `f(φ) = dφ/dt = (a² sin²φ + b² cos²φ)^{3/2} / (a² b²)`.
    ///
    /// Strictly positive and π-periodic. On a circle this is exactly `1/a`.
    pub fn angular_rate(&self, phi: f64) -> f64 {
        if self.is_circular() {
            return 1.0 / self.a;
        }
        let q = self.radicand(phi);
        q * q.sqrt() / (self.a * self.a * self.b * self.b)
    }

    /// `(f_min, f_max) = (b/a², a/b²)`, attained at `φ ≡ 0` and `φ ≡ π/2 (mod π)`.
    pub fn rate_bounds(&self) -> (f64, f64) {
        (self.b / (self.a * self.a), self.a / (self.b * self.b))
    }

    /// Position of the evader when its velocity points along `φ`.
    ///
    /// `φ = π/2` is the point `(a, 0)`; increasing `φ` moves counterclockwise.
    pub fn evader_position(&self, phi: f64) -> Point {
        let (s, c) = phi.sin_cos();
        if self.is_circular() {
            return Point::new(self.a * s, -self.a * c);
        }
        let root = self.radicand(phi).sqrt();
        Point::new(self.a * self.a * s / root, -self.b * self.b * c / root)
    }

    /// Derivative of the evader position with respect to `φ`, i.e. `Ė / f(φ)`.
    pub fn evader_tangent_phi(&self, phi: f64) -> Point {
        evader_velocity(phi) / self.angular_rate(phi)
    }

    /// Elapsed time `∫_{φ0}^{φ1} dφ / f(φ)` for the unit-speed evader.
    ///
    /// Reversed limits give the negated integral.
    pub fn t_of_phi(&self, phi0: f64, phi1: f64) -> f64 {
        if phi1 == phi0 {
            return 0.0;
        }
        if phi1 < phi0 {
            return -self.t_of_phi(phi1, phi0);
        }
        if self.is_circular() {
            return self.a * (phi1 - phi0);
        }
        // Split into pieces no longer than a quarter period so each panel sees
        // at most one extremum of f.
        let pieces = ((phi1 - phi0) / (std::f64::consts::FRAC_PI_4))
            .ceil()
            .max(1.0) as usize;
        let width = (phi1 - phi0) / pieces as f64;
        let tol = QUADRATURE_TOL / pieces as f64;
        let integrand = |phi: f64| 1.0 / self.angular_rate(phi);
        (0..pieces)
            .map(|k| {
                let lo = phi0 + k as f64 * width;
                let hi = if k + 1 == pieces { phi1 } else { lo + width };
                adaptive_gauss_kronrod(&integrand, lo, hi, tol, 0)
            })
            .sum()
    }
}

/// Unit evader velocity `(cos φ, sin φ)`.
pub fn evader_velocity(phi: f64) -> Point {
    let (s, c) = phi.sin_cos();
    Point::new(c, s)
}

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
const GK15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK15_KRONROD: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK15_GAUSS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = GK15_KRONROD[7] * fc;
    let mut gauss = GK15_GAUSS[3] * fc;
    for (i, (&x, &w)) in GK15_NODES
        .iter()
        .zip(GK15_KRONROD.iter())
        .take(7)
        .enumerate()
    {
        let pair = f(center - half * x) + f(center + half * x);
        kronrod += w * pair;
        // Odd Kronrod nodes coincide with the Gauss nodes.
        if i % 2 == 1 {
            gauss += GK15_GAUSS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64, depth: u32) -> f64 {
    let (value, err) = gauss_kronrod_15(f, lo, hi);
    if err <= tol || depth >= 40 {
        return value;
    }
    let mid = 0.5 * (lo + hi);
    adaptive_gauss_kronrod(f, lo, mid, 0.5 * tol, depth + 1)
        + adaptive_gauss_kronrod(f, mid, hi, 0.5 * tol, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn half() -> EllipseGeometry {
        EllipseGeometry::new(1.0, 0.5).unwrap()
    }

    #[test]
    fn rejects_invalid_axes() {
        assert!(EllipseGeometry::new(0.5, 1.0).is_err());
        assert!(EllipseGeometry::new(1.0, 0.0).is_err());
        assert!(EllipseGeometry::new(f64::NAN, 1.0).is_err());
        assert!(EllipseGeometry::new(1.0, 1.0).unwrap().is_circular());
        assert!(!half().is_circular());
    }

    #[test]
    fn angular_rate_examples() {
        let unit = EllipseGeometry::circle(1.0).unwrap();
        for phi in [0.0, 0.3, 2.0, -7.5] {
            assert_eq!(unit.angular_rate(phi), 1.0);
        }
        assert_relative_eq!(half().angular_rate(0.0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(half().angular_rate(FRAC_PI_2), 4.0, max_relative = 1e-15);
    }

    #[test]
    fn rate_bounds_examples() {
        assert_eq!(
            EllipseGeometry::circle(1.0).unwrap().rate_bounds(),
            (1.0, 1.0)
        );
        assert_eq!(half().rate_bounds(), (0.5, 4.0));
        assert_eq!(
            EllipseGeometry::new(2.0, 1.0).unwrap().rate_bounds(),
            (0.25, 2.0)
        );
    }

    #[test]
    fn evader_position_examples() {
        let p = half().evader_position(FRAC_PI_2);
        assert_relative_eq!(p.x, 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.y, 0.0, epsilon = 1e-15);
        let p = half().evader_position(PI);
        assert_relative_eq!(p.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(p.y, 0.5, epsilon = 1e-15);
        let p = EllipseGeometry::circle(1.0).unwrap().evader_position(0.0);
        assert_relative_eq!(p.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(p.y, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn evader_velocity_examples() {
        assert_eq!(evader_velocity(0.0), Point::new(1.0, 0.0));
        let v = evader_velocity(FRAC_PI_2);
        assert_relative_eq!(v.x, 0.0, epsilon = 1e-16);
        assert_eq!(v.y, 1.0);
        let v = evader_velocity(FRAC_PI_4);
        assert_relative_eq!(v.x, 0.5f64.sqrt(), epsilon = 1e-16);
        assert_relative_eq!(v.y, 0.5f64.sqrt(), epsilon = 1e-16);
    }

    #[test]
    fn t_of_phi_examples() {
        let unit = EllipseGeometry::circle(1.0).unwrap();
        assert_relative_eq!(
            unit.t_of_phi(FRAC_PI_2, FRAC_PI_2 + 1.676),
            1.676,
            epsilon = 1e-12
        );
        assert_eq!(half().t_of_phi(FRAC_PI_2, FRAC_PI_2), 0.0);
        // Elapsed time to the reported capture angle of the eccentric case.
        assert!((half().t_of_phi(FRAC_PI_2, 3.151) - 1.229).abs() < 1e-3);
    }

    #[test]
    fn t_of_phi_full_period_matches_simpson_oracle() {
        // Composite Simpson with many panels as an independent reference.
        let g = half();
        let n = 20_000;
        let h = PI / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w / g.angular_rate(i as f64 * h);
        }
        let simpson = acc * h / 3.0;
        assert_relative_eq!(g.t_of_phi(0.0, PI), simpson, epsilon = 1e-10);
    }

    #[test]
    fn tangent_is_unit_velocity_over_rate() {
        let g = half();
        let h = 1e-5;
        for k in 0..50 {
            let phi = -3.0 + 0.17 * k as f64;
            let fd = (g.evader_position(phi + h) - g.evader_position(phi - h)) / (2.0 * h);
            let dt = fd * g.angular_rate(phi);
            let v = evader_velocity(phi);
            assert!((dt - v).norm() < 1e-6, "phi = {phi}: {dt:?} vs {v:?}");
        }
    }
}
