//! State representations and vector fields of the pursuit problem.
//!
//! The pursuer always heads at the evader with speed `n` times the evader's.
//! Writing `ρ = |E − P|` and `ζ = φ − θ` (evader heading minus pursuer
//! heading) reduces the planar problem to a two-dimensional system. The same
//! system is available in four coordinates:
//!
//! * polar `(ρ, ζ)`, singular at `ρ = 0`;
//! * log-polar `(μ, ζ)` with `ρ = e^μ`, where capture is `μ → −∞`;
//! * complex `z = e^{μ + iζ}`;
//! * Cartesian pursuer coordinates against an explicit evader path.
//!
//! Angles are carried unwrapped. Whenever a conversion has to pick a branch
//! it takes a reference angle and returns the representative nearest to it.

use crate::geometry::{EllipseGeometry, Point};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("pursuer and evader coincide; the pursuit direction is undefined")]
    ZeroSeparation,
    #[error("complex state has zero modulus")]
    ZeroModulus,
}

/// Evader and pursuer positions at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianPair {
    pub evader: Point,
    pub pursuer: Point,
}

impl CartesianPair {
    pub fn separation(&self) -> f64 {
        (self.evader - self.pursuer).norm()
    }
}

/// Separation `rho` and heading difference `zeta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarState {
    pub rho: f64,
    pub zeta: f64,
}

/// Log-separation `mu = ln ρ` and heading difference `zeta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPolarState {
    pub mu: f64,
    pub zeta: f64,
}

/// `z = e^{μ + iζ}`: modulus is the separation, argument the heading difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexState {
    pub z: Complex64,
}

impl PolarState {
    pub fn new(rho: f64, zeta: f64) -> Self {
        Self { rho, zeta }
    }

    pub fn to_log_polar(self) -> Result<LogPolarState, DynamicsError> {
        if self.rho <= 0.0 {
            return Err(DynamicsError::ZeroSeparation);
        }
        Ok(LogPolarState {
            mu: self.rho.ln(),
            zeta: self.zeta,
        })
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.rho, self.zeta]
    }

    pub fn from_array(y: [f64; 2]) -> Self {
        Self {
            rho: y[0],
            zeta: y[1],
        }
    }
}

impl LogPolarState {
    pub fn new(mu: f64, zeta: f64) -> Self {
        Self { mu, zeta }
    }

    pub fn to_polar(self) -> PolarState {
        PolarState {
            rho: self.mu.exp(),
            zeta: self.zeta,
        }
    }

    pub fn to_complex(self) -> ComplexState {
        ComplexState {
            z: Complex64::from_polar(self.mu.exp(), self.zeta),
        }
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.mu, self.zeta]
    }

    pub fn from_array(y: [f64; 2]) -> Self {
        Self {
            mu: y[0],
            zeta: y[1],
        }
    }
}

impl ComplexState {
    pub fn new(z: Complex64) -> Self {
        Self { z }
    }

    pub fn rho(&self) -> f64 {
        self.z.norm()
    }

    /// Principal-branch log-polar state, `ζ ∈ (−π, π]`.
    pub fn to_log_polar(self) -> Result<LogPolarState, DynamicsError> {
        let r = self.z.norm();
        if r == 0.0 || !r.is_finite() {
            return Err(DynamicsError::ZeroModulus);
        }
        let mut zeta = self.z.arg();
        if zeta <= -PI {
            zeta = PI;
        }
        Ok(LogPolarState { mu: r.ln(), zeta })
    }

    /// Log-polar state with `ζ` on the branch nearest `reference`.
    pub fn to_log_polar_near(self, reference: f64) -> Result<LogPolarState, DynamicsError> {
        let s = self.to_log_polar()?;
        Ok(LogPolarState {
            mu: s.mu,
            zeta: wrap_near(s.zeta, reference),
        })
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.z.re, self.z.im]
    }

    pub fn from_array(y: [f64; 2]) -> Self {
        Self {
            z: Complex64::new(y[0], y[1]),
        }
    }
}

/// The representative of `angle + 2πk` closest to `reference`.
pub fn wrap_near(angle: f64, reference: f64) -> f64 {
    angle + TAU * ((reference - angle) / TAU).round()
}

/// A planar evader path parametrized by an arbitrary increasing parameter.
pub trait EvaderPath {
    /// Position and derivative with respect to the parameter.
    fn state(&self, s: f64) -> (Point, Point);
}

impl<F: Fn(f64) -> (Point, Point)> EvaderPath for F {
    fn state(&self, s: f64) -> (Point, Point) {
        self(s)
    }
}

/// The ellipse traversed with the tangent angle `φ` as parameter.
#[derive(Debug, Clone, Copy)]
pub struct TangentAnglePath(pub EllipseGeometry);

impl EvaderPath for TangentAnglePath {
    fn state(&self, phi: f64) -> (Point, Point) {
        (self.0.evader_position(phi), self.0.evader_tangent_phi(phi))
    }
}

/// The ellipse as `(a cos t, b sin t)`, starting at `(a, 0)` and moving counterclockwise.
#[derive(Debug, Clone, Copy)]
pub struct CosSinPath(pub EllipseGeometry);

impl EvaderPath for CosSinPath {
    fn state(&self, t: f64) -> (Point, Point) {
        let (s, c) = t.sin_cos();
        let (a, b) = (self.0.a(), self.0.b());
        (Point::new(a * c, b * s), Point::new(-a * s, b * c))
    }
}

/// Pursuer velocity for a pursuer at `pursuer` chasing an evader at
/// `evader` moving with velocity `evader_velocity`.
pub fn pursuit_velocity(
    evader: Point,
    evader_velocity: Point,
    pursuer: Point,
    n: f64,
) -> Result<Point, DynamicsError> {
    let offset = evader - pursuer;
    let dist = offset.norm();
    if dist == 0.0 {
        return Err(DynamicsError::ZeroSeparation);
    }
    Ok(offset * (n * evader_velocity.norm() / dist))
}

/// Cartesian pursuit law: `Ṗ = n |Ė| (E − P) / |E − P|`.
pub fn cartesian_rhs<P: EvaderPath + ?Sized>(
    s: f64,
    pursuer: Point,
    path: &P,
    n: f64,
) -> Result<Point, DynamicsError> {
    let (e, de) = path.state(s);
    pursuit_velocity(e, de, pursuer, n)
}

/// Ratio of separation to pursuer speed, `λ = ρ / n`.
pub fn lambda_of(rho: f64, n: f64) -> f64 {
    rho / n
}

/// Circular system in evader time: `ρ̇ = cos ζ − n`, `ζ̇ = −sin ζ / ρ + 1/a`.
pub fn circular_rhs_t(s: PolarState, a: f64, n: f64) -> Result<[f64; 2], DynamicsError> {
    if s.rho == 0.0 {
        return Err(DynamicsError::ZeroSeparation);
    }
    let (sz, cz) = s.zeta.sin_cos();
    Ok([cz - n, -sz / s.rho + 1.0 / a])
}

/// Circular system in the tangent angle: `ρ' = a (cos ζ − n)`, `ζ' = 1 − a sin ζ / ρ`.
pub fn circular_rhs_phi(s: PolarState, a: f64, n: f64) -> Result<[f64; 2], DynamicsError> {
    if s.rho == 0.0 {
        return Err(DynamicsError::ZeroSeparation);
    }
    let (sz, cz) = s.zeta.sin_cos();
    Ok([a * (cz - n), 1.0 - a * sz / s.rho])
}

/// Elliptical system: `ρ' = (cos ζ − n)/f(φ)`, `ζ' = 1 − sin ζ / (ρ f(φ))`.
pub fn elliptical_rhs_phi(
    s: PolarState,
    phi: f64,
    g: &EllipseGeometry,
    n: f64,
) -> Result<[f64; 2], DynamicsError> {
    if s.rho == 0.0 {
        return Err(DynamicsError::ZeroSeparation);
    }
    let f = g.angular_rate(phi);
    let (sz, cz) = s.zeta.sin_cos();
    Ok([(cz - n) / f, 1.0 - sz / (s.rho * f)])
}

/// Log-polar system in time with evader angular rate `phidot`.
pub fn logpolar_rhs_t(s: LogPolarState, phidot: f64, n: f64) -> [f64; 2] {
    let m = (-s.mu).exp();
    let (sz, cz) = s.zeta.sin_cos();
    [m * (cz - n), -m * sz + phidot]
}

/// Log-polar system in the tangent angle, regular at every finite `μ`.
pub fn logpolar_rhs_phi(s: LogPolarState, phi: f64, g: &EllipseGeometry, n: f64) -> [f64; 2] {
    let f = g.angular_rate(phi);
    let m = (-s.mu).exp();
    let (sz, cz) = s.zeta.sin_cos();
    [m * (cz - n) / f, 1.0 - m * sz / f]
}

/// Complex form: `dz/dφ = 1/f − (n/f) z/|z| + i z`.
pub fn complex_rhs_phi(
    z: ComplexState,
    phi: f64,
    g: &EllipseGeometry,
    n: f64,
) -> Result<Complex64, DynamicsError> {
    let r = z.z.norm();
    if r == 0.0 {
        return Err(DynamicsError::ZeroModulus);
    }
    let f = g.angular_rate(phi);
    Ok(Complex64::new(1.0 / f, 0.0) - z.z * (n / (f * r)) + Complex64::i() * z.z)
}

/// Pursuer position from the reduced state on the ellipse.
pub fn reconstruct_pursuer(s: PolarState, phi: f64, g: &EllipseGeometry) -> Point {
    let heading = phi - s.zeta;
    let (sh, ch) = heading.sin_cos();
    g.evader_position(phi) - Point::new(s.rho * ch, s.rho * sh)
}

/// Pursuer position for the circle of radius `a` with the evader at
/// `(a cos(t/a), a sin(t/a))`, so that `φ = t/a + π/2`.
pub fn reconstruct_pursuer_circular(s: PolarState, t: f64, a: f64) -> Point {
    let phi = t / a + FRAC_PI_2;
    let heading = phi - s.zeta;
    let (sh, ch) = heading.sin_cos();
    let (se, ce) = (t / a).sin_cos();
    Point::new(a * ce - s.rho * ch, a * se - s.rho * sh)
}

/// Reduced state from Cartesian positions, `ζ` taken on the branch nearest `zeta_ref`.
pub fn cartesian_to_reduced(
    p: &CartesianPair,
    phi: f64,
    zeta_ref: f64,
) -> Result<PolarState, DynamicsError> {
    let d = p.evader - p.pursuer;
    let rho = d.norm();
    if rho == 0.0 {
        return Err(DynamicsError::ZeroSeparation);
    }
    let zeta = phi - d.y.atan2(d.x);
    Ok(PolarState {
        rho,
        zeta: wrap_near(zeta, zeta_ref),
    })
}
