//! Integration of each formulation with its natural capture monitor.
//!
//! These are thin wrappers that bind a vector field from [`crate::dynamics`]
//! to [`integrate`]. Reduced systems run in the tangent angle `φ`; the
//! circular polar system can also run in evader time.

use crate::dynamics::{
    cartesian_rhs, circular_rhs_t, complex_rhs_phi, elliptical_rhs_phi, logpolar_rhs_phi,
    ComplexState, EvaderPath, LogPolarState, PolarState,
};
use crate::geometry::{EllipseGeometry, Point};
use crate::integrate::{
    integrate, CaptureMonitor, CaptureSignal, IntegrateError, IntegratorConfig, Solution,
};
use std::convert::Infallible;

/// Log-polar `(μ, ζ)` system in `φ`, monitored for capture on `μ`.
pub fn logpolar_flow(
    g: &EllipseGeometry,
    n: f64,
    initial: LogPolarState,
    phi_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Solution<2>, IntegrateError> {
    let g = *g;
    integrate(
        move |phi, y: &[f64; 2]| {
            Ok::<_, Infallible>(logpolar_rhs_phi(LogPolarState::from_array(*y), phi, &g, n))
        },
        initial.to_array(),
        phi_span,
        cfg,
        Some(&CaptureSignal::LogSeparation(0)),
    )
}

/// Polar `(ρ, ζ)` system in `φ`, monitored for capture on `ρ`.
pub fn polar_flow(
    g: &EllipseGeometry,
    n: f64,
    initial: PolarState,
    phi_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Solution<2>, IntegrateError> {
    let g = *g;
    integrate(
        move |phi, y: &[f64; 2]| elliptical_rhs_phi(PolarState::from_array(*y), phi, &g, n),
        initial.to_array(),
        phi_span,
        cfg,
        Some(&CaptureSignal::Separation(0)),
    )
}

/// Circular polar system in evader time `t`, monitored for capture on `ρ`.
pub fn circular_time_flow(
    a: f64,
    n: f64,
    initial: PolarState,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Solution<2>, IntegrateError> {
    integrate(
        move |_t, y: &[f64; 2]| circular_rhs_t(PolarState::from_array(*y), a, n),
        initial.to_array(),
        t_span,
        cfg,
        Some(&CaptureSignal::Separation(0)),
    )
}

/// Complex system in `φ`, state `[Re z, Im z]`, monitored for capture on `|z|`.
pub fn complex_flow(
    g: &EllipseGeometry,
    n: f64,
    initial: ComplexState,
    phi_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Solution<2>, IntegrateError> {
    let g = *g;
    integrate(
        move |phi, y: &[f64; 2]| {
            complex_rhs_phi(ComplexState::from_array(*y), phi, &g, n).map(|d| [d.re, d.im])
        },
        initial.to_array(),
        phi_span,
        cfg,
        Some(&CaptureSignal::Modulus(0, 1)),
    )
}

/// Cartesian pursuer `[x, y]` against `path`, over the path's own parameter.
pub fn pursuit_flow<P: EvaderPath>(
    path: &P,
    n: f64,
    pursuer_start: Point,
    span: (f64, f64),
    cfg: &IntegratorConfig,
    monitor_capture: bool,
) -> Result<Solution<2>, IntegrateError> {
    let monitor = |s: f64, y: &[f64; 2]| {
        let d = (path.state(s).0 - Point::new(y[0], y[1])).norm();
        if d > 0.0 {
            d.ln()
        } else {
            f64::NEG_INFINITY
        }
    };
    let capture: Option<&dyn CaptureMonitor<2>> = if monitor_capture {
        Some(&monitor)
    } else {
        None
    };
    integrate(
        |s, y: &[f64; 2]| cartesian_rhs(s, Point::new(y[0], y[1]), path, n).map(|v| [v.x, v.y]),
        [pursuer_start.x, pursuer_start.y],
        span,
        cfg,
        capture,
    )
}
