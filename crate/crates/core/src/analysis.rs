//! Qualitative analysis of the pursuit system.
//!
//! * circular equilibrium and its linearization;
//! * capture-time bounds for a faster pursuer (`n > 1`);
//! * the period-π Poincaré map of the complex system and its fixed point for
//!   a slower pursuer (`0 < n < 1`);
//! * the contraction functionals `L = |z₁ − z₂|²` and `D(φ) = |z(φ+π) − z(φ)|²`;
//! * the trapping disk of the pursuer and the bounding annulus of `|z|`;
//! * invariance of the pursuer path under reparametrization of the evader.

use crate::dynamics::{
    reconstruct_pursuer, ComplexState, CosSinPath, DynamicsError, EvaderPath, LogPolarState,
    PolarState,
};
use crate::flow::{complex_flow, logpolar_flow, pursuit_flow};
use crate::geometry::{EllipseGeometry, Point};
use crate::integrate::{IntegrateError, IntegratorConfig, Outcome, Trajectory};
use nalgebra::Matrix2;
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("no equilibrium exists for speed ratio n = {n} (requires 0 < n <= 1)")]
    NoEquilibrium { n: f64 },
    #[error("invalid regime: {0}")]
    InvalidRegime(String),
    #[error("fixed-point iteration did not converge in {iterations} iterations (last step {last_residual:e})")]
    MaxItersExceeded {
        iterations: usize,
        last_residual: f64,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("capture at phi = {phi} interrupted the flow")]
    UnexpectedCapture { phi: f64 },
    #[error("no capture occurred before phi = {phi}")]
    NoCapture { phi: f64 },
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Linear stability type of the circular equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    StableSpiral,
    StableNode,
    /// Repeated real eigenvalue.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub rho_star: f64,
    pub zeta_star: f64,
    pub jacobian: Matrix2<f64>,
    /// Closed-form eigenvalues `[λ+, λ−]`.
    pub eigenvalues: [Complex64; 2],
    /// Eigenvalues of `jacobian` computed numerically, same ordering.
    pub numeric_eigenvalues: [Complex64; 2],
    pub classification: Classification,
}

/// Equilibrium `(a√(1−n²), arccos n)` of the circular system.
pub fn equilibrium_circular(a: f64, n: f64) -> Result<PolarState, AnalysisError> {
    if !(n > 0.0 && n <= 1.0) {
        return Err(AnalysisError::NoEquilibrium { n });
    }
    if !(a > 0.0) {
        return Err(AnalysisError::InvalidRegime(format!(
            "radius must be positive, got {a}"
        )));
    }
    Ok(PolarState::new(a * (1.0 - n * n).sqrt(), n.acos()))
}

/// Jacobian of `(cos ζ − n, −sin ζ/ρ + 1/a)` with respect to `(ρ, ζ)`.
pub fn circular_jacobian_at(s: PolarState) -> Matrix2<f64> {
    let (sz, cz) = s.zeta.sin_cos();
    Matrix2::new(0.0, -sz, sz / (s.rho * s.rho), -cz / s.rho)
}

/// `λ± = (−n ± √(5n² − 4)) / (2a√(1 − n²))`.
pub fn closed_form_eigenvalues(a: f64, n: f64) -> [Complex64; 2] {
    let denom = 2.0 * a * (1.0 - n * n).sqrt();
    let root = Complex64::new(5.0 * n * n - 4.0, 0.0).sqrt();
    let minus_n = Complex64::new(-n, 0.0);
    [(minus_n + root) / denom, (minus_n - root) / denom]
}

fn order_pair(mut pair: [Complex64; 2]) -> [Complex64; 2] {
    pair.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    pair
}

/// Linearization of the circular system at its equilibrium (`0 < n < 1`).
pub fn jacobian_circular(a: f64, n: f64) -> Result<EquilibriumReport, AnalysisError> {
    if !(n > 0.0 && n < 1.0) {
        return Err(AnalysisError::InvalidRegime(format!(
            "linearization requires 0 < n < 1, got n = {n}"
        )));
    }
    let eq = equilibrium_circular(a, n)?;
    let jacobian = circular_jacobian_at(eq);
    let numeric = jacobian.complex_eigenvalues();
    let discriminant = 5.0 * n * n - 4.0;
    let classification = if discriminant.abs() <= 1e-12 {
        Classification::Degenerate
    } else if discriminant < 0.0 {
        Classification::StableSpiral
    } else {
        Classification::StableNode
    };
    Ok(EquilibriumReport {
        rho_star: eq.rho,
        zeta_star: eq.zeta,
        jacobian,
        eigenvalues: order_pair(closed_form_eigenvalues(a, n)),
        numeric_eigenvalues: order_pair([numeric[0], numeric[1]]),
        classification,
    })
}

fn require_faster(n: f64) -> Result<(), AnalysisError> {
    if n > 1.0 {
        Ok(())
    } else {
        Err(AnalysisError::InvalidRegime(format!(
            "capture bounds require n > 1, got n = {n}"
        )))
    }
}

/// Closed-form capture bound `φ0 + b e^{μ0} / (a²(n − 1))`.
///
/// Exact comparison bound on the circle. On an eccentric ellipse it is not a
/// guaranteed bound; see [`certified_blowup_upper_bound`].
pub fn blowup_upper_bound(
    g: &EllipseGeometry,
    n: f64,
    mu0: f64,
    phi0: f64,
) -> Result<f64, AnalysisError> {
    require_faster(n)?;
    Ok(phi0 + g.b() * mu0.exp() / (g.a() * g.a() * (n - 1.0)))
}

/// Guaranteed capture bound `φ0 + f_max e^{μ0} / (n − 1)`.
///
/// Follows from `d(e^μ)/dφ = (cos ζ − n)/f(φ) <= −(n − 1)/f_max`. Equal to
/// [`blowup_upper_bound`] on a circle.
pub fn certified_blowup_upper_bound(
    g: &EllipseGeometry,
    n: f64,
    mu0: f64,
    phi0: f64,
) -> Result<f64, AnalysisError> {
    require_faster(n)?;
    let (_, f_max) = g.rate_bounds();
    Ok(phi0 + f_max * mu0.exp() / (n - 1.0))
}

/// Lower bound on the capture span, `φ_B − φ0 >= e^{μ0} b² / (a(n + 1))`.
///
/// Valid whenever `ab <= 1`; the guaranteed form is `e^{μ0} f_min / (n + 1)`.
pub fn blowup_lower_bound(g: &EllipseGeometry, n: f64, mu0: f64) -> f64 {
    let (_, f_max) = g.rate_bounds();
    mu0.exp() / (f_max * (n + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaptureReport {
    pub phi0: f64,
    pub mu0: f64,
    /// Extrapolated blow-up angle `φ_B`.
    pub phi_b_measured: f64,
    /// Where `μ` crossed the capture threshold.
    pub phi_cross: f64,
    pub upper_bound: f64,
    pub certified_upper_bound: f64,
    /// Lower bound on the span `φ_B − φ0`.
    pub lower_bound: f64,
}

impl CaptureReport {
    pub fn measured_span(&self) -> f64 {
        self.phi_b_measured - self.phi0
    }
}

/// Integrate the log-polar system until capture and compare with the bounds.
pub fn measure_capture(
    g: &EllipseGeometry,
    n: f64,
    initial: LogPolarState,
    phi0: f64,
    cfg: &IntegratorConfig,
) -> Result<CaptureReport, AnalysisError> {
    let certified = certified_blowup_upper_bound(g, n, initial.mu, phi0)?;
    let upper = blowup_upper_bound(g, n, initial.mu, phi0)?;
    let phi_end = certified + 0.1 * (certified - phi0) + 1e-3;
    let sol = logpolar_flow(g, n, initial, (phi0, phi_end), cfg)?;
    match sol.outcome {
        Outcome::Captured(event) => Ok(CaptureReport {
            phi0,
            mu0: initial.mu,
            phi_b_measured: event.s_blowup,
            phi_cross: event.s_cross,
            upper_bound: upper,
            certified_upper_bound: certified,
            lower_bound: blowup_lower_bound(g, n, initial.mu),
        }),
        Outcome::Completed(_) => Err(AnalysisError::NoCapture { phi: phi_end }),
        Outcome::Failed(msg) => Err(AnalysisError::Numerical(msg)),
    }
}

/// Integrate the complex system and demand that no capture occurs.
pub fn complex_trajectory(
    z0: ComplexState,
    phi_span: (f64, f64),
    g: &EllipseGeometry,
    n: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<2>, AnalysisError> {
    let sol = complex_flow(g, n, z0, phi_span, cfg)?;
    match sol.outcome {
        Outcome::Completed(_) => Ok(sol.trajectory),
        Outcome::Captured(e) => Err(AnalysisError::UnexpectedCapture { phi: e.s_cross }),
        Outcome::Failed(msg) => Err(AnalysisError::Numerical(msg)),
    }
}

/// First-return map `P(w) = z(φ0 + π; w)` of the complex system.
pub fn poincare_map(
    z0: ComplexState,
    phi0: f64,
    g: &EllipseGeometry,
    n: f64,
    cfg: &IntegratorConfig,
) -> Result<ComplexState, AnalysisError> {
    let traj = complex_trajectory(z0, (phi0, phi0 + PI), g, n, cfg)?;
    Ok(ComplexState::from_array(traj.final_state()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitConfig {
    /// Stop once successive iterates differ by less than this.
    pub tol: f64,
    pub max_iters: usize,
    pub integrator: IntegratorConfig,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 200,
            integrator: IntegratorConfig::with_tolerances(1e-12, 1e-14),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoincareResult {
    pub fixed_point: ComplexState,
    /// Seed followed by every Poincaré iterate.
    pub iterates: Vec<ComplexState>,
    /// Last iteration step, an upper bound on `|P(z*) − z*|`.
    pub residual: f64,
}

/// Fixed point of the Poincaré map by plain iteration from `seed`.
pub fn find_periodic_orbit(
    g: &EllipseGeometry,
    n: f64,
    phi0: f64,
    seed: ComplexState,
    cfg: &OrbitConfig,
) -> Result<PoincareResult, AnalysisError> {
    if !(n > 0.0 && n < 1.0) {
        return Err(AnalysisError::InvalidRegime(format!(
            "periodic orbit requires 0 < n < 1, got n = {n}"
        )));
    }
    let mut iterates = vec![seed];
    let mut current = seed;
    let mut step = f64::INFINITY;
    for _ in 0..cfg.max_iters {
        let next = poincare_map(current, phi0, g, n, &cfg.integrator)?;
        iterates.push(next);
        step = (next.z - current.z).norm();
        current = next;
        if step < cfg.tol {
            // The map contracts, so |P(z*) − z*| of the last iterate is below `step`.
            return Ok(PoincareResult {
                fixed_point: current,
                residual: step,
                iterates,
            });
        }
    }
    Err(AnalysisError::MaxItersExceeded {
        iterations: cfg.max_iters,
        last_residual: step,
    })
}

/// Samples `(φ, z)` of the solution through `z0` over one period.
pub fn orbit_samples(
    z0: ComplexState,
    phi0: f64,
    g: &EllipseGeometry,
    n: f64,
    count: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, ComplexState)>, AnalysisError> {
    let traj = complex_trajectory(z0, (phi0, phi0 + PI), g, n, cfg)?;
    let count = count.max(2);
    (0..count)
        .map(|k| {
            let phi = phi0 + PI * k as f64 / (count - 1) as f64;
            let y = traj.dense_eval(phi.min(traj.end()))?;
            Ok((phi, ComplexState::from_array(y)))
        })
        .collect()
}

/// Squared distance `L = |z₁ − z₂|²`.
pub fn distance_functional(z1: ComplexState, z2: ComplexState) -> f64 {
    (z1.z - z2.z).norm_sqr()
}

/// `dL/dφ = −(2n/f(φ)) (ρ₁ + ρ₂)(1 − cos(ζ₁ − ζ₂))`, never positive.
pub fn distance_slope(
    z1: ComplexState,
    z2: ComplexState,
    phi: f64,
    g: &EllipseGeometry,
    n: f64,
) -> Result<f64, AnalysisError> {
    let (r1, r2) = (z1.rho(), z2.rho());
    if r1 == 0.0 || r2 == 0.0 {
        return Err(DynamicsError::ZeroModulus.into());
    }
    // cos(ζ₁ − ζ₂) = Re(z₁ z̄₂) / (ρ₁ρ₂), free of branch choices.
    let cos_diff = ((z1.z * z2.z.conj()).re / (r1 * r2)).clamp(-1.0, 1.0);
    Ok(-2.0 * n / g.angular_rate(phi) * (r1 + r2) * (1.0 - cos_diff))
}

/// Squared period shift `D(φ) = |z(φ + π) − z(φ)|²` on a complex trajectory.
pub fn period_shift_functional(traj: &Trajectory<2>, phi: f64) -> Result<f64, AnalysisError> {
    let now = ComplexState::from_array(traj.dense_eval(phi)?);
    let later = ComplexState::from_array(traj.dense_eval(phi + PI)?);
    Ok(distance_functional(later, now))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusBounds {
    /// Radius of the pursuer's trapping disk, `max(|P(φ0)|, a)`.
    pub r0: f64,
    /// Upper bound on the separation, `a + R0`.
    pub n_prime: f64,
    /// Observed minimum separation along a converged orbit (empirical).
    pub r_measured: Option<f64>,
}

pub fn annulus_bounds(pursuer_start: Point, g: &EllipseGeometry) -> AnnulusBounds {
    let r0 = pursuer_start.norm().max(g.a());
    AnnulusBounds {
        r0,
        n_prime: g.a() + r0,
        r_measured: None,
    }
}

impl AnnulusBounds {
    pub fn with_measured(self, r_measured: f64) -> Self {
        Self {
            r_measured: Some(r_measured),
            ..self
        }
    }
}

/// Minimum separation over one period of the orbit through `fixed_point`.
pub fn measured_inner_radius(
    fixed_point: ComplexState,
    phi0: f64,
    g: &EllipseGeometry,
    n: f64,
    cfg: &IntegratorConfig,
) -> Result<f64, AnalysisError> {
    let traj = complex_trajectory(fixed_point, (phi0, phi0 + PI), g, n, cfg)?;
    let mut min = f64::INFINITY;
    for w in traj.nodes().windows(2) {
        for k in 0..8 {
            let phi = w[0].0 + (w[1].0 - w[0].0) * k as f64 / 8.0;
            min = min.min(ComplexState::from_array(traj.dense_eval(phi)?).rho());
        }
    }
    Ok(min.min(ComplexState::from_array(traj.final_state()).rho()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    /// `(φ, L)` between the two solutions.
    pub l_samples: Vec<(f64, f64)>,
    /// `(φ, D)` of the first solution.
    pub d_samples: Vec<(f64, f64)>,
    /// Largest difference quotient of successive `L` samples.
    pub max_positive_slope: f64,
}

/// Sample `L` and `D` for two solutions over `periods` periods.
#[allow(clippy::too_many_arguments)]
pub fn contraction_report(
    z1: ComplexState,
    z2: ComplexState,
    phi0: f64,
    periods: usize,
    samples_per_period: usize,
    g: &EllipseGeometry,
    n: f64,
    cfg: &IntegratorConfig,
) -> Result<ContractionReport, AnalysisError> {
    let end = phi0 + PI * periods as f64;
    let t1 = complex_trajectory(z1, (phi0, end + PI), g, n, cfg)?;
    let t2 = complex_trajectory(z2, (phi0, end), g, n, cfg)?;
    let count = periods * samples_per_period.max(1);
    let mut l_samples = Vec::with_capacity(count + 1);
    let mut d_samples = Vec::with_capacity(count + 1);
    for k in 0..=count {
        let phi = if k == count {
            end
        } else {
            phi0 + PI * k as f64 / samples_per_period.max(1) as f64
        };
        let a = ComplexState::from_array(t1.dense_eval(phi)?);
        let b = ComplexState::from_array(t2.dense_eval(phi)?);
        l_samples.push((phi, distance_functional(a, b)));
        d_samples.push((phi, period_shift_functional(&t1, phi)?));
    }
    let max_positive_slope = l_samples
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ContractionReport {
        l_samples,
        d_samples,
        max_positive_slope,
    })
}

/// Orientation-preserving change of the evader's parameter, `t ↦ u(t)`.
pub trait Reparametrization {
    fn map(&self, t: f64) -> f64;
    fn rate(&self, t: f64) -> f64;
}

impl<U: Fn(f64) -> f64, R: Fn(f64) -> f64> Reparametrization for (U, R) {
    fn map(&self, t: f64) -> f64 {
        (self.0)(t)
    }

    fn rate(&self, t: f64) -> f64 {
        (self.1)(t)
    }
}

/// Maximum distance between the pursuer paths obtained from the evader
/// `(a cos u, b sin u)` and from the same evader reparametrized as `u(t)`.
///
/// Pursuer positions are compared at equal evader positions: the
/// reparametrized run at `t` against the original run at `u(t)`. The span is
/// `t ∈ t_span`; the original run covers `[u(t0), u(t1)]`.
pub fn compare_parametrizations<R: Reparametrization>(
    g: &EllipseGeometry,
    n: f64,
    pursuer_start: Point,
    reparam: &R,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<f64, AnalysisError> {
    let base = CosSinPath(*g);
    let shifted = |t: f64| {
        let (e, de) = base.state(reparam.map(t));
        (e, de * reparam.rate(t))
    };
    let u_span = (reparam.map(t_span.0), reparam.map(t_span.1));
    let original = finished(pursuit_flow(&base, n, pursuer_start, u_span, cfg, false)?)?;
    let changed = finished(pursuit_flow(
        &shifted,
        n,
        pursuer_start,
        t_span,
        cfg,
        false,
    )?)?;

    let mut worst: f64 = 0.0;
    for w in changed.nodes().windows(2) {
        for k in 0..4 {
            let t = w[0].0 + (w[1].0 - w[0].0) * k as f64 / 4.0;
            let p = changed.dense_eval(t)?;
            let u = reparam.map(t).clamp(original.start(), original.end());
            let q = original.dense_eval(u)?;
            worst = worst.max(Point::new(p[0] - q[0], p[1] - q[1]).norm());
        }
    }
    let p = changed.final_state();
    let q = original.final_state();
    Ok(worst.max(Point::new(p[0] - q[0], p[1] - q[1]).norm()))
}

fn finished(sol: crate::integrate::Solution<2>) -> Result<Trajectory<2>, AnalysisError> {
    match sol.outcome {
        Outcome::Completed(_) => Ok(sol.trajectory),
        Outcome::Captured(e) => Err(AnalysisError::UnexpectedCapture { phi: e.s_cross }),
        Outcome::Failed(msg) => Err(AnalysisError::Numerical(msg)),
    }
}

/// Pursuer position for a complex state on the ellipse.
pub fn pursuer_from_complex(z: ComplexState, phi: f64, g: &EllipseGeometry) -> Point {
    let s = PolarState::new(z.rho(), z.z.arg());
    reconstruct_pursuer(s, phi, g)
}
