//! Adaptive Dormand–Prince 5(4) integration with dense output and capture events.
//!
//! The integrator advances a fixed-size state `[f64; N]` over a scalar
//! independent variable `s` with a PI step-size controller. Every accepted step
//! stores a quartic continuous extension so the trajectory can be evaluated
//! anywhere in its span.
//!
//! Capture is monitored through the log-separation `μ` of the state. When `μ`
//! falls through `mu_min` during a step, the crossing is localized by bisection
//! on the dense output and the blow-up point (where the separation `e^μ`
//! reaches zero) is estimated by a linear fit of `e^μ` over the last accepted
//! steps. Near capture `e^μ` is locally linear because `M = e^{−μ}` obeys
//! `dM/ds ∝ M²`.

use std::fmt::Display;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("integration span must satisfy s0 < s1 with finite ends, got ({s0}, {s1})")]
    InvalidSpan { s0: f64, s1: f64 },
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("initial state is not finite")]
    NonFiniteInitial,
    #[error("{s} lies outside the trajectory span [{lo}, {hi}]")]
    OutOfSpan { s: f64, lo: f64, hi: f64 },
}

/// Tolerances and limits for one integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step size.
    pub max_step: f64,
    /// Capture threshold on the log-separation `μ`.
    pub mu_min: f64,
    /// Width of the bracket left by event bisection.
    pub event_tol: f64,
    /// Attempted steps (accepted plus rejected) before giving up.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            mu_min: -20.0,
            event_tol: 1e-10,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), IntegrateError> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(IntegrateError::InvalidConfig("rel_tol must be positive"));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(IntegrateError::InvalidConfig("abs_tol must be positive"));
        }
        if !(self.max_step > 0.0) {
            return Err(IntegrateError::InvalidConfig("max_step must be positive"));
        }
        if !(self.mu_min < 0.0) {
            return Err(IntegrateError::InvalidConfig("mu_min must be negative"));
        }
        if !(self.event_tol > 0.0 && self.event_tol.is_finite()) {
            return Err(IntegrateError::InvalidConfig("event_tol must be positive"));
        }
        if self.max_steps == 0 {
            return Err(IntegrateError::InvalidConfig("max_steps must be nonzero"));
        }
        Ok(())
    }
}

/// Source of the log-separation `μ` used for capture monitoring.
pub trait CaptureMonitor<const N: usize> {
    fn log_separation(&self, s: f64, y: &[f64; N]) -> f64;
}

/// Where the separation lives in the state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaptureSignal {
    /// The component is `μ` itself.
    LogSeparation(usize),
    /// The component is the separation `ρ`.
    Separation(usize),
    /// The components are the real and imaginary parts of `z`, `|z| = ρ`.
    Modulus(usize, usize),
}

impl<const N: usize> CaptureMonitor<N> for CaptureSignal {
    fn log_separation(&self, _s: f64, y: &[f64; N]) -> f64 {
        match *self {
            CaptureSignal::LogSeparation(i) => y[i],
            CaptureSignal::Separation(i) => log_or_neg_inf(y[i]),
            CaptureSignal::Modulus(re, im) => log_or_neg_inf(y[re].hypot(y[im])),
        }
    }
}

impl<const N: usize, F: Fn(f64, &[f64; N]) -> f64> CaptureMonitor<N> for F {
    fn log_separation(&self, s: f64, y: &[f64; N]) -> f64 {
        self(s, y)
    }
}

fn log_or_neg_inf(rho: f64) -> f64 {
    if rho > 0.0 {
        rho.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone)]
struct Segment<const N: usize> {
    s0: f64,
    h: f64,
    /// Right end of the valid range; less than `s0 + h` after event truncation.
    end: f64,
    y_end: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    fn eval(&self, s: f64) -> [f64; N] {
        if s == self.end {
            return self.y_end;
        }
        let theta = (s - self.s0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        std::array::from_fn(|i| {
            r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])))
        })
    }
}

/// Accepted samples of an integration run with dense evaluation between them.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    nodes: Vec<(f64, [f64; N])>,
    segments: Vec<Segment<N>>,
}

impl<const N: usize> Trajectory<N> {
    fn new(s0: f64, y0: [f64; N]) -> Self {
        Self {
            nodes: vec![(s0, y0)],
            segments: Vec::new(),
        }
    }

    /// Accepted samples, strictly increasing in `s`; the first is the initial state.
    pub fn nodes(&self) -> &[(f64, [f64; N])] {
        &self.nodes
    }

    pub fn start(&self) -> f64 {
        self.nodes[0].0
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1].0
    }

    pub fn final_state(&self) -> [f64; N] {
        self.nodes[self.nodes.len() - 1].1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// State at `s`, exact at accepted nodes.
    pub fn dense_eval(&self, s: f64) -> Result<[f64; N], IntegrateError> {
        let (lo, hi) = (self.start(), self.end());
        if !(s >= lo && s <= hi) {
            return Err(IntegrateError::OutOfSpan { s, lo, hi });
        }
        if s == lo {
            return Ok(self.nodes[0].1);
        }
        // First segment whose end is >= s.
        let idx = self.segments.partition_point(|seg| seg.end < s);
        Ok(self.segments[idx].eval(s))
    }

    fn push(&mut self, seg: Segment<N>) {
        self.nodes.push((seg.end, seg.y_end));
        self.segments.push(seg);
    }

    fn truncate_last(&mut self, end: f64) {
        if let Some(seg) = self.segments.last_mut() {
            let y = seg.eval(end);
            seg.end = end;
            seg.y_end = y;
            if let Some(node) = self.nodes.last_mut() {
                *node = (end, y);
            }
        }
    }
}

/// Capture located during integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaptureEvent<const N: usize> {
    /// Where `μ` crosses `mu_min`, refined to `event_tol`.
    pub s_cross: f64,
    /// State at `s_cross`.
    pub state: [f64; N],
    /// Extrapolated blow-up point where `e^μ` reaches zero.
    pub s_blowup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<const N: usize> {
    Completed([f64; N]),
    Captured(CaptureEvent<N>),
    Failed(String),
}

impl<const N: usize> Outcome<N> {
    pub fn is_captured(&self) -> bool {
        matches!(self, Outcome::Captured(_))
    }

    pub fn is_completed(&self) -> bool {
        matches!(self, Outcome::Completed(_))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub rhs_evals: usize,
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub trajectory: Trajectory<N>,
    pub outcome: Outcome<N>,
    pub stats: Stats,
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Continuous extension (Hairer & Wanner's dense output for DOPRI5).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller constants.
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const MIN_SHRINK: f64 = 0.2;
const MAX_GROW: f64 = 10.0;

/// Number of accepted nodes (besides the crossing point) used for the blow-up fit.
const EXTRAPOLATION_NODES: usize = 3;

fn lincomb<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn all_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

struct StepData<const N: usize> {
    y_new: [f64; N],
    err_vec: [f64; N],
    ks: [[f64; N]; 7],
}

fn eval_checked<const N: usize, F, E>(rhs: &mut F, s: f64, y: &[f64; N]) -> Result<[f64; N], String>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    E: Display,
{
    let k = rhs(s, y).map_err(|e| e.to_string())?;
    if all_finite(&k) {
        Ok(k)
    } else {
        Err(format!("non-finite derivative at s = {s}"))
    }
}

/// One Dormand–Prince attempt from `(s, y)` with first stage `k1`.
fn dopri_step<const N: usize, F, E>(
    rhs: &mut F,
    s: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> Result<StepData<N>, String>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    E: Display,
{
    let y2 = lincomb(y, h, &[(A21, k1)]);
    let k2 = eval_checked(rhs, s + C2 * h, &y2)?;
    let y3 = lincomb(y, h, &[(A31, k1), (A32, &k2)]);
    let k3 = eval_checked(rhs, s + C3 * h, &y3)?;
    let y4 = lincomb(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]);
    let k4 = eval_checked(rhs, s + C4 * h, &y4)?;
    let y5 = lincomb(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
    let k5 = eval_checked(rhs, s + C5 * h, &y5)?;
    let y6 = lincomb(
        y,
        h,
        &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
    );
    let k6 = eval_checked(rhs, s + h, &y6)?;
    let y_new = lincomb(
        y,
        h,
        &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
    );
    if !all_finite(&y_new) {
        return Err(format!("non-finite state after step from s = {s}"));
    }
    let k7 = eval_checked(rhs, s + h, &y_new)?;
    let err_vec = std::array::from_fn(|i| {
        h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
    });
    Ok(StepData {
        y_new,
        err_vec,
        ks: [*k1, k2, k3, k4, k5, k6, k7],
    })
}

fn initial_step<const N: usize, F, E>(
    rhs: &mut F,
    s0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    cfg: &IntegratorConfig,
    span: f64,
    stats: &mut Stats,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
{
    let hmax = cfg.max_step.min(span);
    let sk: [f64; N] = std::array::from_fn(|i| cfg.abs_tol + cfg.rel_tol * y0[i].abs());
    let dnf: f64 = (0..N).map(|i| (f0[i] / sk[i]).powi(2)).sum();
    let dny: f64 = (0..N).map(|i| (y0[i] / sk[i]).powi(2)).sum();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(hmax);
    let y1 = lincomb(y0, h, &[(1.0, f0)]);
    stats.rhs_evals += 1;
    let der2 = match rhs(s0 + h, &y1) {
        Ok(f1) if all_finite(&f1) => {
            (0..N)
                .map(|i| ((f1[i] - f0[i]) / sk[i]).powi(2))
                .sum::<f64>()
                .sqrt()
                / h
        }
        _ => f64::INFINITY,
    };
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    // Near-zero components can drive the estimate below the underflow guard.
    let floor = 1e3 * f64::EPSILON * s0.abs().max(1.0);
    (100.0 * h).min(h1).min(hmax).max(floor.min(hmax))
}

/// Integrate `dy/ds = rhs(s, y)` from `span.0` to `span.1`.
///
/// With a `capture` monitor, integration stops at the first point where the
/// monitored log-separation falls to `cfg.mu_min`. A right-hand side error or
/// a step-size underflow ends the run with [`Outcome::Failed`]; the trajectory
/// up to that point is kept.
pub fn integrate<const N: usize, F, E>(
    mut rhs: F,
    y0: [f64; N],
    span: (f64, f64),
    cfg: &IntegratorConfig,
    capture: Option<&dyn CaptureMonitor<N>>,
) -> Result<Solution<N>, IntegrateError>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    E: Display,
{
    let (s0, s1) = span;
    if !(s0.is_finite() && s1.is_finite() && s1 > s0) {
        return Err(IntegrateError::InvalidSpan { s0, s1 });
    }
    cfg.validate()?;
    if !all_finite(&y0) {
        return Err(IntegrateError::NonFiniteInitial);
    }

    let mut stats = Stats::default();
    let mut trajectory = Trajectory::new(s0, y0);
    let finish = |trajectory, outcome, stats| {
        Ok(Solution {
            trajectory,
            outcome,
            stats,
        })
    };

    if let Some(m) = capture {
        if m.log_separation(s0, &y0) <= cfg.mu_min {
            let event = CaptureEvent {
                s_cross: s0,
                state: y0,
                s_blowup: s0,
            };
            return finish(trajectory, Outcome::Captured(event), stats);
        }
    }

    stats.rhs_evals += 1;
    let mut k1 = match rhs(s0, &y0) {
        Ok(k) if all_finite(&k) => k,
        Ok(_) => {
            return finish(
                trajectory,
                Outcome::Failed(format!("non-finite derivative at s = {s0}")),
                stats,
            )
        }
        Err(e) => {
            return finish(
                trajectory,
                Outcome::Failed(format!("singular vector field at s = {s0}: {e}")),
                stats,
            )
        }
    };

    let mut h = initial_step(&mut rhs, s0, &y0, &k1, cfg, s1 - s0, &mut stats);
    let mut s = s0;
    let mut y = y0;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;
    let mut last_error: Option<String> = None;

    loop {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            let msg = format!("step limit {} reached at s = {s}", cfg.max_steps);
            return finish(trajectory, Outcome::Failed(msg), stats);
        }
        let h_min = 16.0 * f64::EPSILON * s.abs().max(1.0);
        if h < h_min {
            let mut msg = format!("step size underflow at s = {s} (h = {h:e})");
            if let Some(e) = &last_error {
                msg.push_str(&format!("; last vector field error: {e}"));
            }
            return finish(trajectory, Outcome::Failed(msg), stats);
        }
        let reaches_end = s + h * 1.0001 >= s1;
        if reaches_end {
            h = s1 - s;
        }

        let attempt = dopri_step(&mut rhs, s, &y, &k1, h);
        stats.rhs_evals += 6;

        let StepData { y_new, err_vec, ks } = match attempt {
            Ok(v) => v,
            Err(e) => {
                last_error = Some(e);
                stats.rejected += 1;
                h *= 0.25;
                last_rejected = true;
                continue;
            }
        };

        let err = {
            let sum: f64 = (0..N)
                .map(|i| {
                    let sk = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
                    (err_vec[i] / sk).powi(2)
                })
                .sum();
            (sum / N as f64).sqrt()
        };
        if !err.is_finite() {
            stats.rejected += 1;
            h *= 0.25;
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / MAX_GROW, 1.0 / MIN_SHRINK);
            let mut h_new = h / fac;
            fac_old = err.max(1e-4);
            stats.accepted += 1;
            last_error = None;

            let [k1s, _k2, k3, k4, k5, k6, k7] = ks;
            let s_new = if reaches_end { s1 } else { s + h };
            let rcont: [[f64; N]; 5] = {
                let ydiff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
                let bspl: [f64; N] = std::array::from_fn(|i| h * k1s[i] - ydiff[i]);
                [
                    y,
                    ydiff,
                    bspl,
                    std::array::from_fn(|i| ydiff[i] - h * k7[i] - bspl[i]),
                    std::array::from_fn(|i| {
                        h * (D1 * k1s[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i])
                    }),
                ]
            };
            trajectory.push(Segment {
                s0: s,
                h,
                end: s_new,
                y_end: y_new,
                rcont,
            });

            if let Some(m) = capture {
                if m.log_separation(s_new, &y_new) <= cfg.mu_min {
                    if let Some(event) = detect_capture(&trajectory, m, cfg) {
                        trajectory.truncate_last(event.s_cross);
                        return finish(trajectory, Outcome::Captured(event), stats);
                    }
                }
            }

            if reaches_end {
                return finish(trajectory, Outcome::Completed(y_new), stats);
            }
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            s = s_new;
            y = y_new;
            k1 = k7;
            h = h_new.min(cfg.max_step);
        } else {
            h /= (fac11 / SAFETY).min(1.0 / MIN_SHRINK);
            stats.rejected += 1;
            last_rejected = true;
        }
    }
}

/// Localize a capture inside the last accepted step of `traj`.
///
/// Returns `None` unless the monitored `μ` starts the last step above
/// `cfg.mu_min` and ends at or below it. The crossing is bracketed by bisection
/// on the dense output until the bracket is narrower than `cfg.event_tol`; the
/// reported `s_cross` is the right end of that bracket, so `μ(s_cross) <= mu_min`.
pub fn detect_capture<const N: usize>(
    traj: &Trajectory<N>,
    monitor: &dyn CaptureMonitor<N>,
    cfg: &IntegratorConfig,
) -> Option<CaptureEvent<N>> {
    let seg = traj.segments.last()?;
    let g = |s: f64| monitor.log_separation(s, &seg.eval(s)) - cfg.mu_min;
    let (mut lo, mut hi) = (seg.s0, seg.end);
    if !(g(lo) > 0.0 && g(hi) <= 0.0) {
        return None;
    }
    for _ in 0..200 {
        if hi - lo <= cfg.event_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let state = seg.eval(hi);
    let rho_cross = monitor.log_separation(hi, &state).exp();

    // Fit e^μ ≈ α + β s over the last few nodes before the crossing.
    let nodes = traj.nodes();
    let before = &nodes[..nodes.len() - 1];
    let mut pts: Vec<(f64, f64)> = before
        .iter()
        .rev()
        .filter(|(s, _)| *s < hi)
        .take(EXTRAPOLATION_NODES)
        .map(|(s, y)| (*s, monitor.log_separation(*s, y).exp()))
        .collect();
    pts.push((hi, rho_cross));
    let s_blowup = linear_root(&pts).filter(|r| *r >= hi).unwrap_or(hi);

    Some(CaptureEvent {
        s_cross: hi,
        state,
        s_blowup,
    })
}

/// Root of the least-squares line through `pts`, if it is decreasing.
fn linear_root(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let s_mean = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let r_mean = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - s_mean).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - s_mean) * (p.1 - r_mean)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return None;
    }
    Some(s_mean - r_mean / slope)
}
