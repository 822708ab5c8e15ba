//! Reference scenarios checked end to end.
//!
//! Each case reproduces one published result or structural property and
//! reports pass/fail together with the measured quantities.

use num_complex::Complex64;
use pursuit_core::analysis::{
    annulus_bounds, blowup_lower_bound, blowup_upper_bound, compare_parametrizations,
    complex_trajectory, distance_functional, distance_slope, find_periodic_orbit,
    jacobian_circular, measure_capture, orbit_samples, period_shift_functional, OrbitConfig,
};
use pursuit_core::dynamics::{
    complex_rhs_phi, elliptical_rhs_phi, logpolar_rhs_phi, reconstruct_pursuer, TangentAnglePath,
};
use pursuit_core::flow::{circular_time_flow, logpolar_flow, pursuit_flow};
use pursuit_core::integrate::Trajectory;
use pursuit_core::{
    ComplexState, EllipseGeometry, IntegratorConfig, LogPolarState, Outcome, Point, PolarState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

pub const CASES: [u32; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

/// Knobs for negative controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Multiplies the closed-form capture bound before it is checked.
    pub bound_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { bound_scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// One line per individual check.
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
}

impl CaseReport {
    fn new(id: u32, name: &'static str) -> Self {
        Self {
            id,
            name,
            passed: true,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, passed: bool, label: String) {
        self.passed &= passed;
        self.checks.push(Check { label, passed });
    }

    fn error(&mut self, what: &str, err: impl std::fmt::Display) {
        self.check(false, format!("{what}: {err}"));
    }

    pub fn status(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!("[{}] case {}: {}\n", self.status(), self.id, self.name);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "    {} {}",
                if c.passed { "ok  " } else { "FAIL" },
                c.label
            );
        }
        s
    }
}

pub fn case_name(id: u32) -> &'static str {
    match id {
        1 => "circular capture",
        2 => "elliptical capture",
        3 => "circular equilibrium",
        4 => "elliptical periodic orbit",
        5 => "contraction of L and D",
        6 => "formulation equivalence",
        7 => "reparametrization invariance",
        8 => "boundary speed ratio n = 1",
        _ => "unknown case",
    }
}

pub fn run_case(id: u32, opts: &VerifyOptions) -> CaseReport {
    let mut r = CaseReport::new(id, case_name(id));
    match id {
        1 => circular_capture(&mut r, opts),
        2 => elliptical_capture(&mut r),
        3 => circular_equilibrium(&mut r),
        4 => elliptical_orbit(&mut r),
        5 => contraction(&mut r),
        6 => equivalence(&mut r),
        7 => invariance(&mut r),
        8 => boundary(&mut r),
        _ => r.check(false, format!("no case with id {id}")),
    }
    r
}

/// Run the selected cases on scoped threads, returned in id order.
pub fn run_cases(ids: &[u32], opts: &VerifyOptions) -> Vec<CaseReport> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = ids
            .iter()
            .map(|&id| scope.spawn(move || run_case(id, opts)))
            .collect();
        handles
            .into_iter()
            .zip(ids)
            .map(|(h, &id)| {
                h.join().unwrap_or_else(|_| {
                    let mut r = CaseReport::new(id, case_name(id));
                    r.check(false, "case panicked".into());
                    r
                })
            })
            .collect()
    })
}

fn unit_circle() -> EllipseGeometry {
    EllipseGeometry::circle(1.0).unwrap()
}

fn half_ellipse() -> EllipseGeometry {
    EllipseGeometry::new(1.0, 0.5).unwrap()
}

fn tight() -> IntegratorConfig {
    IntegratorConfig::with_tolerances(1e-12, 1e-14)
}

fn circular_capture(r: &mut CaseReport, opts: &VerifyOptions) {
    let g = unit_circle();
    let report = match measure_capture(
        &g,
        1.2,
        LogPolarState::new(0.0, FRAC_PI_2),
        FRAC_PI_2,
        &tight(),
    ) {
        Ok(v) => v,
        Err(e) => return r.error("capture", e),
    };
    let span = report.measured_span();
    r.check(
        (span - 1.676).abs() <= 0.005,
        format!("capture span {span:.5} within 1.676 +/- 0.005"),
    );
    let upper = match blowup_upper_bound(&g, 1.2, 0.0, FRAC_PI_2) {
        Ok(u) => (u - FRAC_PI_2) * opts.bound_scale,
        Err(e) => return r.error("upper bound", e),
    };
    r.check(
        span <= upper,
        format!("capture span {span:.5} <= upper bound {upper:.5}"),
    );
    let lower = blowup_lower_bound(&g, 1.2, 0.0);
    r.check(
        span >= lower,
        format!("capture span {span:.5} >= lower bound {lower:.5}"),
    );
}

fn elliptical_capture(r: &mut CaseReport) {
    let g = half_ellipse();
    let report = match measure_capture(
        &g,
        1.2,
        LogPolarState::new(0.0, FRAC_PI_2),
        FRAC_PI_2,
        &tight(),
    ) {
        Ok(v) => v,
        Err(e) => return r.error("capture", e),
    };
    let phi_b = report.phi_b_measured;
    r.check(
        (phi_b - 3.151).abs() <= 0.005,
        format!("capture angle {phi_b:.5} within 3.151 +/- 0.005"),
    );
    let span = report.measured_span();
    let bound = report.upper_bound - FRAC_PI_2;
    r.check(
        span <= bound,
        format!("capture span {span:.5} <= {bound:.5}"),
    );
    let t = g.t_of_phi(FRAC_PI_2, phi_b);
    r.check(
        (t - 1.229).abs() <= 0.005,
        format!("capture time {t:.5} within 1.229 +/- 0.005"),
    );
}

fn circular_equilibrium(r: &mut CaseReport) {
    let span = (0.0, 20.0 * PI);
    match circular_time_flow(
        1.0,
        0.5,
        PolarState::new(1.0, FRAC_PI_2),
        span,
        &IntegratorConfig::default(),
    ) {
        Ok(sol) => {
            let [rho, zeta] = sol.trajectory.final_state();
            let err = (rho - 0.8660254)
                .abs()
                .max((zeta - std::f64::consts::FRAC_PI_3).abs());
            let done = sol.outcome.is_completed();
            r.check(
                done && err < 1e-3,
                format!("final (rho, zeta) = ({rho:.7}, {zeta:.7}), distance {err:.2e} < 1e-3"),
            );
        }
        Err(e) => r.error("integration", e),
    }
    match jacobian_circular(1.0, 0.5) {
        Ok(rep) => {
            let gap = rep
                .eigenvalues
                .iter()
                .zip(rep.numeric_eigenvalues.iter())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            r.check(
                gap < 1e-10,
                format!("closed-form and numeric eigenvalues differ by {gap:.2e} < 1e-10"),
            );
            let re = rep
                .eigenvalues
                .iter()
                .map(|l| l.re)
                .fold(f64::NEG_INFINITY, f64::max);
            r.check(re < 0.0, format!("largest real part {re:.6} < 0"));
        }
        Err(e) => r.error("jacobian", e),
    }
}

const ORBIT_SEEDS: [(f64, f64); 4] = [
    (0.0, FRAC_PI_2),
    (1.0, 0.1),
    (-0.5, FRAC_PI_2),
    (-0.7, -FRAC_PI_2),
];

fn elliptical_orbit(r: &mut CaseReport) {
    let (g, n, phi0) = (half_ellipse(), 0.5, FRAC_PI_2);
    let cfg = tight();
    let end = phi0 + 20.0 * PI;
    let mut trajs: Vec<Trajectory<2>> = Vec::new();
    for (mu, zeta) in ORBIT_SEEDS {
        match complex_trajectory(
            LogPolarState::new(mu, zeta).to_complex(),
            (phi0, end),
            &g,
            n,
            &cfg,
        ) {
            Ok(t) => trajs.push(t),
            Err(e) => return r.error("integration", e),
        }
    }
    let mut spread: f64 = 0.0;
    for k in 0..=400 {
        let phi = (phi0 + 18.0 * PI + 2.0 * PI * k as f64 / 400.0).min(end);
        let zs: Vec<Complex64> = trajs
            .iter()
            .map(|t| ComplexState::from_array(t.dense_eval(phi).expect("inside span")).z)
            .collect();
        for i in 0..zs.len() {
            for j in i + 1..zs.len() {
                spread = spread.max((zs[i] - zs[j]).norm());
            }
        }
    }
    r.check(
        spread < 1e-4,
        format!("max pairwise |z_i - z_j| on the last two periods {spread:.2e} < 1e-4"),
    );

    let orbit_cfg = OrbitConfig::default();
    let seed = LogPolarState::new(ORBIT_SEEDS[0].0, ORBIT_SEEDS[0].1).to_complex();
    let star = match find_periodic_orbit(&g, n, phi0, seed, &orbit_cfg) {
        Ok(s) => s,
        Err(e) => return r.error("periodic orbit", e),
    };
    r.check(
        star.residual < 1e-10,
        format!(
            "fixed-point residual {:.2e} < 1e-10 after {} iterations",
            star.residual,
            star.iterates.len() - 1
        ),
    );
    match orbit_samples(star.fixed_point, phi0, &g, n, 721, &cfg) {
        Ok(samples) => {
            let rhos = samples.iter().map(|(_, z)| z.rho());
            let lo = rhos.clone().fold(f64::INFINITY, f64::min);
            let hi = rhos.fold(f64::NEG_INFINITY, f64::max);
            let inside = (0.35..=0.85).contains(&lo) && (0.35..=0.85).contains(&hi);
            r.check(
                inside,
                format!("orbit rho range [{lo:.4}, {hi:.4}] inside [0.35, 0.85]"),
            );
        }
        Err(e) => r.error("orbit samples", e),
    }

    for (k, ((mu, zeta), traj)) in ORBIT_SEEDS.iter().zip(&trajs).enumerate() {
        let p0 = reconstruct_pursuer(LogPolarState::new(*mu, *zeta).to_polar(), phi0, &g);
        let bounds = annulus_bounds(p0, &g);
        let max = traj
            .nodes()
            .iter()
            .map(|(_, y)| ComplexState::from_array(*y).rho())
            .fold(0.0, f64::max);
        r.check(
            max <= bounds.n_prime + 1e-9,
            format!(
                "seed {}: max |z| {max:.4} <= N' = {:.4}",
                k + 1,
                bounds.n_prime
            ),
        );
        if k == 0 {
            r.check(
                max <= 2.0,
                format!("seed 1 (pursuer at origin): max |z| {max:.4} <= 2.0"),
            );
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> ComplexState {
    ComplexState::new(Complex64::from_polar(
        rng.gen_range(0.2..2.0),
        rng.gen_range(-PI..PI),
    ))
}

/// Squared distances at or below this are treated as the same solution.
const DISTINCT_L: f64 = 1e-12;

fn contraction(r: &mut CaseReport) {
    let (g, n, phi0) = (half_ellipse(), 0.5, FRAC_PI_2);
    let cfg = tight();
    let end = phi0 + 20.0 * PI;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut violations, mut compared, mut worst_fd): (usize, usize, f64) = (0, 0, 0.0);
    for _ in 0..20 {
        let (z1, z2) = (random_state(&mut rng), random_state(&mut rng));
        let pair = complex_trajectory(z1, (phi0, end), &g, n, &cfg)
            .and_then(|a| complex_trajectory(z2, (phi0, end), &g, n, &cfg).map(|b| (a, b)));
        let (t1, t2) = match pair {
            Ok(p) => p,
            Err(e) => return r.error("integration", e),
        };
        let at = |phi: f64| {
            (
                ComplexState::from_array(t1.dense_eval(phi).expect("inside span")),
                ComplexState::from_array(t2.dense_eval(phi).expect("inside span")),
            )
        };
        let l = |phi: f64| {
            let (a, b) = at(phi);
            distance_functional(a, b)
        };
        for k in 0..20 {
            let (now, next) = (
                l(phi0 + k as f64 * PI),
                l((phi0 + (k + 1) as f64 * PI).min(end)),
            );
            if now <= DISTINCT_L {
                break;
            }
            compared += 1;
            if next >= now {
                violations += 1;
            }
        }
        let h = 1e-4;
        for k in 1..20 {
            let phi = phi0 + 2.0 * PI * k as f64 / 20.0;
            let fd = (l(phi + h) - l(phi - h)) / (2.0 * h);
            let (a, b) = at(phi);
            match distance_slope(a, b, phi, &g, n) {
                Ok(exact) => worst_fd = worst_fd.max((fd - exact).abs()),
                Err(e) => return r.error("slope", e),
            }
        }
    }
    r.check(
        violations == 0,
        format!("L decreased over all {compared} distinct periods ({violations} violations)"),
    );
    r.check(
        worst_fd < 1e-6,
        format!("analytic dL/dphi vs finite differences {worst_fd:.2e} < 1e-6"),
    );

    let seed = LogPolarState::new(0.0, FRAC_PI_2).to_complex();
    let traj = match complex_trajectory(seed, (phi0, end + PI), &g, n, &cfg) {
        Ok(t) => t,
        Err(e) => return r.error("integration", e),
    };
    let ds: Vec<f64> = (0..=320)
        .map(|k| {
            period_shift_functional(&traj, phi0 + 20.0 * PI * k as f64 / 320.0).unwrap_or(f64::NAN)
        })
        .collect();
    let worst_rise = ds
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    r.check(
        worst_rise <= 1e-12,
        format!("D non-increasing (largest rise {worst_rise:.2e})"),
    );
    let last = *ds.last().unwrap();
    r.check(last < 1e-6, format!("D(phi0 + 20 pi) = {last:.2e} < 1e-6"));
}

fn cartesian_gap(n: f64) -> Result<f64, String> {
    let g = half_ellipse();
    let cfg = tight();
    let phi0 = FRAC_PI_2;
    let initial = LogPolarState::new(0.0, FRAC_PI_2);
    let reduced =
        logpolar_flow(&g, n, initial, (phi0, phi0 + PI), &cfg).map_err(|e| e.to_string())?;
    let end = match reduced.outcome {
        Outcome::Captured(e) => e.s_cross,
        _ => phi0 + PI,
    };
    let p0 = reconstruct_pursuer(initial.to_polar(), phi0, &g);
    let cart = pursuit_flow(&TangentAnglePath(g), n, p0, (phi0, end), &cfg, false)
        .map_err(|e| e.to_string())?;
    if !cart.outcome.is_completed() {
        return Err(format!("{:?}", cart.outcome));
    }
    let mut worst: f64 = 0.0;
    for k in 0..=1000 {
        let phi = phi0 + (end - phi0) * k as f64 / 1000.0;
        let y = cart.trajectory.dense_eval(phi).map_err(|e| e.to_string())?;
        let mu = reduced
            .trajectory
            .dense_eval(phi)
            .map_err(|e| e.to_string())?[0];
        worst =
            worst.max(((g.evader_position(phi) - Point::new(y[0], y[1])).norm() - mu.exp()).abs());
    }
    Ok(worst)
}

fn equivalence(r: &mut CaseReport) {
    for n in [0.5, 1.2] {
        match cartesian_gap(n) {
            Ok(gap) => r.check(
                gap < 1e-6,
                format!("n = {n}: max |e^mu - |E - P|| = {gap:.2e} < 1e-6"),
            ),
            Err(e) => r.error("cartesian integration", e),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = rng.gen_range(0.3..3.0);
        let g = EllipseGeometry::new(a, a * rng.gen_range(0.2..=1.0)).unwrap();
        let n = rng.gen_range(0.1..3.0);
        let (rho, zeta, phi) = (
            rng.gen_range(1e-3..10.0),
            rng.gen_range(-PI..PI),
            rng.gen_range(-10.0..10.0),
        );
        let polar = elliptical_rhs_phi(PolarState::new(rho, zeta), phi, &g, n).expect("rho > 0");
        let log = logpolar_rhs_phi(LogPolarState::new(rho.ln(), zeta), phi, &g, n);
        let z = Complex64::from_polar(rho, zeta);
        let dz = complex_rhs_phi(ComplexState::new(z), phi, &g, n).expect("z != 0");
        let via_polar = Complex64::new(polar[0], rho * polar[1]) * Complex64::from_polar(1.0, zeta);
        let rel = |x: f64, y: f64| (x - y).abs() / (1.0 + y.abs());
        worst = worst
            .max((dz - via_polar).norm() / (1.0 + dz.norm()))
            .max(rel(log[0], polar[0] / rho))
            .max(rel(log[1], polar[1]));
    }
    r.check(
        worst < 1e-10,
        format!("polar / log-polar / complex fields on 1000 states agree to {worst:.2e} < 1e-10"),
    );
}

fn invariance(r: &mut CaseReport) {
    let u = (|t: f64| t + 0.3 * t.sin(), |t: f64| 1.0 + 0.3 * t.cos());
    match compare_parametrizations(
        &half_ellipse(),
        0.5,
        Point::zeros(),
        &u,
        (0.0, 2.0 * PI),
        &tight(),
    ) {
        Ok(dev) => r.check(
            dev < 1e-6,
            format!("max deviation at matched evader positions {dev:.2e} < 1e-6"),
        ),
        Err(e) => r.error("comparison", e),
    }
}

fn boundary(r: &mut CaseReport) {
    for (label, g) in [("circle", unit_circle()), ("ellipse", half_ellipse())] {
        let span = (FRAC_PI_2, FRAC_PI_2 + 2.0 * PI);
        match logpolar_flow(
            &g,
            1.0,
            LogPolarState::new(0.0, FRAC_PI_2),
            span,
            &IntegratorConfig::default(),
        ) {
            Ok(sol) => {
                r.check(
                    sol.outcome.is_completed(),
                    format!(
                        "{label}: no capture over 2 pi ({})",
                        outcome_word(&sol.outcome)
                    ),
                );
                let mus: Vec<f64> = sol.trajectory.nodes().iter().map(|(_, y)| y[0]).collect();
                let monotone = mus.windows(2).all(|w| w[1] <= w[0]);
                r.check(
                    monotone,
                    format!(
                        "{label}: mu non-increasing, final mu = {:.4}",
                        mus.last().unwrap()
                    ),
                );
            }
            Err(e) => r.error(label, e),
        }
    }
}

fn outcome_word<const N: usize>(o: &Outcome<N>) -> &'static str {
    match o {
        Outcome::Completed(_) => "completed",
        Outcome::Captured(_) => "captured",
        Outcome::Failed(_) => "failed",
    }
}
