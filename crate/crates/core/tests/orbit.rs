use num_complex::Complex64;
use pursuit_core::analysis::{
    annulus_bounds, complex_trajectory, contraction_report, distance_functional, distance_slope,
    find_periodic_orbit, measured_inner_radius, poincare_map, OrbitConfig,
};
use pursuit_core::dynamics::{reconstruct_pursuer, TangentAnglePath};
use pursuit_core::flow::pursuit_flow;
use pursuit_core::{ComplexState, EllipseGeometry, IntegratorConfig, LogPolarState, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};

const PHI0: f64 = FRAC_PI_2;
const N: f64 = 0.5;
const SEEDS: [(f64, f64); 4] = [
    (0.0, FRAC_PI_2),
    (1.0, 0.1),
    (-0.5, FRAC_PI_2),
    (-0.7, -FRAC_PI_2),
];

fn half() -> EllipseGeometry {
    EllipseGeometry::new(1.0, 0.5).unwrap()
}

fn tight() -> IntegratorConfig {
    IntegratorConfig::with_tolerances(1e-12, 1e-14)
}

fn seed(k: usize) -> ComplexState {
    let (mu, zeta) = SEEDS[k];
    LogPolarState::new(mu, zeta).to_complex()
}

fn random_state(rng: &mut ChaCha8Rng) -> ComplexState {
    ComplexState::new(Complex64::from_polar(
        rng.gen_range(0.2..2.0),
        rng.gen_range(-PI..PI),
    ))
}

#[test]
fn poincare_iterates_form_a_semigroup() {
    let z0 = ComplexState::new(Complex64::i());
    let once = poincare_map(z0, PHI0, &half(), N, &tight()).unwrap();
    let twice = poincare_map(once, PHI0, &half(), N, &tight()).unwrap();
    let direct = complex_trajectory(z0, (PHI0, PHI0 + 2.0 * PI), &half(), N, &tight()).unwrap();
    let d = ComplexState::from_array(direct.final_state());
    assert!((twice.z - d.z).norm() < 1e-8);
}

#[test]
fn periodic_orbit_is_seed_independent() {
    let cfg = OrbitConfig::default();
    let stars: Vec<_> = (0..4)
        .map(|k| find_periodic_orbit(&half(), N, PHI0, seed(k), &cfg).unwrap())
        .collect();
    for s in &stars {
        assert!(s.residual < cfg.tol);
        for t in &stars {
            assert!((s.fixed_point.z - t.fixed_point.z).norm() < 10.0 * cfg.tol);
        }
    }
    let r = measured_inner_radius(stars[0].fixed_point, PHI0, &half(), N, &cfg.integrator).unwrap();
    assert!((0.35..0.85).contains(&r), "{r}");
}

#[test]
fn trajectories_from_all_seeds_merge() {
    let cfg = tight();
    let end = PHI0 + 20.0 * PI;
    let star = find_periodic_orbit(&half(), N, PHI0, seed(0), &OrbitConfig::default()).unwrap();
    let limit = complex_trajectory(star.fixed_point, (PHI0, end), &half(), N, &cfg).unwrap();
    let trajs: Vec<_> = (0..4)
        .map(|k| complex_trajectory(seed(k), (PHI0, end), &half(), N, &cfg).unwrap())
        .collect();
    for k in 0..=200 {
        let phi = (PHI0 + 18.0 * PI + 2.0 * PI * k as f64 / 200.0).min(end);
        let zs: Vec<Complex64> = trajs
            .iter()
            .map(|t| ComplexState::from_array(t.dense_eval(phi).unwrap()).z)
            .collect();
        let z_star = ComplexState::from_array(limit.dense_eval(phi).unwrap()).z;
        for z in &zs {
            assert!((z - z_star).norm() < 1e-4);
            for w in &zs {
                assert!((z - w).norm() < 1e-4);
            }
        }
    }
}

#[test]
fn separation_stays_inside_annulus_bound() {
    let cfg = tight();
    for (k, &(mu, zeta)) in SEEDS.iter().enumerate() {
        let s0 = LogPolarState::new(mu, zeta).to_polar();
        let p0 = reconstruct_pursuer(s0, PHI0, &half());
        let bounds = annulus_bounds(p0, &half());
        let traj = complex_trajectory(seed(k), (PHI0, PHI0 + 20.0 * PI), &half(), N, &cfg).unwrap();
        for (_, y) in traj.nodes() {
            assert!(ComplexState::from_array(*y).rho() <= bounds.n_prime + 1e-9);
        }
        if k == 0 {
            assert_eq!(bounds.n_prime, 2.0);
        }
    }
}

#[test]
fn pursuer_is_trapped_in_disk() {
    let g = half();
    let cfg = tight();
    let path = TangentAnglePath(g);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..6 {
        let p0 = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let r0 = p0.norm().max(g.a());
        let sol = pursuit_flow(&path, N, p0, (PHI0, PHI0 + 6.0 * PI), &cfg, true).unwrap();
        assert!(sol.outcome.is_completed());
        let traj = &sol.trajectory;
        let h = 1e-5;
        for k in 1..300 {
            let phi = PHI0 + 6.0 * PI * k as f64 / 300.0;
            let y = traj.dense_eval(phi).unwrap();
            let p = Point::new(y[0], y[1]);
            assert!(p.norm() <= r0 + 1e-9);
            let sq = |s: f64| {
                let v = traj.dense_eval(s).unwrap();
                v[0] * v[0] + v[1] * v[1]
            };
            // d/dt = f(φ) d/dφ for the unit-speed evader.
            let rate = (sq(phi + h) - sq(phi - h)) / (2.0 * h) * g.angular_rate(phi);
            let rho = (g.evader_position(phi) - p).norm();
            let bound = 2.0 * N * p.norm() / rho * (g.a() - p.norm());
            assert!(rate <= bound + 1e-5, "{rate} > {bound}");
        }
    }
}

#[test]
fn squared_distance_contracts_each_period() {
    // Below this L the pair is numerically identical.
    const DISTINCT: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = tight();
    for _ in 0..20 {
        let (z1, z2) = (random_state(&mut rng), random_state(&mut rng));
        let t1 = complex_trajectory(z1, (PHI0, PHI0 + 20.0 * PI), &half(), N, &cfg).unwrap();
        let t2 = complex_trajectory(z2, (PHI0, PHI0 + 20.0 * PI), &half(), N, &cfg).unwrap();
        let at = |k: usize| {
            let phi = PHI0 + k as f64 * PI;
            let a = ComplexState::from_array(t1.dense_eval(phi).unwrap());
            let b = ComplexState::from_array(t2.dense_eval(phi).unwrap());
            distance_functional(a, b)
        };
        for k in 0..20 {
            let (now, next) = (at(k), at(k + 1));
            if now < DISTINCT {
                break;
            }
            assert!(next < now, "k = {k}: {next} >= {now}");
        }
    }
}

#[test]
fn distance_slope_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = tight();
    let h = 1e-4;
    for _ in 0..5 {
        let (z1, z2) = (random_state(&mut rng), random_state(&mut rng));
        let t1 = complex_trajectory(z1, (PHI0, PHI0 + 2.0 * PI), &half(), N, &cfg).unwrap();
        let t2 = complex_trajectory(z2, (PHI0, PHI0 + 2.0 * PI), &half(), N, &cfg).unwrap();
        let pair = |phi: f64| {
            (
                ComplexState::from_array(t1.dense_eval(phi).unwrap()),
                ComplexState::from_array(t2.dense_eval(phi).unwrap()),
            )
        };
        for k in 1..40 {
            let phi = PHI0 + 2.0 * PI * k as f64 / 40.0;
            let l = |s: f64| {
                let (a, b) = pair(s);
                distance_functional(a, b)
            };
            let fd = (l(phi + h) - l(phi - h)) / (2.0 * h);
            let (a, b) = pair(phi);
            let exact = distance_slope(a, b, phi, &half(), N).unwrap();
            assert!(exact <= 0.0);
            assert!((fd - exact).abs() < 1e-6, "phi = {phi}: {fd} vs {exact}");
        }
    }
}

#[test]
fn period_shift_decays() {
    let cfg = tight();
    let r = contraction_report(seed(0), seed(1), PHI0, 20, 16, &half(), N, &cfg).unwrap();
    assert!(r.max_positive_slope <= 1e-9, "{}", r.max_positive_slope);
    for w in r.d_samples.windows(2) {
        assert!(w[1].1 <= w[0].1 + 1e-12, "{:?}", w);
    }
    assert!(r.d_samples.last().unwrap().1 < 1e-6);
}
