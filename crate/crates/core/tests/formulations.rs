use num_complex::Complex64;
use proptest::prelude::*;
use pursuit_core::dynamics::{
    cartesian_to_reduced, circular_rhs_phi, circular_rhs_t, complex_rhs_phi, elliptical_rhs_phi,
    logpolar_rhs_phi, logpolar_rhs_t, reconstruct_pursuer, TangentAnglePath,
};
use pursuit_core::flow::{logpolar_flow, polar_flow, pursuit_flow};
use pursuit_core::{
    CartesianPair, ComplexState, EllipseGeometry, IntegratorConfig, LogPolarState, Point,
    PolarState,
};
use std::f64::consts::{FRAC_PI_2, PI};

fn geometry() -> impl Strategy<Value = EllipseGeometry> {
    (0.3f64..3.0, 0.2f64..=1.0).prop_map(|(a, ratio)| EllipseGeometry::new(a, a * ratio).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reduced_fields_agree(
        g in geometry(),
        n in 0.1f64..3.0,
        rho in 1e-3f64..10.0,
        zeta in -10.0f64..10.0,
        phi in -20.0f64..20.0,
    ) {
        let polar = elliptical_rhs_phi(PolarState::new(rho, zeta), phi, &g, n).unwrap();
        let log = logpolar_rhs_phi(LogPolarState::new(rho.ln(), zeta), phi, &g, n);
        let z = ComplexState::new(Complex64::from_polar(rho, zeta));
        let dz = complex_rhs_phi(z, phi, &g, n).unwrap();
        // dz/dφ = (ρ' + iρζ') e^{iζ}
        let from_polar = Complex64::new(polar[0], rho * polar[1]) * Complex64::from_polar(1.0, zeta);
        let scale = 1.0 + dz.norm();
        prop_assert!((dz - from_polar).norm() <= 1e-10 * scale);
        prop_assert!((log[0] - polar[0] / rho).abs() <= 1e-10 * (1.0 + log[0].abs()));
        prop_assert!((log[1] - polar[1]).abs() <= 1e-10 * (1.0 + log[1].abs()));
    }

    #[test]
    fn circular_fields_are_rescalings(a in 0.2f64..5.0, n in 0.1f64..3.0, rho in 1e-3f64..10.0, zeta in -7.0f64..7.0) {
        let s = PolarState::new(rho, zeta);
        let in_t = circular_rhs_t(s, a, n).unwrap();
        let in_phi = circular_rhs_phi(s, a, n).unwrap();
        let general = elliptical_rhs_phi(s, 0.7, &EllipseGeometry::circle(a).unwrap(), n).unwrap();
        for k in 0..2 {
            prop_assert!((in_phi[k] - a * in_t[k]).abs() <= 1e-12 * (1.0 + in_phi[k].abs()));
            prop_assert!((in_phi[k] - general[k]).abs() <= 1e-12 * (1.0 + in_phi[k].abs()));
        }
        let log = logpolar_rhs_t(LogPolarState::new(rho.ln(), zeta), 1.0 / a, n);
        prop_assert!((log[0] - in_t[0] / rho).abs() <= 1e-12 * (1.0 + log[0].abs()));
        prop_assert!((log[1] - in_t[1]).abs() <= 1e-12 * (1.0 + log[1].abs()));
    }

    #[test]
    fn reconstruction_round_trips(g in geometry(), rho in 1e-2f64..5.0, zeta in -PI..PI, phi in -10.0f64..10.0) {
        let p = reconstruct_pursuer(PolarState::new(rho, zeta), phi, &g);
        let pair = CartesianPair { evader: g.evader_position(phi), pursuer: p };
        prop_assert!((pair.separation() - rho).abs() <= 1e-12 * (1.0 + rho));
        let back = cartesian_to_reduced(&pair, phi, zeta).unwrap();
        prop_assert!((back.rho - rho).abs() <= 1e-12 * (1.0 + rho));
        prop_assert!((back.zeta - zeta).abs() <= 1e-9);
    }

    #[test]
    fn log_polar_complex_round_trip(mu in -15.0f64..3.0, zeta in -PI..PI) {
        let s = LogPolarState::new(mu, zeta);
        let back = s.to_complex().to_log_polar().unwrap();
        prop_assert!((back.mu - mu).abs() <= 1e-12);
        prop_assert!((pursuit_core::dynamics::wrap_near(back.zeta, zeta) - zeta).abs() <= 1e-12);
    }
}

fn cartesian_vs_logpolar(n: f64) -> f64 {
    let g = EllipseGeometry::new(1.0, 0.5).unwrap();
    let cfg = IntegratorConfig::with_tolerances(1e-12, 1e-14);
    let phi0 = FRAC_PI_2;
    let initial = LogPolarState::new(0.0, FRAC_PI_2);
    let reduced = logpolar_flow(&g, n, initial, (phi0, phi0 + PI), &cfg).unwrap();
    let end = match &reduced.outcome {
        pursuit_core::Outcome::Captured(e) => e.s_cross,
        _ => phi0 + PI,
    };
    let p0 = reconstruct_pursuer(initial.to_polar(), phi0, &g);
    let path = TangentAnglePath(g);
    let cart = pursuit_flow(&path, n, p0, (phi0, end), &cfg, false).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..=400 {
        let phi = phi0 + (end - phi0) * k as f64 / 400.0;
        let y = cart.trajectory.dense_eval(phi).unwrap();
        let sep = (g.evader_position(phi) - Point::new(y[0], y[1])).norm();
        let mu = reduced.trajectory.dense_eval(phi).unwrap()[0];
        worst = worst.max((sep - mu.exp()).abs());
    }
    worst
}

#[test]
fn cartesian_and_log_polar_separations_agree() {
    for n in [0.5, 1.2] {
        let d = cartesian_vs_logpolar(n);
        assert!(d < 1e-6, "n = {n}: {d:e}");
    }
}

#[test]
fn polar_and_log_polar_trajectories_agree() {
    let g = EllipseGeometry::new(1.0, 0.5).unwrap();
    let cfg = IntegratorConfig::with_tolerances(1e-12, 1e-14);
    let span = (0.3, 0.3 + 2.0 * PI);
    let polar = polar_flow(&g, 0.5, PolarState::new(1.3, 0.4), span, &cfg).unwrap();
    let log = logpolar_flow(&g, 0.5, LogPolarState::new(1.3f64.ln(), 0.4), span, &cfg).unwrap();
    let a = polar.trajectory.final_state();
    let b = log.trajectory.final_state();
    assert!((a[0] - b[0].exp()).abs() < 1e-9);
    assert!((a[1] - b[1]).abs() < 1e-9);
}
