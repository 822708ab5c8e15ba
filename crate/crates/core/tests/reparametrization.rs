use pursuit_core::analysis::compare_parametrizations;
use pursuit_core::{EllipseGeometry, IntegratorConfig, Point};
use std::f64::consts::PI;

fn half() -> EllipseGeometry {
    EllipseGeometry::new(1.0, 0.5).unwrap()
}

#[test]
fn wobbly_reparametrization_keeps_the_path() {
    let cfg = IntegratorConfig::with_tolerances(1e-12, 1e-14);
    let u = (|t: f64| t + 0.3 * t.sin(), |t: f64| 1.0 + 0.3 * t.cos());
    let dev =
        compare_parametrizations(&half(), 0.5, Point::zeros(), &u, (0.0, 2.0 * PI), &cfg).unwrap();
    assert!(dev < 1e-6, "{dev:e}");
}

#[test]
fn affine_rescaling_keeps_the_path() {
    let cfg = IntegratorConfig::with_tolerances(1e-12, 1e-14);
    let u = (|t: f64| 2.0 * t, |_t: f64| 2.0);
    for g in [half(), EllipseGeometry::circle(2.0).unwrap()] {
        let dev =
            compare_parametrizations(&g, 0.5, Point::new(0.3, -0.2), &u, (0.0, PI), &cfg).unwrap();
        assert!(dev < 1e-6, "{dev:e}");
    }
}

#[test]
fn faster_pursuer_path_is_also_invariant() {
    // Stop well before capture, where the Cartesian field is singular.
    let cfg = IntegratorConfig::with_tolerances(1e-12, 1e-14);
    let u = (|t: f64| t + 0.3 * t.sin(), |t: f64| 1.0 + 0.3 * t.cos());
    let dev = compare_parametrizations(&half(), 1.2, Point::new(-1.0, 0.0), &u, (0.0, 0.5), &cfg)
        .unwrap();
    assert!(dev < 1e-6, "{dev:e}");
}
