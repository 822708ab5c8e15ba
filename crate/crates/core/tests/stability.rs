use nalgebra::Matrix2;
use proptest::prelude::*;
use pursuit_core::analysis::{equilibrium_circular, jacobian_circular};
use pursuit_core::dynamics::circular_rhs_t;
use pursuit_core::flow::circular_time_flow;
use pursuit_core::{IntegratorConfig, PolarState};
use std::f64::consts::FRAC_PI_2;

fn finite_difference_jacobian(s: PolarState, a: f64, n: f64) -> Matrix2<f64> {
    let h = 1e-6;
    let col = |dr: f64, dz: f64| {
        let p = circular_rhs_t(PolarState::new(s.rho + dr, s.zeta + dz), a, n).unwrap();
        let m = circular_rhs_t(PolarState::new(s.rho - dr, s.zeta - dz), a, n).unwrap();
        [(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)]
    };
    let (c0, c1) = (col(h, 0.0), col(0.0, h));
    Matrix2::new(c0[0], c1[0], c0[1], c1[1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn equilibrium_is_a_rest_point(a in 0.2f64..5.0, n in 0.01f64..0.99) {
        let e = equilibrium_circular(a, n).unwrap();
        let d = circular_rhs_t(e, a, n).unwrap();
        prop_assert!(d[0].abs() < 1e-12 && d[1].abs() < 1e-12, "{d:?}");
    }

    #[test]
    fn spectrum_matches_assembled_matrix(a in 0.2f64..5.0, n in 0.05f64..0.98) {
        let r = jacobian_circular(a, n).unwrap();
        for (x, y) in r.eigenvalues.iter().zip(r.numeric_eigenvalues.iter()) {
            prop_assert!((x - y).norm() <= 1e-10 * (1.0 + x.norm()), "{x} vs {y}");
            prop_assert!(x.re < 0.0);
        }
        let fd = finite_difference_jacobian(PolarState::new(r.rho_star, r.zeta_star), a, n);
        let scale = 1.0 + r.jacobian.abs().max();
        prop_assert!((fd - r.jacobian).abs().max() <= 1e-6 * scale, "{fd} vs {}", r.jacobian);
    }
}

#[test]
fn circular_trajectory_settles_at_equilibrium() {
    let cfg = IntegratorConfig::default();
    let span = (0.0, 20.0 * std::f64::consts::PI);
    let sol = circular_time_flow(1.0, 0.5, PolarState::new(1.0, FRAC_PI_2), span, &cfg).unwrap();
    let y = sol.trajectory.final_state();
    assert!(
        (y[0] - 0.8660254).abs() < 1e-3 && (y[1] - std::f64::consts::FRAC_PI_3).abs() < 1e-3,
        "{y:?}"
    );
}
