use proptest::prelude::*;
use pursuit_cli::config::{parse, Formulation};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pursuit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pursuit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const CIRCLE_SLOW: &str = "a = 1\nn = 0.5\nrho0 = 1\nspan = 10*pi\n";
const ELLIPSE_FAST: &str = "a = 1\nb = 0.5\nn = 1.2\nmu0 = 0\nspan = 2*pi\n";
const ELLIPSE_SLOW: &str = "a = 1\nb = 0.5\nn = 0.5\nmu0 = 0\nspan = 4*pi\n";

#[test]
fn simulate_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.cfg", ELLIPSE_FAST);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = pursuit(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let csv_a = fs::read(a.join("trajectory.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.join("trajectory.csv")).unwrap());
    let text = String::from_utf8(csv_a).unwrap();
    assert!(text.starts_with("phi,t,mu,zeta,rho,x,y,X,Y\n"));
    let summary = fs::read_to_string(a.join("summary.txt")).unwrap();
    assert!(summary.contains("outcome = captured"));
    assert!(summary.contains(&format!(
        "digest = {}",
        parse(ELLIPSE_FAST).unwrap().digest()
    )));
}

#[test]
fn circular_simulation_settles_at_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    for f in Formulation::ALL {
        let cfg = write_config(
            dir.path(),
            "c.cfg",
            &format!("{CIRCLE_SLOW}formulation = {f}\n"),
        );
        let out = dir.path().join(f.name());
        let o = pursuit(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
        let last: Vec<f64> = csv
            .lines()
            .last()
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert!((last[4] - 0.8660254).abs() < 1e-3, "{f}: rho = {}", last[4]);
        let zeta =
            last[3] - std::f64::consts::TAU * ((last[3] - 1.0) / std::f64::consts::TAU).round();
        assert!(
            (zeta - std::f64::consts::FRAC_PI_3).abs() < 1e-3,
            "{f}: zeta = {zeta}"
        );
    }
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let zero_span = write_config(dir.path(), "z.cfg", "a = 1\nn = 0.5\nrho0 = 1\nspan = 0\n");
    let unknown = write_config(
        dir.path(),
        "u.cfg",
        "a = 1\nn = 0.5\nrho0 = 1\nspan = 1\ncolor = red\n",
    );
    let out = dir.path().join("out");
    for cfg in [&zero_span, &unknown] {
        let o = pursuit(&["simulate", "--config", cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1));
    }
    assert_eq!(
        pursuit(&["simulate", "--config", "/nonexistent/x.cfg"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(pursuit(&["bogus"]).status.code(), Some(1));
    assert_eq!(pursuit(&["verify", "--case", "9"]).status.code(), Some(1));
    assert_eq!(pursuit(&["--help"]).status.code(), Some(0));
}

#[test]
fn orbit_checks_regime_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let fast = write_config(dir.path(), "f.cfg", ELLIPSE_FAST);
    assert_eq!(
        pursuit(&["orbit", "--config", &fast]).status.code(),
        Some(1)
    );

    let slow = write_config(dir.path(), "s.cfg", ELLIPSE_SLOW);
    let out = dir.path().join("orbit");
    let o = pursuit(&["orbit", "--config", &slow, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("N_prime = 2.0"));
    assert!(text.contains("(empirical)"));
    assert!(out.join("orbit.csv").exists());

    let circle = write_config(dir.path(), "c.cfg", CIRCLE_SLOW);
    let text = String::from_utf8(pursuit(&["orbit", "--config", &circle]).stdout).unwrap();
    assert!(text.contains("rho_star = 0.86602540"), "{text}");
}

#[test]
fn capture_reports_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let fast = write_config(dir.path(), "f.cfg", ELLIPSE_FAST);
    let o = pursuit(&["capture", "--config", &fast]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("upper_bound_span = 2.5"));
    assert!(text.contains("certified_bound_span = 20.0"));
    let slow = write_config(dir.path(), "s.cfg", ELLIPSE_SLOW);
    assert_eq!(
        pursuit(&["capture", "--config", &slow]).status.code(),
        Some(1)
    );
}

#[test]
fn portrait_marks_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", CIRCLE_SLOW);
    let out = dir.path().join("p");
    assert_eq!(
        pursuit(&["portrait", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let svg = fs::read_to_string(out.join("portrait.svg")).unwrap();
    assert!(svg.contains("<polyline") && svg.contains("<circle"));

    let fast = write_config(
        dir.path(),
        "f.cfg",
        "a = 1\nn = 1.2\nmu0 = 0\nspan = 2*pi\n",
    );
    let out = dir.path().join("q");
    assert_eq!(
        pursuit(&[
            "portrait",
            "--config",
            &fast,
            "--out",
            out.to_str().unwrap()
        ])
        .status
        .code(),
        Some(0)
    );
    let svg = fs::read_to_string(out.join("portrait.svg")).unwrap();
    assert!(!svg.contains("<circle"));
    // The capture run ends next to the origin of the (rho, zeta) plane.
    let csv = fs::read_to_string(out.join("portrait.csv")).unwrap();
    let rho: f64 = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(rho < 1e-8);
}

#[test]
fn verify_filters_and_detects_injected_fault() {
    let o = pursuit(&["verify", "--case", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("[PASS] case 1") && !text.contains("case 2"));
    let o = pursuit(&["verify", "--case", "1", "--fault-bound-scale", "0.1"]);
    assert_eq!(o.status.code(), Some(3));
}

fn finite(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    lo..hi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_idempotent(
        a in finite(0.1, 5.0),
        ratio in finite(0.1, 1.0),
        n in finite(0.05, 3.0),
        phi0 in finite(-10.0, 10.0),
        sep in finite(-3.0, 3.0),
        use_mu in any::<bool>(),
        span in finite(0.01, 100.0),
        f in 0usize..5,
    ) {
        let b = if Formulation::ALL[f] == Formulation::PolarT { a } else { a * ratio };
        let sep_line = if use_mu { format!("mu0 = {sep}") } else { format!("rho0 = {}", sep.exp()) };
        let text = format!(
            "a = {a}\nb = {b}\nn = {n}\nphi0 = {phi0}\n{sep_line}\nspan = {span}\nformulation = {}\n",
            Formulation::ALL[f]
        );
        let once = parse(&text).unwrap().canonicalize();
        let twice = parse(&once).unwrap().canonicalize();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(parse(&once).unwrap(), parse(&text).unwrap());
    }
}
