//! Subcommand implementations, independent of argument parsing.

use crate::config::{self, ConfigError, Scenario};
use crate::simulate::{self, RunOutcome};
use crate::svg::Portrait;
use crate::verify::{self, CaseReport, VerifyOptions};
use pursuit_core::analysis::{
    annulus_bounds, equilibrium_circular, find_periodic_orbit, measure_capture,
    measured_inner_radius, orbit_samples, AnalysisError, OrbitConfig,
};
use pursuit_core::dynamics::reconstruct_pursuer;
use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{failed} of {total} verification cases failed")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    /// 1 usage/config, 2 numerical failure, 3 verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification { .. } => 3,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(config::parse(&text)?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn analysis_error(e: AnalysisError) -> CliError {
    match e {
        AnalysisError::InvalidRegime(m) => CliError::Usage(m),
        AnalysisError::NoEquilibrium { n } => {
            CliError::Usage(format!("no equilibrium for n = {n}"))
        }
        other => CliError::Numerical(other.to_string()),
    }
}

/// Writes `trajectory.csv` and `summary.txt` into `out`; returns the summary.
pub fn simulate(scenario: &Scenario, out: &Path) -> Result<String, CliError> {
    ensure_dir(out)?;
    let result = simulate::run(scenario).map_err(|e| CliError::Numerical(e.to_string()))?;
    let csv = out.join("trajectory.csv");
    let file = fs::File::create(&csv).map_err(io_err(&csv))?;
    simulate::write_csv(&mut BufWriter::new(file), &result.rows).map_err(io_err(&csv))?;
    let text = simulate::summary(scenario, &result, "trajectory.csv");
    write_file(&out.join("summary.txt"), &text)?;
    if let RunOutcome::Failed(msg) = &result.outcome {
        return Err(CliError::Numerical(msg.clone()));
    }
    Ok(text)
}

/// Writes `portrait.csv` (`phi,rho,zeta,mu`) and `portrait.svg` into `out`.
pub fn portrait(scenario: &Scenario, out: &Path) -> Result<String, CliError> {
    ensure_dir(out)?;
    let result = simulate::run(scenario).map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut csv = String::from("phi,rho,zeta,mu\n");
    for r in &result.rows {
        let _ = writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            r.phi, r.rho, r.zeta, r.mu
        );
    }
    write_file(&out.join("portrait.csv"), &csv)?;

    let marker = if scenario.a == scenario.b && scenario.n > 0.0 && scenario.n <= 1.0 {
        equilibrium_circular(scenario.a, scenario.n)
            .ok()
            .map(|e| (e.rho, e.zeta))
    } else {
        None
    };
    let plot = Portrait {
        title: format!("a = {}, b = {}, n = {}", scenario.a, scenario.b, scenario.n),
        x_label: "rho".into(),
        y_label: "zeta".into(),
        points: result.rows.iter().map(|r| (r.rho, r.zeta)).collect(),
        marker,
    };
    write_file(&out.join("portrait.svg"), &plot.to_svg())?;
    if let RunOutcome::Failed(msg) = &result.outcome {
        return Err(CliError::Numerical(msg.clone()));
    }
    Ok(format!(
        "wrote {} samples to {}\n",
        result.rows.len(),
        out.display()
    ))
}

/// Periodic orbit reached from the scenario's initial state.
pub fn orbit(scenario: &Scenario, out: Option<&Path>) -> Result<String, CliError> {
    if !(scenario.n > 0.0 && scenario.n < 1.0) {
        return Err(CliError::Usage(format!(
            "orbit requires 0 < n < 1, got n = {}",
            scenario.n
        )));
    }
    let g = scenario.geometry();
    let cfg = OrbitConfig {
        integrator: scenario.integrator,
        ..OrbitConfig::default()
    };
    let seed = scenario.initial_log_polar().to_complex();
    let res =
        find_periodic_orbit(&g, scenario.n, scenario.phi0, seed, &cfg).map_err(analysis_error)?;
    let z = res.fixed_point;
    let r_measured = measured_inner_radius(z, scenario.phi0, &g, scenario.n, &cfg.integrator)
        .map_err(analysis_error)?;
    let p0 = reconstruct_pursuer(scenario.initial_polar(), scenario.phi0, &g);
    let bounds = annulus_bounds(p0, &g).with_measured(r_measured);
    let samples = orbit_samples(z, scenario.phi0, &g, scenario.n, 361, &cfg.integrator)
        .map_err(analysis_error)?;

    let mut s = String::new();
    let _ = writeln!(s, "digest = {}", scenario.digest());
    let _ = writeln!(s, "phi0 = {:.12}", scenario.phi0);
    let _ = writeln!(s, "z_star = {:.12} {:+.12}i", z.z.re, z.z.im);
    let _ = writeln!(s, "rho_star = {:.12}", z.rho());
    let _ = writeln!(s, "zeta_star = {:.12}", z.z.arg());
    let _ = writeln!(s, "residual = {:.3e}", res.residual);
    let _ = writeln!(s, "iterations = {}", res.iterates.len() - 1);
    let _ = writeln!(s, "r_measured = {r_measured:.12} (empirical)");
    let _ = writeln!(s, "R0 = {:.12}", bounds.r0);
    let _ = writeln!(s, "N_prime = {:.12}", bounds.n_prime);
    if let Some(dir) = out {
        ensure_dir(dir)?;
        let mut csv = String::from("phi,re,im,rho\n");
        for (phi, z) in &samples {
            let _ = writeln!(
                csv,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                phi,
                z.z.re,
                z.z.im,
                z.rho()
            );
        }
        write_file(&dir.join("orbit.csv"), &csv)?;
        write_file(&dir.join("orbit.txt"), &s)?;
    }
    Ok(s)
}

/// Capture bounds and the measured blow-up angle.
pub fn capture(scenario: &Scenario) -> Result<String, CliError> {
    if scenario.n <= 1.0 {
        return Err(CliError::Usage(format!(
            "capture requires n > 1, got n = {}",
            scenario.n
        )));
    }
    let g = scenario.geometry();
    let rep = measure_capture(
        &g,
        scenario.n,
        scenario.initial_log_polar(),
        scenario.phi0,
        &scenario.integrator,
    )
    .map_err(analysis_error)?;
    let mut s = String::new();
    let _ = writeln!(s, "digest = {}", scenario.digest());
    let _ = writeln!(s, "phi0 = {:.12}", rep.phi0);
    let _ = writeln!(s, "phi_blowup = {:.12}", rep.phi_b_measured);
    let _ = writeln!(s, "capture_span = {:.12}", rep.measured_span());
    let _ = writeln!(
        s,
        "t_blowup = {:.12}",
        g.t_of_phi(rep.phi0, rep.phi_b_measured)
    );
    let _ = writeln!(s, "lower_bound_span = {:.12}", rep.lower_bound);
    let _ = writeln!(s, "upper_bound_span = {:.12}", rep.upper_bound - rep.phi0);
    let _ = writeln!(
        s,
        "certified_bound_span = {:.12}",
        rep.certified_upper_bound - rep.phi0
    );
    Ok(s)
}

/// Run the selected verification cases; each case writes `case-N.txt` under `out`.
pub fn verify(
    cases: &[u32],
    opts: &VerifyOptions,
    out: Option<&Path>,
) -> Result<(String, Vec<CaseReport>), CliError> {
    if let Some(bad) = cases.iter().find(|id| !verify::CASES.contains(id)) {
        return Err(CliError::Usage(format!(
            "no verification case {bad} (expected 1-8)"
        )));
    }
    let reports = verify::run_cases(cases, opts);
    let mut s = String::new();
    for r in &reports {
        s.push_str(&r.render());
        if let Some(dir) = out {
            ensure_dir(dir)?;
            write_file(&dir.join(format!("case-{}.txt", r.id)), &r.render())?;
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let _ = writeln!(s, "{} passed, {failed} failed", reports.len() - failed);
    Ok((s, reports))
}
