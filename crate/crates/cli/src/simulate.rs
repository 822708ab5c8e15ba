//! Running a scenario and exporting its trajectory.

use crate::config::{Formulation, Scenario};
use pursuit_core::analysis::{
    blowup_lower_bound, blowup_upper_bound, certified_blowup_upper_bound,
};
use pursuit_core::dynamics::{
    cartesian_to_reduced, reconstruct_pursuer, CartesianPair, DynamicsError, TangentAnglePath,
};
use pursuit_core::flow::{
    circular_time_flow, complex_flow, logpolar_flow, polar_flow, pursuit_flow,
};
use pursuit_core::integrate::{IntegrateError, Outcome, Solution, Stats, Trajectory};
use pursuit_core::{ComplexState, LogPolarState, Point, PolarState};
use std::fmt::Write as _;
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulateError {
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error("cannot sample trajectory: {0}")]
    Dynamics(#[from] DynamicsError),
}

/// Number of equal intervals in the fixed `φ` grid of the CSV export.
pub const GRID_INTERVALS: usize = 1024;

pub const CSV_HEADER: &str = "phi,t,mu,zeta,rho,x,y,X,Y";

/// One exported sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub phi: f64,
    pub t: f64,
    pub mu: f64,
    pub zeta: f64,
    pub rho: f64,
    pub pursuer: Point,
    pub evader: Point,
}

/// How a run ended, with the independent variable expressed as `φ`.
#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Completed,
    Captured { phi_cross: f64, phi_blowup: f64 },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub rows: Vec<Row>,
    pub outcome: RunOutcome,
    pub stats: Stats,
    /// `φ` at every accepted step.
    pub nodes: Vec<f64>,
}

impl RunResult {
    pub fn last(&self) -> &Row {
        self.rows
            .last()
            .expect("a run has at least its initial row")
    }
}

/// Reduced state `(μ, ζ, pursuer)` at one `φ`, with `ζ` kept near `zeta_ref`.
type Sampler<'a> = Box<dyn Fn(f64, f64) -> Result<(f64, f64, Point), SimulateError> + 'a>;

fn outcome_in_phi<const N: usize>(outcome: &Outcome<N>, to_phi: impl Fn(f64) -> f64) -> RunOutcome {
    match outcome {
        Outcome::Completed(_) => RunOutcome::Completed,
        Outcome::Captured(e) => RunOutcome::Captured {
            phi_cross: to_phi(e.s_cross),
            phi_blowup: to_phi(e.s_blowup),
        },
        Outcome::Failed(msg) => RunOutcome::Failed(msg.clone()),
    }
}

/// Integrate `scenario` and sample it on the export grid.
pub fn run(scenario: &Scenario) -> Result<RunResult, SimulateError> {
    let g = scenario.geometry();
    let (n, cfg) = (scenario.n, &scenario.integrator);
    let phi0 = scenario.phi0;
    let span = (phi0, scenario.phi_end());

    let pursuer_of = move |mu: f64, zeta: f64, phi: f64| {
        reconstruct_pursuer(PolarState::new(mu.exp(), zeta), phi, &g)
    };
    let solution: Solution<2>;
    let sampler: Sampler;
    let to_phi: Box<dyn Fn(f64) -> f64>;

    match scenario.formulation {
        Formulation::LogPolarPhi => {
            solution = logpolar_flow(&g, n, scenario.initial_log_polar(), span, cfg)?;
            let traj = solution.trajectory.clone();
            sampler = Box::new(move |phi, _| {
                let [mu, zeta] = traj.dense_eval(phi)?;
                Ok((mu, zeta, pursuer_of(mu, zeta, phi)))
            });
            to_phi = Box::new(|s| s);
        }
        Formulation::PolarPhi => {
            solution = polar_flow(&g, n, scenario.initial_polar(), span, cfg)?;
            let traj = solution.trajectory.clone();
            sampler = Box::new(move |phi, _| {
                let [rho, zeta] = traj.dense_eval(phi)?;
                Ok((
                    rho.ln(),
                    zeta,
                    reconstruct_pursuer(PolarState::new(rho, zeta), phi, &g),
                ))
            });
            to_phi = Box::new(|s| s);
        }
        Formulation::PolarT => {
            let a = scenario.a;
            let t_span = (0.0, a * scenario.span);
            solution = circular_time_flow(a, n, scenario.initial_polar(), t_span, cfg)?;
            let traj = solution.trajectory.clone();
            sampler = Box::new(move |phi, _| {
                let t = ((phi - phi0) * a).clamp(traj.start(), traj.end());
                let [rho, zeta] = traj.dense_eval(t)?;
                Ok((
                    rho.ln(),
                    zeta,
                    reconstruct_pursuer(PolarState::new(rho, zeta), phi, &g),
                ))
            });
            to_phi = Box::new(move |t| phi0 + t / a);
        }
        Formulation::ComplexPhi => {
            let z0 = scenario.initial_log_polar().to_complex();
            solution = complex_flow(&g, n, z0, span, cfg)?;
            let traj = solution.trajectory.clone();
            sampler = Box::new(move |phi, zeta_ref| {
                let z = ComplexState::from_array(traj.dense_eval(phi)?);
                let LogPolarState { mu, zeta } = z.to_log_polar_near(zeta_ref)?;
                Ok((mu, zeta, pursuer_of(mu, zeta, phi)))
            });
            to_phi = Box::new(|s| s);
        }
        Formulation::Cartesian => {
            let p0 = reconstruct_pursuer(scenario.initial_polar(), phi0, &g);
            let path = TangentAnglePath(g);
            solution = pursuit_flow(&path, n, p0, span, cfg, true)?;
            let traj: Trajectory<2> = solution.trajectory.clone();
            sampler = Box::new(move |phi, zeta_ref| {
                let [x, y] = traj.dense_eval(phi)?;
                let pair = CartesianPair {
                    evader: g.evader_position(phi),
                    pursuer: Point::new(x, y),
                };
                let s = cartesian_to_reduced(&pair, phi, zeta_ref)?;
                Ok((s.rho.ln(), s.zeta, pair.pursuer))
            });
            to_phi = Box::new(|s| s);
        }
    }

    let nodes: Vec<f64> = solution
        .trajectory
        .nodes()
        .iter()
        .map(|(s, _)| to_phi(*s))
        .collect();
    let phi_last = *nodes.last().unwrap();
    let mut grid: Vec<f64> = (0..=GRID_INTERVALS)
        .map(|k| phi0 + scenario.span * k as f64 / GRID_INTERVALS as f64)
        .filter(|&phi| phi <= phi_last)
        .chain(nodes.iter().copied())
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut rows = Vec::with_capacity(grid.len());
    let (mut t, mut prev_phi, mut zeta_ref) = (0.0, phi0, scenario.zeta0);
    for phi in grid {
        let (mu, zeta, pursuer) = sampler(phi, zeta_ref)?;
        t += if scenario.formulation == Formulation::PolarT {
            scenario.a * (phi - prev_phi)
        } else {
            g.t_of_phi(prev_phi, phi)
        };
        rows.push(Row {
            phi,
            t,
            mu,
            zeta,
            rho: mu.exp(),
            pursuer,
            evader: g.evader_position(phi),
        });
        prev_phi = phi;
        zeta_ref = zeta;
    }

    Ok(RunResult {
        rows,
        outcome: outcome_in_phi(&solution.outcome, to_phi),
        stats: solution.stats,
        nodes,
    })
}

pub fn write_csv<W: Write>(out: &mut W, rows: &[Row]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.phi, r.t, r.mu, r.zeta, r.rho, r.pursuer.x, r.pursuer.y, r.evader.x, r.evader.y
        )?;
    }
    Ok(())
}

/// Plain-text `key = value` summary of a run.
pub fn summary(scenario: &Scenario, result: &RunResult, csv_path: &str) -> String {
    let g = scenario.geometry();
    let mut s = String::new();
    let last = result.last();
    let _ = writeln!(s, "digest = {}", scenario.digest());
    let _ = writeln!(s, "trajectory = {csv_path}");
    let _ = writeln!(s, "formulation = {}", scenario.formulation);
    match &result.outcome {
        RunOutcome::Completed => {
            let _ = writeln!(s, "outcome = completed");
        }
        RunOutcome::Captured {
            phi_cross,
            phi_blowup,
        } => {
            let _ = writeln!(s, "outcome = captured");
            let _ = writeln!(s, "phi_cross = {phi_cross:.12}");
            let _ = writeln!(s, "phi_blowup = {phi_blowup:.12}");
            let _ = writeln!(s, "capture_span = {:.12}", phi_blowup - scenario.phi0);
            let _ = writeln!(
                s,
                "t_blowup = {:.12}",
                g.t_of_phi(scenario.phi0, *phi_blowup)
            );
        }
        RunOutcome::Failed(msg) => {
            let _ = writeln!(s, "outcome = failed");
            let _ = writeln!(s, "reason = {msg}");
        }
    }
    let _ = writeln!(s, "final_phi = {:.12}", last.phi);
    let _ = writeln!(s, "final_rho = {:.12e}", last.rho);
    let _ = writeln!(s, "final_zeta = {:.12}", last.zeta);
    if scenario.n > 1.0 {
        let mu0 = scenario.separation.mu();
        let bound = |r: Result<f64, _>| r.map(|v: f64| v - scenario.phi0).unwrap_or(f64::NAN);
        let _ = writeln!(
            s,
            "bound_upper_span = {:.12}",
            bound(blowup_upper_bound(&g, scenario.n, mu0, scenario.phi0))
        );
        let _ = writeln!(
            s,
            "bound_certified_span = {:.12}",
            bound(certified_blowup_upper_bound(
                &g,
                scenario.n,
                mu0,
                scenario.phi0
            ))
        );
        let _ = writeln!(
            s,
            "bound_lower_span = {:.12}",
            blowup_lower_bound(&g, scenario.n, mu0)
        );
    }
    let _ = writeln!(s, "accepted_steps = {}", result.stats.accepted);
    let _ = writeln!(s, "rejected_steps = {}", result.stats.rejected);
    let _ = writeln!(s, "rhs_evals = {}", result.stats.rhs_evals);
    s
}
