//! Pure pursuit of an evader running around a circle or an ellipse.
//!
//! * [`geometry`]: the evader's path, its angular rate and time/angle conversion.
//! * [`dynamics`]: state representations and every form of the pursuit vector field.
//! * [`integrate`]: adaptive Dormand–Prince integration with capture detection.
//! * [`flow`]: each formulation bound to the integrator with its capture monitor.
//! * [`analysis`]: equilibria, capture-time bounds, Poincaré map and contraction checks.

// Negated comparisons are used on purpose so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod flow;
pub mod geometry;
pub mod integrate;

pub use dynamics::{CartesianPair, ComplexState, LogPolarState, PolarState};
pub use geometry::{EllipseGeometry, Point};
pub use integrate::{IntegratorConfig, Outcome, Trajectory};
