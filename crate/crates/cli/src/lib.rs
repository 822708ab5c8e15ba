//! Command-line front end for pure-pursuit simulations.
//!
//! The binary `pursuit` exposes `simulate`, `portrait`, `orbit`, `capture`
//! and `verify`. Everything it does is available here as a library so the
//! integration tests can call it directly.

pub mod commands;
pub mod config;
pub mod simulate;
pub mod svg;
pub mod verify;

pub use commands::CliError;
pub use config::{Formulation, Scenario, Separation};
