//! Scenario files.
//!
//! A scenario is flat `key = value` text, one pair per line. Blank lines and
//! lines starting with `#` are ignored. Numeric values accept plain floats and
//! simple multiples of `pi` such as `pi/2`, `-pi/2`, `10*pi` or `3pi/4`.
//!
//! ```text
//! a = 1
//! b = 0.5
//! n = 1.2
//! mu0 = 0
//! span = 2*pi
//! ```

use pursuit_core::dynamics::LogPolarState;
use pursuit_core::geometry::EllipseGeometry;
use pursuit_core::integrate::IntegratorConfig;
use pursuit_core::PolarState;
use sha2::{Digest, Sha256};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub const KEYS: [&str; 12] = [
    "a",
    "b",
    "n",
    "phi0",
    "mu0",
    "rho0",
    "zeta0",
    "span",
    "rel_tol",
    "abs_tol",
    "mu_min",
    "formulation",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key {key:?} given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("key {key:?}: cannot parse {value:?}")]
    BadValue { key: String, value: String },
    #[error("missing required key {0:?}")]
    Missing(&'static str),
    #[error("exactly one of mu0 and rho0 must be given")]
    Separation,
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// State representation used to integrate a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Pursuer position in the plane, chasing the evader parametrized by `φ`.
    Cartesian,
    /// `(ρ, ζ)` in evader time; circles only.
    PolarT,
    PolarPhi,
    LogPolarPhi,
    ComplexPhi,
}

impl Formulation {
    pub const ALL: [Formulation; 5] = [
        Formulation::Cartesian,
        Formulation::PolarT,
        Formulation::PolarPhi,
        Formulation::LogPolarPhi,
        Formulation::ComplexPhi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formulation::Cartesian => "cartesian",
            Formulation::PolarT => "polar-t",
            Formulation::PolarPhi => "polar-phi",
            Formulation::LogPolarPhi => "logpolar-phi",
            Formulation::ComplexPhi => "complex-phi",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formulation {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Formulation::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or(())
    }
}

/// Initial separation, given either directly or as its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Separation {
    Rho(f64),
    Mu(f64),
}

impl Separation {
    pub fn mu(self) -> f64 {
        match self {
            Separation::Rho(r) => r.ln(),
            Separation::Mu(m) => m,
        }
    }

    pub fn rho(self) -> f64 {
        match self {
            Separation::Rho(r) => r,
            Separation::Mu(m) => m.exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub a: f64,
    pub b: f64,
    pub n: f64,
    pub phi0: f64,
    pub separation: Separation,
    pub zeta0: f64,
    /// Length of the `φ` interval to integrate over.
    pub span: f64,
    pub integrator: IntegratorConfig,
    pub formulation: Formulation,
}

impl Scenario {
    /// Scenario with the usual defaults: start at `φ = π/2`, `ζ = π/2`.
    pub fn new(a: f64, b: f64, n: f64, separation: Separation, span: f64) -> Self {
        Self {
            a,
            b,
            n,
            phi0: FRAC_PI_2,
            separation,
            zeta0: FRAC_PI_2,
            span,
            integrator: IntegratorConfig::default(),
            formulation: Formulation::LogPolarPhi,
        }
    }

    pub fn geometry(&self) -> EllipseGeometry {
        EllipseGeometry::new(self.a, self.b).expect("validated scenario")
    }

    pub fn initial_log_polar(&self) -> LogPolarState {
        LogPolarState::new(self.separation.mu(), self.zeta0)
    }

    pub fn initial_polar(&self) -> PolarState {
        PolarState::new(self.separation.rho(), self.zeta0)
    }

    pub fn phi_end(&self) -> f64 {
        self.phi0 + self.span
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        EllipseGeometry::new(self.a, self.b).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(self.n.is_finite() && self.n > 0.0) {
            return invalid(format!("speed ratio must be positive, got {}", self.n));
        }
        if !(self.span.is_finite() && self.span > 0.0) {
            return invalid(format!("span must be positive, got {}", self.span));
        }
        if !(self.phi0.is_finite() && self.zeta0.is_finite()) {
            return invalid("phi0 and zeta0 must be finite".into());
        }
        match self.separation {
            Separation::Rho(r) if !(r.is_finite() && r > 0.0) => {
                return invalid(format!("rho0 must be positive, got {r}"))
            }
            Separation::Mu(m) if !m.is_finite() => {
                return invalid(format!("mu0 must be finite, got {m}"))
            }
            _ => {}
        }
        self.integrator
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.formulation == Formulation::PolarT && self.a != self.b {
            return invalid("polar-t applies to circles only (a = b)".into());
        }
        Ok(())
    }

    /// Canonical text: every key in fixed order, shortest round-trip floats.
    pub fn canonicalize(&self) -> String {
        let sep = match self.separation {
            Separation::Mu(m) => format!("mu0 = {m:?}\n"),
            Separation::Rho(r) => format!("rho0 = {r:?}\n"),
        };
        format!(
            "a = {:?}\nb = {:?}\nn = {:?}\nphi0 = {:?}\n{sep}zeta0 = {:?}\nspan = {:?}\nrel_tol = {:?}\nabs_tol = {:?}\nmu_min = {:?}\nformulation = {}\n",
            self.a,
            self.b,
            self.n,
            self.phi0,
            self.zeta0,
            self.span,
            self.integrator.rel_tol,
            self.integrator.abs_tol,
            self.integrator.mu_min,
            self.formulation,
        )
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonicalize().as_bytes()))
    }
}

/// Parse `[-]factor[*factor...][/divisor]` where a factor is a float or `pi`.
pub fn parse_value(raw: &str) -> Option<f64> {
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let (body, sign) = match s.strip_prefix('-') {
        Some(rest) => (rest, -1.0),
        None => (s.as_str(), 1.0),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().ok()?),
        None => (body, 1.0),
    };
    let mut product = 1.0;
    for factor in num.split('*') {
        product *= if factor == "pi" {
            PI
        } else if let Some(coef) = factor.strip_suffix("pi") {
            coef.parse::<f64>().ok()? * PI
        } else {
            factor.parse::<f64>().ok()?
        };
    }
    Some(sign * product / den)
}

pub fn parse(text: &str) -> Result<Scenario, ConfigError> {
    let mut values: [Option<String>; 12] = Default::default();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: line_no,
                text: trimmed.to_string(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(slot) = KEYS.iter().position(|k| *k == key) else {
            return Err(ConfigError::UnknownKey {
                line: line_no,
                key: key.to_string(),
            });
        };
        if values[slot].is_some() {
            return Err(ConfigError::DuplicateKey {
                line: line_no,
                key: key.to_string(),
            });
        }
        values[slot] = Some(value.to_string());
    }

    let raw = |key: &str| values[KEYS.iter().position(|k| *k == key).unwrap()].as_deref();
    let number = |key: &'static str| -> Result<Option<f64>, ConfigError> {
        raw(key)
            .map(|v| {
                parse_value(v).ok_or_else(|| ConfigError::BadValue {
                    key: key.into(),
                    value: v.into(),
                })
            })
            .transpose()
    };
    let required = |key: &'static str| number(key)?.ok_or(ConfigError::Missing(key));

    let a = required("a")?;
    let separation = match (number("mu0")?, number("rho0")?) {
        (Some(m), None) => Separation::Mu(m),
        (None, Some(r)) => Separation::Rho(r),
        _ => return Err(ConfigError::Separation),
    };
    let defaults = IntegratorConfig::default();
    let formulation = match raw("formulation") {
        None => Formulation::LogPolarPhi,
        Some(v) => v.parse().map_err(|_| ConfigError::BadValue {
            key: "formulation".into(),
            value: v.into(),
        })?,
    };
    let scenario = Scenario {
        a,
        b: number("b")?.unwrap_or(a),
        n: required("n")?,
        phi0: number("phi0")?.unwrap_or(FRAC_PI_2),
        separation,
        zeta0: number("zeta0")?.unwrap_or(FRAC_PI_2),
        span: required("span")?,
        integrator: IntegratorConfig {
            rel_tol: number("rel_tol")?.unwrap_or(defaults.rel_tol),
            abs_tol: number("abs_tol")?.unwrap_or(defaults.abs_tol),
            mu_min: number("mu_min")?.unwrap_or(defaults.mu_min),
            ..defaults
        },
        formulation,
    };
    scenario.validate()?;
    Ok(scenario)
}
