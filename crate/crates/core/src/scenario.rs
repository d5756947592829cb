//! TOML scenario files for the command-line front end.
//!
//! ```toml
//! [system]
//! dim = 2
//! lagrangian = "0.5*m*(v1^2+v2^2) - m*g*x2"
//! rho = ["gamma_h*v1", "gamma_v*v2"]
//! [system.params]
//! m = 2.0
//!
//! [simulation]
//! t0 = 0.0
//! t1 = 5.0
//! dt = 0.001
//! picture = "lagrangian"      # or "hamiltonian"
//!
//! [initial]
//! x = [0.0, 0.0]
//! v = [10.0, 0.0]             # or p = [...], not both
//!
//! [forces]
//! zeta = ["0", "0"]           # expressions in t
//!
//! [desired]
//! x = ["10*t", "0"]           # used by `engine invert`
//!
//! [output]
//! path = "out.csv"
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bundle::{Covector, TangentVector};
use crate::expr::{parse, Expr, Params, Scope};
use crate::integrator::{time_grid, ForceSchedule};
use crate::system::LagrangianSystem;

/// A scenario that could not be read or is inconsistent. `field` is the
/// dotted key the problem was found at, when one applies.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: Some(field.into()), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            Some(field) => write!(f, "{field}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    #[default]
    Lagrangian,
    Hamiltonian,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub dim: usize,
    pub lagrangian: String,
    #[serde(default)]
    pub rho: Vec<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    #[serde(default)]
    pub picture: Picture,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub x: Vec<f64>,
    pub v: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcesSection {
    pub zeta: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesiredSection {
    pub x: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: PathBuf,
}

/// Raw scenario as written in the file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub system: SystemSection,
    pub simulation: Option<SimulationSection>,
    pub initial: Option<InitialSection>,
    pub forces: Option<ForcesSection>,
    pub desired: Option<DesiredSection>,
    pub output: Option<OutputSection>,
}

/// Initial state in either picture.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Velocity(TangentVector),
    Momentum(Covector),
}

/// Validated input for `engine simulate`.
#[derive(Debug, Clone)]
pub struct SimulationPlan {
    pub system: LagrangianSystem,
    pub schedule: ForceSchedule,
    pub initial: InitialState,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub picture: Picture,
    pub output: Option<PathBuf>,
}

/// Validated input for `engine invert`.
#[derive(Debug, Clone)]
pub struct InversionPlan {
    pub system: LagrangianSystem,
    pub path: Vec<Expr>,
    pub params: Params,
    pub times: Vec<f64>,
    pub output: Option<PathBuf>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let span = e.span().map(|s| format!(" (at byte {})", s.start)).unwrap_or_default();
            ConfigError { field: None, message: format!("{message}{span}") }
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { field: None, message: format!("cannot read {}: {e}", path.display()) })?;
        Self::from_toml(&text)
    }

    fn params(&self) -> Params {
        self.system.params.clone()
    }

    pub fn system(&self) -> Result<LagrangianSystem, ConfigError> {
        let s = &self.system;
        if s.dim == 0 {
            return Err(ConfigError::at("system.dim", "must be at least 1"));
        }
        let scope = Scope::tangent(s.dim, s.params.keys().cloned());
        let lagrangian =
            parse(&s.lagrangian, &scope).map_err(|e| ConfigError::at("system.lagrangian", e.to_string()))?;
        if !s.rho.is_empty() && s.rho.len() != s.dim {
            return Err(ConfigError::at("system.rho", format!("has {} entries, expected {}", s.rho.len(), s.dim)));
        }
        let rho = s
            .rho
            .iter()
            .enumerate()
            .map(|(i, r)| parse(r, &scope).map_err(|e| ConfigError::at(format!("system.rho[{i}]"), e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        LagrangianSystem::new(s.dim, lagrangian, rho, self.params())
            .map_err(|e| ConfigError::at("system", e.to_string()))
    }

    fn simulation_section(&self) -> Result<&SimulationSection, ConfigError> {
        let sim = self.simulation.as_ref().ok_or_else(|| ConfigError::at("simulation", "section is missing"))?;
        if !sim.t0.is_finite() {
            return Err(ConfigError::at("simulation.t0", "must be finite"));
        }
        if !(sim.dt > 0.0) || !sim.dt.is_finite() {
            return Err(ConfigError::at("simulation.dt", format!("must be positive (got {})", sim.dt)));
        }
        if !(sim.t1 > sim.t0) || !sim.t1.is_finite() {
            return Err(ConfigError::at("simulation.t1", format!("must be greater than t0 (got {})", sim.t1)));
        }
        time_grid(sim.t0, sim.t1, sim.dt)
            .map_err(|_| ConfigError::at("simulation.dt", "(t1 - t0)/dt must be a whole number of steps"))?;
        Ok(sim)
    }

    fn list(field: &str, values: &[f64], dim: usize) -> Result<Vec<f64>, ConfigError> {
        if values.len() != dim {
            return Err(ConfigError::at(field, format!("has {} entries, expected {dim}", values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ConfigError::at(format!("{field}[{i}]"), "must be finite"));
        }
        Ok(values.to_vec())
    }

    fn time_exprs(&self, field: &str, texts: &[String], dim: usize) -> Result<Vec<Expr>, ConfigError> {
        if texts.len() != dim {
            return Err(ConfigError::at(field, format!("has {} entries, expected {dim}", texts.len())));
        }
        let scope = Scope::time(self.system.params.keys().cloned());
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| parse(t, &scope).map_err(|e| ConfigError::at(format!("{field}[{i}]"), e.to_string())))
            .collect()
    }

    pub fn simulation_plan(&self) -> Result<SimulationPlan, ConfigError> {
        let system = self.system()?;
        let dim = system.dim();
        let sim = self.simulation_section()?;
        let init = self.initial.as_ref().ok_or_else(|| ConfigError::at("initial", "section is missing"))?;
        let x = Self::list("initial.x", &init.x, dim)?;
        let initial = match (&init.v, &init.p) {
            (Some(v), None) => InitialState::Velocity(TangentVector { x, v: Self::list("initial.v", v, dim)? }),
            (None, Some(p)) => InitialState::Momentum(Covector { x, p: Self::list("initial.p", p, dim)? }),
            _ => return Err(ConfigError::at("initial", "give exactly one of `v` and `p`")),
        };
        let schedule = match &self.forces {
            Some(f) => ForceSchedule::new(self.time_exprs("forces.zeta", &f.zeta, dim)?, self.params())
                .map_err(|e| ConfigError::at("forces.zeta", e.to_string()))?,
            None => ForceSchedule::zero(dim),
        };
        Ok(SimulationPlan {
            system,
            schedule,
            initial,
            t0: sim.t0,
            t1: sim.t1,
            dt: sim.dt,
            picture: sim.picture,
            output: self.output.as_ref().map(|o| o.path.clone()),
        })
    }

    pub fn inversion_plan(&self) -> Result<InversionPlan, ConfigError> {
        let system = self.system()?;
        let sim = self.simulation_section()?;
        let desired = self.desired.as_ref().ok_or_else(|| ConfigError::at("desired", "section is missing"))?;
        let path = self.time_exprs("desired.x", &desired.x, system.dim())?;
        let times = time_grid(sim.t0, sim.t1, sim.dt).map_err(|e| ConfigError::at("simulation.dt", e.to_string()))?;
        Ok(InversionPlan {
            system,
            path,
            params: self.params(),
            times,
            output: self.output.as_ref().map(|o| o.path.clone()),
        })
    }
}

pub const AIRCRAFT_FREE: &str = include_str!("../scenarios/aircraft_free.toml");
pub const AIRCRAFT_STEADY: &str = include_str!("../scenarios/aircraft_steady.toml");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_validate() {
        let free = Scenario::from_toml(AIRCRAFT_FREE).unwrap().simulation_plan().unwrap();
        assert_eq!(free.picture, Picture::Lagrangian);
        assert_eq!((free.t0, free.t1, free.dt), (0.0, 5.0, 1e-3));
        let steady = Scenario::from_toml(AIRCRAFT_STEADY).unwrap();
        assert_eq!(steady.simulation_plan().unwrap().schedule.at(1.0).unwrap(), vec![5.0, 19.62]);
        assert!(steady.inversion_plan().is_ok());
    }

    fn with(replace: &str, by: &str) -> Result<SimulationPlan, ConfigError> {
        let text = AIRCRAFT_FREE.replace(replace, by);
        assert_ne!(text, AIRCRAFT_FREE, "fixture did not contain {replace:?}");
        Scenario::from_toml(&text)?.simulation_plan()
    }

    #[test]
    fn field_names_in_errors() {
        assert_eq!(with("dt = 0.001", "dt = -0.1").unwrap_err().field.as_deref(), Some("simulation.dt"));
        assert_eq!(with("dt = 0.001", "dt = 0.3").unwrap_err().field.as_deref(), Some("simulation.dt"));
        assert_eq!(with("x = [0.0, 0.0]", "x = [0.0]").unwrap_err().field.as_deref(), Some("initial.x"));
        assert_eq!(
            with("v = [10.0, 0.0]", "v = [10.0, 0.0]\np = [20.0, 0.0]").unwrap_err().field.as_deref(),
            Some("initial")
        );
        assert_eq!(with("- m*g*x2", "- m*g*x3").unwrap_err().field.as_deref(), Some("system.lagrangian"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = Scenario::from_toml(&AIRCRAFT_FREE.replace("[simulation]", "[simulation]\nsteps = 4")).unwrap_err();
        assert!(err.message.contains("steps"), "{err}");
    }
}
