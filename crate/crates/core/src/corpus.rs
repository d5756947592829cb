//! Reference systems used by the checks, the CLI and the tests.

use crate::expr::Params;
use crate::system::LagrangianSystem;

fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Aircraft flying under gravity with separate horizontal and vertical drag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aircraft {
    pub m: f64,
    pub g: f64,
    pub gamma_h: f64,
    pub gamma_v: f64,
    pub v0: f64,
    pub t_final: f64,
}

impl Default for Aircraft {
    fn default() -> Self {
        Self { m: 2.0, g: 9.81, gamma_h: 0.5, gamma_v: 0.8, v0: 10.0, t_final: 5.0 }
    }
}

impl Aircraft {
    pub const LAGRANGIAN: &'static str = "0.5*m*(v1^2+v2^2) - m*g*x2";
    pub const RHO: [&'static str; 2] = ["gamma_h*v1", "gamma_v*v2"];

    pub fn params(&self) -> Params {
        params(&[("m", self.m), ("g", self.g), ("gamma_h", self.gamma_h), ("gamma_v", self.gamma_v)])
    }

    pub fn system(&self) -> LagrangianSystem {
        LagrangianSystem::parse(2, Self::LAGRANGIAN, &Self::RHO, self.params()).expect("aircraft system is well formed")
    }

    /// Unforced flight from the origin with horizontal speed `v0`.
    pub fn free_position(&self, t: f64) -> [f64; 2] {
        let Self { m, g, gamma_h: gh, gamma_v: gv, v0, .. } = *self;
        [
            m * v0 / gh * (1.0 - (-gh * t / m).exp()),
            m * m * g / (gv * gv) * (1.0 - (-gv * t / m).exp()) - m * g / gv * t,
        ]
    }

    pub fn free_momentum(&self, t: f64) -> [f64; 2] {
        let Self { m, g, gamma_h: gh, gamma_v: gv, v0, .. } = *self;
        [m * v0 * (-gh * t / m).exp(), -(m * m * g / gv) * (1.0 - (-gv * t / m).exp())]
    }

    /// Force that keeps the aircraft level at speed `v0`.
    pub fn steady_force(&self) -> [f64; 2] {
        [self.gamma_h * self.v0, self.m * self.g]
    }
}

pub fn aircraft() -> LagrangianSystem {
    Aircraft::default().system()
}

pub fn free_particle() -> LagrangianSystem {
    LagrangianSystem::parse(2, "0.5*m*(v1^2+v2^2)", &[], params(&[("m", 1.5)])).expect("well formed")
}

pub fn damped_oscillator() -> LagrangianSystem {
    LagrangianSystem::parse(1, "0.5*m*v1^2 - 0.5*k*x1^2", &["c*v1"], params(&[("m", 1.0), ("k", 4.0), ("c", 0.3)]))
        .expect("well formed")
}

pub fn harmonic_oscillator() -> LagrangianSystem {
    LagrangianSystem::parse(1, "0.5*m*v1^2 - 0.5*k*x1^2", &[], params(&[("m", 1.0), ("k", 1.0)])).expect("well formed")
}

pub fn pendulum() -> LagrangianSystem {
    LagrangianSystem::parse(1, "0.5*m*l^2*v1^2 + m*g*l*cos(x1)", &[], params(&[("m", 1.0), ("l", 1.0), ("g", 9.81)]))
        .expect("well formed")
}

/// Charged particle in a uniform magnetic field.
pub fn magnetic() -> LagrangianSystem {
    LagrangianSystem::parse(
        2,
        "0.5*m*(v1^2+v2^2) + 0.5*b*(x1*v2 - x2*v1)",
        &["c*v1", "c*v2"],
        params(&[("m", 1.0), ("b", 0.7), ("c", 0.1)]),
    )
    .expect("well formed")
}

/// Kinetic energy with a quartic stiffening term; Legendre map is nonlinear.
pub fn quartic_kinetic() -> LagrangianSystem {
    LagrangianSystem::parse(1, "0.5*v1^2 + 0.25*eps*v1^4 - 0.5*x1^2", &["0.2*v1"], params(&[("eps", 0.5)]))
        .expect("well formed")
}

/// The four systems every identity is checked on.
pub fn standard() -> Vec<(&'static str, LagrangianSystem)> {
    vec![
        ("aircraft", aircraft()),
        ("free particle", free_particle()),
        ("damped oscillator", damped_oscillator()),
        ("pendulum", pendulum()),
    ]
}

/// [`standard`] plus systems with velocity-dependent mass or coupling.
pub fn extended() -> Vec<(&'static str, LagrangianSystem)> {
    let mut all = standard();
    all.push(("magnetic", magnetic()));
    all.push(("quartic kinetic", quartic_kinetic()));
    all
}

/// Expressions in `x1, x2, v1, v2` exercising every operator and function.
pub const EXPRESSIONS: [&str; 12] = [
    "0.5*(v1^2+v2^2) - 9.81*x2",
    "x1*v2 - x2*v1",
    "sin(x1)*cos(v2) + exp(0.3*v1)",
    "ln(2 + x1^2)*v1^3",
    "sqrt(1 + v1^2 + v2^2)",
    "(x1 - v1)/(3 + x2^2)",
    "v1^4 - 2*x1*v1*v2 + (1 + x2^2)^-2",
    "exp(-x1^2)*sin(v1*v2)",
    "cos(x1 + x2)^2 * v1 - -v2",
    "(1 + x1^2)^1.5 * v2^2",
    "2^3 * x1 * v1 / (1 + v2^2)",
    "sqrt(4 + x1*x2)*ln(3 + v1^2)",
];
