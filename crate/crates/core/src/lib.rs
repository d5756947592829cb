//! Mechanics with external forces.
//!
//! The same forced dynamics is available in four equivalent forms: a
//! variational principle with boundary momenta, Euler–Lagrange equations,
//! forced Hamilton equations, and a Poisson-bracket evolution law. The
//! canonical maps between the iterated tangent and cotangent bundles that
//! relate them live in [`bundle`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod checks;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod hamiltonian;
pub mod integrator;
pub mod lagrangian;
pub mod linalg;
pub mod poisson;
pub mod scenario;
pub mod system;
pub mod variational;

pub use error::{Error, ExprError, Result};
pub use system::LagrangianSystem;
