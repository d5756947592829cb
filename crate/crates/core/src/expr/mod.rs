//! Expression language and exact second-order differentiation.
//!
//! Expressions are parsed once into an [`Expr`] tree and evaluated over
//! `f64` or [`HyperDual2`]. Gradients take one hyper-dual pass per slot;
//! Hessian blocks take one mixed pass per slot pair.

mod ast;
mod diff;
mod eval;
mod hyperdual;
mod parse;

pub use ast::{BinOp, Expr, Func, Var};
pub use eval::{EvalPoint, Params, TangentJet, TimeJet};
pub use hyperdual::{HyperDual2, Scalar};
pub use parse::{parse, Scope};
