//! Canonical Poisson bracket on T*M and the bracket form of the forced
//! evolution law.

use crate::bundle::{Covector, ForceMomentumSample};
use crate::error::{check_len, Error, Result};
use crate::expr::{parse, BinOp, EvalPoint, Expr, Params, Scope, Var};
use crate::hamiltonian::{legendre_invert, NewtonConfig};
use crate::system::{check_scope, LagrangianSystem};

/// A function `F(x, p)` on phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableExpr {
    dim: usize,
    expr: Expr,
    params: Params,
    bound: Expr,
}

impl ObservableExpr {
    pub fn new(dim: usize, expr: Expr, params: Params) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("observable dimension must be at least 1".into()));
        }
        check_scope(&expr, &Scope::phase(dim, params.keys().cloned()))?;
        let bound = expr.bind(&params)?;
        Ok(Self { dim, expr, params, bound })
    }

    pub fn parse(dim: usize, text: &str, params: Params) -> Result<Self> {
        let expr = parse(text, &Scope::phase(dim, params.keys().cloned()))?;
        Self::new(dim, expr, params)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn eval(&self, at: &Covector) -> Result<f64> {
        self.check(at)?;
        let none = Params::new();
        Ok(self.bound.eval(&EvalPoint::phase(&at.x, &at.p, &none))?)
    }

    /// `(∂F/∂x, ∂F/∂p)` at `at`.
    pub fn gradient(&self, at: &Covector) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(at)?;
        let none = Params::new();
        let point = EvalPoint::phase(&at.x, &at.p, &none);
        Ok((self.bound.grad_x(&point)?, self.bound.grad_p(&point)?))
    }

    fn check(&self, at: &Covector) -> Result<()> {
        check_len("configuration", self.dim, at.x.len())?;
        check_len("momentum", self.dim, at.p.len())
    }

    fn combine(&self, other: &Self, expr: Expr) -> Result<Self> {
        check_len("observable dimension", self.dim, other.dim)?;
        let mut params = self.params.clone();
        for (k, v) in &other.params {
            match params.get(k) {
                Some(old) if old != v => {
                    return Err(Error::InvalidConfig(format!("parameter `{k}` has conflicting values")))
                }
                _ => {
                    params.insert(k.clone(), *v);
                }
            }
        }
        Self::new(self.dim, expr, params)
    }

    /// Pointwise product `F·G` as a single expression.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.combine(other, Expr::binary(BinOp::Mul, self.expr.clone(), other.expr.clone()))
    }

    /// `{F, G}` composed symbolically, so it can itself be bracketed.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        let mut sum: Option<Expr> = None;
        for k in 0..self.dim {
            let term = Expr::binary(
                BinOp::Sub,
                Expr::binary(BinOp::Mul, self.expr.diff(Var::X(k)), other.expr.diff(Var::P(k))),
                Expr::binary(BinOp::Mul, other.expr.diff(Var::X(k)), self.expr.diff(Var::P(k))),
            );
            sum = Some(match sum {
                None => term,
                Some(acc) => Expr::binary(BinOp::Add, acc, term),
            });
        }
        self.combine(other, sum.unwrap_or_else(Expr::zero))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

fn canonical(fx: &[f64], fp: &[f64], gx: &[f64], gp: &[f64]) -> f64 {
    dot(fx, gp) - dot(gx, fp)
}

/// `{F, G} = ∂F/∂x·∂G/∂p − ∂G/∂x·∂F/∂p` at `at`.
pub fn poisson_bracket(f: &ObservableExpr, g: &ObservableExpr, at: &Covector) -> Result<f64> {
    let (fx, fp) = f.gradient(at)?;
    let (gx, gp) = g.gradient(at)?;
    Ok(canonical(&fx, &fp, &gx, &gp))
}

/// `(∂H/∂x, ∂H/∂p) = (−∂L/∂x∘Λ, Λ)` with the velocity `Λ(x, p)`.
fn hamiltonian_gradient(
    sys: &LagrangianSystem,
    at: &Covector,
    cfg: &NewtonConfig,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let v = legendre_invert(sys, at, cfg)?;
    let hx = sys.grad_x(&v.x, &v.v)?.into_iter().map(|g| -g).collect();
    let rho = sys.rho_at(&v.x, &v.v)?;
    Ok((hx, v.v, rho))
}

/// `{F, H}` with the Hamiltonian of `sys`.
pub fn bracket_with_hamiltonian(
    sys: &LagrangianSystem,
    f: &ObservableExpr,
    at: &Covector,
    cfg: &NewtonConfig,
) -> Result<f64> {
    check_len("observable dimension", sys.dim(), f.dim())?;
    let (fx, fp) = f.gradient(at)?;
    let (hx, hp, _) = hamiltonian_gradient(sys, at, cfg)?;
    Ok(canonical(&fx, &fp, &hx, &hp))
}

/// `∂F/∂x·ẋ + ∂F/∂p·ṗ − {F, H} − ∂F/∂p·(ζ − ρ∘Λ)`.
pub fn evolution_residual(
    sys: &LagrangianSystem,
    f: &ObservableExpr,
    sample: &ForceMomentumSample,
    xdot: &[f64],
    pdot: &[f64],
    cfg: &NewtonConfig,
) -> Result<f64> {
    let m = sys.dim();
    check_len("observable dimension", m, f.dim())?;
    check_len("velocity", m, xdot.len())?;
    check_len("momentum rate", m, pdot.len())?;
    let at = sample.momentum();
    let (fx, fp) = f.gradient(&at)?;
    let (hx, hp, rho) = hamiltonian_gradient(sys, &at, cfg)?;
    let forcing: Vec<f64> = sample.f.iter().zip(&rho).map(|(z, r)| z - r).collect();
    Ok(dot(&fx, xdot) + dot(&fp, pdot) - canonical(&fx, &fp, &hx, &hp) - dot(&fp, &forcing))
}
