use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::ast::{BinOp, Expr, Func, Var};
use super::hyperdual::{HyperDual2, Scalar};
use crate::error::ExprError;

/// Named parameter values.
pub type Params = BTreeMap<String, f64>;

/// Where an expression is evaluated. Slices not referenced by the expression may be empty.
#[derive(Debug, Clone, Copy)]
pub struct EvalPoint<'a> {
    pub x: &'a [f64],
    pub v: &'a [f64],
    pub p: &'a [f64],
    pub t: f64,
    pub params: &'a Params,
}

impl<'a> EvalPoint<'a> {
    pub fn tangent(x: &'a [f64], v: &'a [f64], params: &'a Params) -> Self {
        Self { x, v, p: &[], t: 0.0, params }
    }

    pub fn phase(x: &'a [f64], p: &'a [f64], params: &'a Params) -> Self {
        Self { x, v: &[], p, t: 0.0, params }
    }

    pub fn time(t: f64, params: &'a Params) -> Self {
        Self { x: &[], v: &[], p: &[], t, params }
    }

    pub fn value_of(&self, var: Var) -> Result<f64, ExprError> {
        let slot = match var {
            Var::X(i) => self.x.get(i),
            Var::V(i) => self.v.get(i),
            Var::P(i) => self.p.get(i),
            Var::T => return Ok(self.t),
        };
        slot.copied().ok_or_else(|| ExprError::MissingVariable(var.to_string()))
    }
}

/// Value, gradients and Hessian blocks of a function on the tangent bundle.
///
/// `hvx[(k, l)]` is `∂²f/∂v_k ∂x_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentJet {
    pub value: f64,
    pub gx: Vec<f64>,
    pub gv: Vec<f64>,
    pub hvv: DMatrix<f64>,
    pub hvx: DMatrix<f64>,
}

/// Value and first two time derivatives of a function of `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

fn domain(e: &Expr, reason: impl Into<String>) -> ExprError {
    ExprError::Domain { subexpr: e.to_string(), reason: reason.into() }
}

impl Expr {
    /// Evaluates over any [`Scalar`], with each variable supplied by `seed`.
    pub fn eval_with<S: Scalar>(
        &self,
        seed: &dyn Fn(Var) -> Result<S, ExprError>,
        params: &Params,
    ) -> Result<S, ExprError> {
        match self {
            Expr::Const(c) => Ok(S::constant(*c)),
            Expr::Param(name) => {
                params.get(name).map(|v| S::constant(*v)).ok_or_else(|| ExprError::UnboundParameter(name.clone()))
            }
            Expr::Var(v) => seed(*v),
            Expr::Neg(a) => Ok(-a.eval_with(seed, params)?),
            Expr::Call(func, a) => {
                let arg = a.eval_with(seed, params)?;
                let x = arg.value();
                match func {
                    Func::Sin => Ok(arg.sin()),
                    Func::Cos => Ok(arg.cos()),
                    Func::Exp => Ok(arg.exp()),
                    Func::Ln if x <= 0.0 => Err(domain(self, format!("logarithm of {x}"))),
                    Func::Ln => Ok(arg.ln()),
                    Func::Sqrt if x < 0.0 => Err(domain(self, format!("square root of {x}"))),
                    Func::Sqrt if x == 0.0 && S::LIFTED && !a.is_variable_free() => {
                        Err(domain(self, "square root is not differentiable at 0"))
                    }
                    Func::Sqrt => Ok(arg.sqrt()),
                }
            }
            Expr::Binary(op, a, b) => {
                let lhs = a.eval_with(seed, params)?;
                match op {
                    BinOp::Add => Ok(lhs + b.eval_with(seed, params)?),
                    BinOp::Sub => Ok(lhs - b.eval_with(seed, params)?),
                    BinOp::Mul => Ok(lhs * b.eval_with(seed, params)?),
                    BinOp::Div => {
                        let rhs = b.eval_with(seed, params)?;
                        if rhs.value() == 0.0 {
                            return Err(domain(self, "division by zero"));
                        }
                        Ok(lhs / rhs)
                    }
                    BinOp::Pow => {
                        let c: f64 = b.eval_with(&|v| Err(ExprError::MissingVariable(v.to_string())), params)?;
                        pow(self, a, lhs, c)
                    }
                }
            }
        }
    }

    /// Plain IEEE double evaluation.
    pub fn eval(&self, at: &EvalPoint<'_>) -> Result<f64, ExprError> {
        self.eval_with(&|v| at.value_of(v), at.params)
    }

    /// One hyper-dual pass with unit seeds on `u` and `w` (which may coincide).
    pub fn second_partial(&self, at: &EvalPoint<'_>, u: Var, w: Var) -> Result<HyperDual2, ExprError> {
        self.eval_with(
            &|v| {
                let val = at.value_of(v)?;
                let du = if v == u { 1.0 } else { 0.0 };
                let dw = if v == w { 1.0 } else { 0.0 };
                Ok(HyperDual2::variable(val, du, dw))
            },
            at.params,
        )
    }

    /// Gradient over the slots `slot(0..n)`.
    fn grad(&self, at: &EvalPoint<'_>, n: usize, slot: fn(usize) -> Var) -> Result<Vec<f64>, ExprError> {
        (0..n)
            .map(|i| {
                let var = slot(i);
                self.eval_with(
                    &|v| Ok(HyperDual2::variable(at.value_of(v)?, if v == var { 1.0 } else { 0.0 }, 0.0)),
                    at.params,
                )
                .map(|h| h.d1)
            })
            .collect()
    }

    pub fn grad_x(&self, at: &EvalPoint<'_>) -> Result<Vec<f64>, ExprError> {
        self.grad(at, at.x.len(), Var::X)
    }

    pub fn grad_v(&self, at: &EvalPoint<'_>) -> Result<Vec<f64>, ExprError> {
        self.grad(at, at.v.len(), Var::V)
    }

    pub fn grad_p(&self, at: &EvalPoint<'_>) -> Result<Vec<f64>, ExprError> {
        self.grad(at, at.p.len(), Var::P)
    }

    /// Symmetric Hessian block; one pass per unordered pair, mirrored.
    fn hessian_sym(&self, at: &EvalPoint<'_>, n: usize, slot: fn(usize) -> Var) -> Result<DMatrix<f64>, ExprError> {
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let d = self.second_partial(at, slot(i), slot(j))?.d12;
                h[(i, j)] = d;
                h[(j, i)] = d;
            }
        }
        Ok(h)
    }

    /// `∂²f/∂v_k ∂v_l`.
    pub fn hessian_vv(&self, at: &EvalPoint<'_>) -> Result<DMatrix<f64>, ExprError> {
        self.hessian_sym(at, at.v.len(), Var::V)
    }

    /// `∂²f/∂v_k ∂x_l`, row `k`, column `l`.
    pub fn hessian_vx(&self, at: &EvalPoint<'_>) -> Result<DMatrix<f64>, ExprError> {
        let (n, m) = (at.v.len(), at.x.len());
        let mut h = DMatrix::zeros(n, m);
        for k in 0..n {
            for l in 0..m {
                h[(k, l)] = self.second_partial(at, Var::V(k), Var::X(l))?.d12;
            }
        }
        Ok(h)
    }

    /// Value, both gradients and both Hessian blocks in `m(m+1)/2 + m²` passes.
    pub fn tangent_jet(&self, at: &EvalPoint<'_>) -> Result<TangentJet, ExprError> {
        let m = at.v.len();
        let mx = at.x.len();
        let mut jet = TangentJet {
            value: self.eval(at)?,
            gx: vec![0.0; mx],
            gv: vec![0.0; m],
            hvv: DMatrix::zeros(m, m),
            hvx: DMatrix::zeros(m, mx),
        };
        for i in 0..m {
            for j in i..m {
                let h = self.second_partial(at, Var::V(i), Var::V(j))?;
                jet.hvv[(i, j)] = h.d12;
                jet.hvv[(j, i)] = h.d12;
                if j == i {
                    jet.gv[i] = h.d1;
                }
            }
        }
        for k in 0..m {
            for l in 0..mx {
                let h = self.second_partial(at, Var::V(k), Var::X(l))?;
                jet.hvx[(k, l)] = h.d12;
                if k == 0 {
                    jet.gx[l] = h.d2;
                }
            }
        }
        if m == 0 {
            jet.gx = self.grad_x(at)?;
        }
        Ok(jet)
    }

    /// Value, first and second derivative in `t`.
    pub fn time_jet(&self, t: f64, params: &Params) -> Result<TimeJet, ExprError> {
        let at = EvalPoint::time(t, params);
        let h = self.second_partial(&at, Var::T, Var::T)?;
        Ok(TimeJet { value: h.val, d1: h.d1, d2: h.d12 })
    }

    /// Replaces parameters by their values.
    pub fn bind(&self, params: &Params) -> Result<Expr, ExprError> {
        Ok(match self {
            Expr::Param(name) => {
                Expr::Const(*params.get(name).ok_or_else(|| ExprError::UnboundParameter(name.clone()))?)
            }
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.bind(params)?)),
            Expr::Call(f, a) => Expr::call(*f, a.bind(params)?),
            Expr::Binary(op, a, b) => Expr::binary(*op, a.bind(params)?, b.bind(params)?),
        })
    }
}

fn pow<S: Scalar>(node: &Expr, base_expr: &Expr, base: S, c: f64) -> Result<S, ExprError> {
    let x = base.value();
    if c.fract() == 0.0 && c.abs() <= f64::from(i32::MAX) {
        let n = c as i32;
        if n < 0 && x == 0.0 {
            return Err(domain(node, "negative power of zero"));
        }
        return Ok(base.powi(n));
    }
    if x < 0.0 {
        return Err(domain(node, format!("non-integer power of negative base {x}")));
    }
    if x == 0.0 && (c < 0.0 || (c < 2.0 && S::LIFTED && !base_expr.is_variable_free())) {
        return Err(domain(node, "power is not differentiable at 0"));
    }
    Ok(base.powf(c))
}
