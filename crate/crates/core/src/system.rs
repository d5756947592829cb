use crate::error::{check_len, Error, ExprError, Result};
use crate::expr::{parse, EvalPoint, Expr, Params, Scope, TangentJet, Var};

/// A Lagrangian `L(x, v)` together with a velocity-dependent force form
/// `ρ = ρ_k(x, v) dx^k`. The dynamics is generated by `λ = dL − ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianSystem {
    dim: usize,
    lagrangian: Expr,
    rho: Vec<Expr>,
    params: Params,
    bound_lagrangian: Expr,
    bound_rho: Vec<Expr>,
}

/// Fails unless every variable of `e` is allowed by `scope`.
pub(crate) fn check_scope(e: &Expr, scope: &Scope) -> Result<(), ExprError> {
    let mut bad = None;
    e.for_each_var(&mut |v| {
        let ok = match v {
            Var::X(i) => scope.allow_x && i < scope.dim,
            Var::V(i) => scope.allow_v && i < scope.dim,
            Var::P(i) => scope.allow_p && i < scope.dim,
            Var::T => scope.allow_t,
        };
        if !ok && bad.is_none() {
            bad = Some(v);
        }
    });
    if let Some(v) = bad {
        return Err(ExprError::VariableOutOfRange { name: v.to_string(), offset: 0, dim: scope.dim });
    }
    let mut missing = None;
    e.for_each_param(&mut |p| {
        if !scope.params.contains(p) && missing.is_none() {
            missing = Some(p.to_string());
        }
    });
    match missing {
        Some(name) => Err(ExprError::UnknownIdentifier { name, offset: 0 }),
        None => Ok(()),
    }
}

impl LagrangianSystem {
    /// Builds a system from parsed trees. An empty `rho` means no
    /// non-potential forces.
    pub fn new(dim: usize, lagrangian: Expr, rho: Vec<Expr>, params: Params) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("system dimension must be at least 1".into()));
        }
        let rho = if rho.is_empty() { vec![Expr::zero(); dim] } else { rho };
        check_len("non-potential force components", dim, rho.len())?;
        let scope = Scope::tangent(dim, params.keys().cloned());
        check_scope(&lagrangian, &scope)?;
        for r in &rho {
            check_scope(r, &scope)?;
        }
        let bound_lagrangian = lagrangian.bind(&params)?;
        let bound_rho = rho.iter().map(|r| r.bind(&params)).collect::<Result<_, _>>()?;
        Ok(Self { dim, lagrangian, rho, params, bound_lagrangian, bound_rho })
    }

    /// Parses the Lagrangian and force components over `x1..xm`, `v1..vm` and `params`.
    pub fn parse(dim: usize, lagrangian: &str, rho: &[&str], params: Params) -> Result<Self> {
        let scope = Scope::tangent(dim, params.keys().cloned());
        let l = parse(lagrangian, &scope)?;
        let r = rho.iter().map(|s| parse(s, &scope)).collect::<Result<Vec<_>, _>>()?;
        Self::new(dim, l, r, params)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lagrangian(&self) -> &Expr {
        &self.lagrangian
    }

    pub fn rho(&self) -> &[Expr] {
        &self.rho
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Same expressions with different parameter values.
    pub fn with_params(&self, params: Params) -> Result<Self> {
        Self::new(self.dim, self.lagrangian.clone(), self.rho.clone(), params)
    }

    /// True when every force component is the literal `0`.
    pub fn is_potential(&self) -> bool {
        self.rho.iter().all(Expr::is_literal_zero)
    }

    fn check(&self, x: &[f64], v: &[f64]) -> Result<()> {
        check_len("configuration", self.dim, x.len())?;
        check_len("velocity", self.dim, v.len())
    }

    pub fn lagrangian_at(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        self.check(x, v)?;
        let none = Params::new();
        Ok(self.bound_lagrangian.eval(&EvalPoint::tangent(x, v, &none))?)
    }

    pub fn rho_at(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.check(x, v)?;
        let none = Params::new();
        let at = EvalPoint::tangent(x, v, &none);
        Ok(self.bound_rho.iter().map(|r| r.eval(&at)).collect::<Result<_, _>>()?)
    }

    /// Value, gradients and Hessian blocks of `L` at `(x, v)`.
    pub fn jet(&self, x: &[f64], v: &[f64]) -> Result<TangentJet> {
        self.check(x, v)?;
        let none = Params::new();
        Ok(self.bound_lagrangian.tangent_jet(&EvalPoint::tangent(x, v, &none))?)
    }

    pub fn grad_v(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.check(x, v)?;
        let none = Params::new();
        Ok(self.bound_lagrangian.grad_v(&EvalPoint::tangent(x, v, &none))?)
    }

    pub fn grad_x(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.check(x, v)?;
        let none = Params::new();
        Ok(self.bound_lagrangian.grad_x(&EvalPoint::tangent(x, v, &none))?)
    }

    pub fn hessian_vv(&self, x: &[f64], v: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
        self.check(x, v)?;
        let none = Params::new();
        Ok(self.bound_lagrangian.hessian_vv(&EvalPoint::tangent(x, v, &none))?)
    }
}
