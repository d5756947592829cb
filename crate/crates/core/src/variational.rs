//! Quadrature checks of the variational principle with boundary momenta
//! and external forces.

use crate::bundle::{SecondTangent, TangentVector};
use crate::error::{check_len, Error, Result};
use crate::expr::{parse, Expr, Params, Scope};
use crate::integrator::{boundary_momenta, ForceSchedule, Trajectory};
use crate::lagrangian::{euler_lagrange, lambda};
use crate::system::{check_scope, LagrangianSystem};

/// Infinitesimal variation `δx(t)`, not required to vanish at the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Variation {
    bound: Vec<Expr>,
}

impl Variation {
    pub fn new(exprs: Vec<Expr>, params: &Params) -> Result<Self> {
        let scope = Scope::time(params.keys().cloned());
        for e in &exprs {
            check_scope(e, &scope)?;
        }
        let bound = exprs.iter().map(|e| e.bind(params)).collect::<Result<_, _>>()?;
        Ok(Self { bound })
    }

    pub fn parse(components: &[&str], params: &Params) -> Result<Self> {
        let scope = Scope::time(params.keys().cloned());
        let exprs = components.iter().map(|c| parse(c, &scope)).collect::<Result<Vec<_>, _>>()?;
        Self::new(exprs, params)
    }

    pub fn dim(&self) -> usize {
        self.bound.len()
    }

    /// `(δx(t), δẋ(t))`.
    pub fn at(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let none = Params::new();
        let mut dx = Vec::with_capacity(self.dim());
        let mut ddx = Vec::with_capacity(self.dim());
        for e in &self.bound {
            let j = e.time_jet(t, &none)?;
            dx.push(j.value);
            ddx.push(j.d1);
        }
        Ok((dx, ddx))
    }
}

/// Composite Simpson on uniformly spaced samples; a trailing odd panel is
/// closed with the trapezoid rule.
pub fn simpson(values: &[f64], dt: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let panels = n - 1;
    let even = panels - panels % 2;
    let mut sum = 0.0;
    for i in (0..even).step_by(2) {
        sum += values[i] + 4.0 * values[i + 1] + values[i + 2];
    }
    let mut total = sum * dt / 3.0;
    if even < panels {
        total += 0.5 * dt * (values[n - 2] + values[n - 1]);
    }
    total
}

fn uniform_step(t: &[f64]) -> Result<f64> {
    if t.len() < 2 {
        return Err(Error::GridMismatch(format!("need at least 2 samples, got {}", t.len())));
    }
    let dt = t[1] - t[0];
    if !(dt > 0.0) {
        return Err(Error::GridMismatch("sample times must increase".into()));
    }
    let tol = 1e-9 * t[0].abs().max(t[t.len() - 1].abs()).max(dt);
    for w in t.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > tol {
            return Err(Error::GridMismatch(format!("non-uniform step near t = {}", w[0])));
        }
    }
    Ok(dt)
}

fn check_trajectory(sys: &LagrangianSystem, traj: &Trajectory) -> Result<f64> {
    let n = traj.len();
    if traj.x.len() != n || traj.v.len() != n || traj.p.len() != n || traj.f.len() != n {
        return Err(Error::GridMismatch("trajectory columns have different lengths".into()));
    }
    if n > 0 {
        check_len("trajectory dimension", sys.dim(), traj.dim())?;
    }
    uniform_step(&traj.t)
}

/// `∫ L(x, ẋ) dt` along the samples. Only defined when `ρ = 0`.
pub fn action(sys: &LagrangianSystem, traj: &Trajectory) -> Result<f64> {
    if !sys.is_potential() {
        return Err(Error::NonPotentialSystem);
    }
    let dt = check_trajectory(sys, traj)?;
    let l = (0..traj.len()).map(|i| sys.lagrangian_at(&traj.x[i], &traj.v[i])).collect::<Result<Vec<_>>>()?;
    Ok(simpson(&l, dt))
}

/// The three terms of the principle along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipleTerms {
    /// `∫ ⟨λ, δẋ⟩ = ∫ (∂L/∂x − ρ)·δx + ∂L/∂v·δẋ`.
    pub lambda: f64,
    /// `∫ ζ·δx`.
    pub force: f64,
    /// `η(b)·δx(b) − η(a)·δx(a)`.
    pub boundary: f64,
}

impl PrincipleTerms {
    /// `∫⟨λ, δẋ⟩ + ∫ζ·δx − [η·δx]`.
    pub fn residual(&self) -> f64 {
        self.lambda + self.force - self.boundary
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

fn lambda_integrand(sys: &LagrangianSystem, traj: &Trajectory, var: &Variation) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut values = Vec::with_capacity(traj.len());
    let mut dxs = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        let lam = lambda(sys, &TangentVector { x: traj.x[i].clone(), v: traj.v[i].clone() })
            .map_err(|e| e.at_time(traj.t[i]))?;
        let (dx, ddx) = var.at(traj.t[i])?;
        values.push(dot(&lam.a, &dx) + dot(&lam.b, &ddx));
        dxs.push(dx);
    }
    Ok((values, dxs))
}

fn boundary_term(sys: &LagrangianSystem, traj: &Trajectory, dxs: &[Vec<f64>]) -> Result<f64> {
    let (a, b) = boundary_momenta(sys, traj)?;
    Ok(dot(&b.p, &dxs[dxs.len() - 1]) - dot(&a.p, &dxs[0]))
}

pub fn principle_terms(
    sys: &LagrangianSystem,
    traj: &Trajectory,
    sched: &ForceSchedule,
    var: &Variation,
) -> Result<PrincipleTerms> {
    let dt = check_trajectory(sys, traj)?;
    check_len("force schedule components", sys.dim(), sched.dim())?;
    check_len("variation components", sys.dim(), var.dim())?;
    let (values, dxs) = lambda_integrand(sys, traj, var)?;
    let force: Vec<f64> =
        traj.t.iter().zip(&dxs).map(|(&t, dx)| sched.at(t).map(|f| dot(&f, dx))).collect::<Result<_>>()?;
    Ok(PrincipleTerms {
        lambda: simpson(&values, dt),
        force: simpson(&force, dt),
        boundary: boundary_term(sys, traj, &dxs)?,
    })
}

/// `∫⟨λ, δẋ⟩ + ∫ζ·δx − η(b)·δx(b) + η(a)·δx(a)`; pure quadrature error on
/// a trajectory of the forced dynamics.
pub fn principle_residual(
    sys: &LagrangianSystem,
    traj: &Trajectory,
    sched: &ForceSchedule,
    var: &Variation,
) -> Result<f64> {
    principle_terms(sys, traj, sched, var).map(|t| t.residual())
}

/// `∫⟨λ, δẋ⟩ + ∫ℰλ(ẍ)·δx − [∂L/∂v·δx]` for any smooth path with the given
/// accelerations. Vanishes up to quadrature error whether or not the path
/// solves the dynamics.
pub fn integration_by_parts_residual(
    sys: &LagrangianSystem,
    traj: &Trajectory,
    accel: &[Vec<f64>],
    var: &Variation,
) -> Result<f64> {
    let dt = check_trajectory(sys, traj)?;
    check_len("variation components", sys.dim(), var.dim())?;
    if accel.len() != traj.len() {
        return Err(Error::GridMismatch(format!("{} accelerations for {} samples", accel.len(), traj.len())));
    }
    let (values, dxs) = lambda_integrand(sys, traj, var)?;
    let defect = (0..traj.len())
        .map(|i| {
            let s = SecondTangent::new(traj.x[i].clone(), traj.v[i].clone(), accel[i].clone())?;
            Ok(dot(&euler_lagrange(sys, &s)?.p, &dxs[i]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(simpson(&values, dt) + simpson(&defect, dt) - boundary_term(sys, traj, &dxs)?)
}
