//! Lagrangian picture: Legendre map, Euler–Lagrange map, acceleration solve,
//! and the Tulczyjew identity for `λ = dL − ρ`.

use crate::bundle::{alpha, alpha_inv, chi, Covector, SecondTangent, TStarTPoint, TTStarPoint, TangentVector};
use crate::error::{check_len, Result};
use crate::linalg::{mat_vec, solve};
use crate::system::LagrangianSystem;

/// `p = ∂L/∂v`. Independent of `ρ`, which has no velocity components.
pub fn legendre(sys: &LagrangianSystem, v: &TangentVector) -> Result<Covector> {
    let p = sys.grad_v(&v.x, &v.v)?;
    Ok(Covector { x: v.x.clone(), p })
}

/// The Lagrangian form `λ = dL − ρ` at `v`, as a point of T*TM.
pub fn lambda(sys: &LagrangianSystem, v: &TangentVector) -> Result<TStarTPoint> {
    let jet = sys.jet(&v.x, &v.v)?;
    let rho = sys.rho_at(&v.x, &v.v)?;
    Ok(TStarTPoint {
        x: v.x.clone(),
        v: v.v.clone(),
        a: jet.gx.iter().zip(&rho).map(|(g, r)| g - r).collect(),
        b: jet.gv,
    })
}

/// Legendre map through `α⁻¹`: the T*M projection of `α⁻¹(λ(v))`.
pub fn legendre_via_alpha(sys: &LagrangianSystem, v: &TangentVector) -> Result<Covector> {
    Ok(alpha_inv(&lambda(sys, v)?).base())
}

/// `d/dt ∂L/∂v` along the germ, by the chain rule.
pub fn momentum_rate(sys: &LagrangianSystem, s: &SecondTangent) -> Result<Vec<f64>> {
    check_len("acceleration", sys.dim(), s.a.len())?;
    let jet = sys.jet(&s.x, &s.v)?;
    Ok(rate(&jet, &s.v, &s.a))
}

fn rate(jet: &crate::expr::TangentJet, v: &[f64], a: &[f64]) -> Vec<f64> {
    let mixed = mat_vec(&jet.hvx, v);
    let inertial = mat_vec(&jet.hvv, a);
    mixed.iter().zip(&inertial).map(|(m, i)| m + i).collect()
}

/// Tangent prolongation of the Legendre map along a germ: `(x, p, v, pdot)`.
pub fn legendre_prolongation(sys: &LagrangianSystem, s: &SecondTangent) -> Result<TTStarPoint> {
    check_len("acceleration", sys.dim(), s.a.len())?;
    let jet = sys.jet(&s.x, &s.v)?;
    let pdot = rate(&jet, &s.v, &s.a);
    Ok(TTStarPoint { x: s.x.clone(), p: jet.gv, v: s.v.clone(), pdot })
}

/// The external force needed to realise the germ:
/// `ζ_k = d/dt ∂L/∂v^k − ∂L/∂x^k + ρ_k`.
pub fn euler_lagrange(sys: &LagrangianSystem, s: &SecondTangent) -> Result<Covector> {
    check_len("acceleration", sys.dim(), s.a.len())?;
    let jet = sys.jet(&s.x, &s.v)?;
    let rho = sys.rho_at(&s.x, &s.v)?;
    let pdot = rate(&jet, &s.v, &s.a);
    let f = (0..sys.dim()).map(|k| pdot[k] - jet.gx[k] + rho[k]).collect();
    Ok(Covector { x: s.x.clone(), p: f })
}

/// Acceleration produced by the external force `f` at `v`.
///
/// Fails with `SingularMassMatrix` when `∂²L/∂v∂v` is too badly conditioned.
pub fn solve_accel(sys: &LagrangianSystem, v: &TangentVector, f: &Covector) -> Result<SecondTangent> {
    if f.x != v.x {
        return Err(crate::Error::BaseMismatch("force and velocity must share a configuration"));
    }
    check_len("force", sys.dim(), f.p.len())?;
    let jet = sys.jet(&v.x, &v.v)?;
    let rho = sys.rho_at(&v.x, &v.v)?;
    let mixed = mat_vec(&jet.hvx, &v.v);
    let rhs: Vec<f64> = (0..sys.dim()).map(|k| f.p[k] + jet.gx[k] - rho[k] - mixed[k]).collect();
    let a = solve(&jet.hvv, &rhs)?;
    Ok(SecondTangent { x: v.x.clone(), v: v.v.clone(), a })
}

/// Residual of `α(w) = λ(Tπ(w))`: `[pdot − ∂L/∂x + ρ, p − ∂L/∂v]`.
pub fn d0_residual(sys: &LagrangianSystem, w: &TTStarPoint) -> Result<Vec<f64>> {
    let lam = lambda(sys, &w.tangent_base())?;
    let aw = alpha(w);
    Ok(aw.a.iter().zip(&lam.a).chain(aw.b.iter().zip(&lam.b)).map(|(l, r)| l - r).collect())
}

/// `χ(ℰλ(s), t(𝒫λ∘ξ̇)) − α⁻¹(λ(ξ̇))` in `(pdot, p)` slots.
///
/// Vanishes for every germ, on or off shell.
pub fn tulczyjew_identity_residual(sys: &LagrangianSystem, s: &SecondTangent) -> Result<Vec<f64>> {
    let prolonged = legendre_prolongation(sys, s)?;
    let force = euler_lagrange(sys, s)?;
    let lhs = chi(&force, &prolonged)?;
    let rhs = alpha_inv(&lambda(sys, &TangentVector { x: s.x.clone(), v: s.v.clone() })?);
    Ok(lhs.pdot.iter().zip(&rhs.pdot).chain(lhs.p.iter().zip(&rhs.p)).map(|(l, r)| l - r).collect())
}
