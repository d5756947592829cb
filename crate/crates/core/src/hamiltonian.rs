//! Hamiltonian picture: inverse Legendre map by Newton iteration, the
//! Hamiltonian, the Hamiltonian form `θ = dH + Λ*ρ`, the vector field `Z`,
//! and the forced Hamilton equations.

use crate::bundle::{beta_inv, Covector, ForceMomentumSample, TStarTStarPoint, TTStarPoint, TangentVector};
use crate::error::{check_len, Error, Result};
use crate::linalg::solve;
use crate::system::LagrangianSystem;

/// Newton settings for [`legendre_invert`].
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    /// Bound on the ∞-norm of `∂L/∂v(x, v) − p`.
    pub tol: f64,
    pub max_iter: usize,
    /// Starting velocity; `None` starts from zero.
    pub initial_guess: Option<Vec<f64>>,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 50, initial_guess: None }
    }
}

impl NewtonConfig {
    pub fn with_guess(mut self, guess: Vec<f64>) -> Self {
        self.initial_guess = Some(guess);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidConfig(format!(
                "Newton tolerance must be positive and max_iter at least 1 (got {}, {})",
                self.tol, self.max_iter
            )));
        }
        Ok(())
    }
}

/// Result of a Legendre inversion with its convergence record.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub velocity: TangentVector,
    pub iterations: usize,
    pub residual: f64,
}

fn inf_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, c| m.max(c.abs()))
}

const MAX_HALVINGS: usize = 30;

/// Solves `∂L/∂v(x, v) = p` for `v`, with step halving when a full Newton
/// step increases the residual.
pub fn legendre_invert_report(sys: &LagrangianSystem, p: &Covector, cfg: &NewtonConfig) -> Result<Inversion> {
    cfg.validate()?;
    let m = sys.dim();
    check_len("momentum", m, p.p.len())?;
    let x = &p.x;
    let mut v = match &cfg.initial_guess {
        Some(g) => {
            check_len("initial guess", m, g.len())?;
            g.clone()
        }
        None => vec![0.0; m],
    };
    let residual_at = |v: &[f64]| -> Result<Vec<f64>> {
        let g = sys.grad_v(x, v)?;
        Ok(g.iter().zip(&p.p).map(|(g, p)| g - p).collect())
    };
    let mut r = residual_at(&v)?;
    let mut res = inf_norm(&r);
    let mut iterations = 0;
    while !(res <= cfg.tol) {
        if iterations >= cfg.max_iter {
            return Err(Error::NoConvergence { iterations, residual: res });
        }
        let w = sys.hessian_vv(x, &v)?;
        let neg_r: Vec<f64> = r.iter().map(|c| -c).collect();
        let step = solve(&w, &neg_r)?;
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = v.iter().zip(&step).map(|(a, s)| a + scale * s).collect();
            if let Ok(rt) = residual_at(&trial) {
                let rn = inf_norm(&rt);
                if rn < res || rn <= cfg.tol {
                    accepted = Some((trial, rt, rn));
                    break;
                }
            }
            scale *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((nv, nr, nres)) => {
                v = nv;
                r = nr;
                res = nres;
            }
            None => return Err(Error::NoConvergence { iterations, residual: res }),
        }
    }
    Ok(Inversion { velocity: TangentVector { x: x.clone(), v }, iterations, residual: res })
}

/// `Λ(x, p)`: the velocity whose Legendre image is `p`.
pub fn legendre_invert(sys: &LagrangianSystem, p: &Covector, cfg: &NewtonConfig) -> Result<TangentVector> {
    legendre_invert_report(sys, p, cfg).map(|inv| inv.velocity)
}

/// `H(x, p) = Σ p_k Λ^k − L(x, Λ)`.
pub fn hamiltonian(sys: &LagrangianSystem, p: &Covector, cfg: &NewtonConfig) -> Result<f64> {
    let v = legendre_invert(sys, p, cfg)?;
    energy(sys, &v.x, &v.v, &p.p)
}

/// `Σ p_k v^k − L(x, v)`, the Hamiltonian expressed at a velocity with its momentum.
pub fn energy(sys: &LagrangianSystem, x: &[f64], v: &[f64], p: &[f64]) -> Result<f64> {
    let l = sys.lagrangian_at(x, v)?;
    Ok(p.iter().zip(v).map(|(p, v)| p * v).sum::<f64>() - l)
}

/// Components `θ = θ_k dx^k + θ^k dp_k` of the Hamiltonian form.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaForm {
    /// `θ_k = ∂H/∂x^k + ρ_k(x, Λ) = −∂L/∂x^k(x, Λ) + ρ_k(x, Λ)`.
    pub dx: Vec<f64>,
    /// `θ^k = ∂H/∂p_k = Λ^k`.
    pub dp: Vec<f64>,
}

impl ThetaForm {
    /// As a point of T*T*M over `p`.
    pub fn to_cotangent(&self, p: &Covector) -> TStarTStarPoint {
        TStarTStarPoint { x: p.x.clone(), p: p.p.clone(), y: self.dx.clone(), z: self.dp.clone() }
    }
}

/// Hamiltonian form at `p`, using the envelope identity `∂H/∂x = −∂L/∂x∘Λ`.
pub fn theta_form(sys: &LagrangianSystem, p: &Covector, cfg: &NewtonConfig) -> Result<ThetaForm> {
    let v = legendre_invert(sys, p, cfg)?;
    theta_at(sys, &v)
}

fn theta_at(sys: &LagrangianSystem, v: &TangentVector) -> Result<ThetaForm> {
    let gx = sys.grad_x(&v.x, &v.v)?;
    let rho = sys.rho_at(&v.x, &v.v)?;
    Ok(ThetaForm { dx: gx.iter().zip(&rho).map(|(g, r)| r - g).collect(), dp: v.v.clone() })
}

/// `Z(p) = (x, p, Λ, ∂L/∂x∘Λ − ρ∘Λ)`.
pub fn vector_field_z(sys: &LagrangianSystem, p: &Covector, cfg: &NewtonConfig) -> Result<TTStarPoint> {
    let v = legendre_invert(sys, p, cfg)?;
    let gx = sys.grad_x(&v.x, &v.v)?;
    let rho = sys.rho_at(&v.x, &v.v)?;
    Ok(TTStarPoint { x: p.x.clone(), p: p.p.clone(), pdot: gx.iter().zip(&rho).map(|(g, r)| g - r).collect(), v: v.v })
}

/// `Z = −β⁻¹(θ)`, the same field obtained from the Hamiltonian form.
pub fn vector_field_from_theta(theta: &ThetaForm, p: &Covector) -> TTStarPoint {
    let mut z = beta_inv(&theta.to_cotangent(p));
    z.v.iter_mut().chain(z.pdot.iter_mut()).for_each(|c| *c = -*c);
    z
}

/// Rates `(ẋ, ṗ) = (∂H/∂p, ζ − ∂H/∂x − ρ∘Λ)` of the forced Hamilton equations.
pub fn hamilton_rates(
    sys: &LagrangianSystem,
    p: &Covector,
    force: &[f64],
    cfg: &NewtonConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len("force", sys.dim(), force.len())?;
    let z = vector_field_z(sys, p, cfg)?;
    let pdot = z.pdot.iter().zip(force).map(|(z, f)| z + f).collect();
    Ok((z.v, pdot))
}

/// `[ẋ − ∂H/∂p, ṗ − ζ + ∂H/∂x + ρ∘Λ]`; zero iff the sample with the given
/// rates obeys the forced Hamilton equations.
pub fn hamilton_residual(
    sys: &LagrangianSystem,
    sample: &ForceMomentumSample,
    pdot: &[f64],
    xdot: &[f64],
    cfg: &NewtonConfig,
) -> Result<Vec<f64>> {
    let m = sys.dim();
    check_len("momentum rate", m, pdot.len())?;
    check_len("velocity", m, xdot.len())?;
    let (rate_x, rate_p) = hamilton_rates(sys, &sample.momentum(), &sample.f, cfg)?;
    Ok(xdot.iter().zip(&rate_x).chain(pdot.iter().zip(&rate_p)).map(|(a, b)| a - b).collect())
}
