//! Fixed-step RK4 integration of the forced dynamics in the Lagrangian and
//! Hamiltonian pictures, boundary momenta and inverse dynamics.

use crate::bundle::{Covector, ForceMomentumSample, SecondTangent, TangentVector};
use crate::error::{check_len, Error, Result};
use crate::expr::{parse, EvalPoint, Expr, Params, Scope};
use crate::hamiltonian::{energy, hamilton_rates, legendre_invert, NewtonConfig};
use crate::lagrangian::{euler_lagrange, legendre, solve_accel};
use crate::system::{check_scope, LagrangianSystem};

/// External force `ζ(t)` given componentwise as expressions in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceSchedule {
    exprs: Vec<Expr>,
    params: Params,
    bound: Vec<Expr>,
}

impl ForceSchedule {
    pub fn new(exprs: Vec<Expr>, params: Params) -> Result<Self> {
        if exprs.is_empty() {
            return Err(Error::InvalidConfig("force schedule needs at least one component".into()));
        }
        let scope = Scope::time(params.keys().cloned());
        for e in &exprs {
            check_scope(e, &scope)?;
        }
        let bound = exprs.iter().map(|e| e.bind(&params)).collect::<Result<_, _>>()?;
        Ok(Self { exprs, params, bound })
    }

    pub fn parse(components: &[&str], params: Params) -> Result<Self> {
        let scope = Scope::time(params.keys().cloned());
        let exprs = components.iter().map(|c| parse(c, &scope)).collect::<Result<Vec<_>, _>>()?;
        Self::new(exprs, params)
    }

    /// No external force.
    pub fn zero(dim: usize) -> Self {
        let exprs = vec![Expr::zero(); dim];
        Self { bound: exprs.clone(), exprs, params: Params::new() }
    }

    pub fn dim(&self) -> usize {
        self.exprs.len()
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.exprs
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn at(&self, t: f64) -> Result<Vec<f64>> {
        let none = Params::new();
        let point = EvalPoint::time(t, &none);
        Ok(self.bound.iter().map(|e| e.eval(&point)).collect::<Result<_, _>>()?)
    }
}

/// Samples of a force-momentum trajectory on a uniform grid. Row `i` of
/// each matrix belongs to time `t[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    /// Grid step; zero for fewer than two samples.
    pub fn dt(&self) -> f64 {
        if self.t.len() < 2 {
            0.0
        } else {
            self.t[1] - self.t[0]
        }
    }

    pub fn sample(&self, i: usize) -> ForceMomentumSample {
        ForceMomentumSample { x: self.x[i].clone(), f: self.f[i].clone(), p: self.p[i].clone() }
    }

    pub fn velocity(&self, i: usize) -> TangentVector {
        TangentVector { x: self.x[i].clone(), v: self.v[i].clone() }
    }

    /// `H = p·v − L(x, v)` per sample.
    pub fn energy(&self, sys: &LagrangianSystem) -> Result<Vec<f64>> {
        (0..self.len())
            .map(|i| energy(sys, &self.x[i], &self.v[i], &self.p[i]).map_err(|e| e.at_time(self.t[i])))
            .collect()
    }

    /// Time derivative of `x` by fourth-order finite differences.
    pub fn xdot_fd(&self) -> Result<Vec<Vec<f64>>> {
        differentiate(&self.x, self.dt())
    }

    /// Time derivative of `p` by fourth-order finite differences.
    pub fn pdot_fd(&self) -> Result<Vec<Vec<f64>>> {
        differentiate(&self.p, self.dt())
    }

    /// Time derivative of `v` by fourth-order finite differences.
    pub fn acceleration_fd(&self) -> Result<Vec<Vec<f64>>> {
        differentiate(&self.v, self.dt())
    }
}

/// Fourth-order five-point derivative of uniformly sampled rows, one-sided
/// near the ends.
pub fn differentiate(rows: &[Vec<f64>], dt: f64) -> Result<Vec<Vec<f64>>> {
    let n = rows.len();
    if n < 5 || !(dt > 0.0) {
        return Err(Error::GridMismatch(format!(
            "finite differences need at least 5 samples on a positive step (got {n}, dt = {dt})"
        )));
    }
    let m = rows[0].len();
    let h = 12.0 * dt;
    let stencil = |c: [f64; 5], start: usize, sign: f64| -> Vec<f64> {
        (0..m).map(|k| sign * (0..5).map(|j| c[j] * rows[start + j][k]).sum::<f64>() / h).collect()
    };
    const EDGE0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const EDGE1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    const CENTRAL: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
    let rev = |c: [f64; 5]| [c[4], c[3], c[2], c[1], c[0]];
    Ok((0..n)
        .map(|i| match i {
            0 => stencil(EDGE0, 0, 1.0),
            1 => stencil(EDGE1, 0, 1.0),
            _ if i == n - 1 => stencil(rev(EDGE0), n - 5, -1.0),
            _ if i == n - 2 => stencil(rev(EDGE1), n - 5, -1.0),
            _ => stencil(CENTRAL, i - 2, 1.0),
        })
        .collect())
}

/// Uniform grid from `t0` to `t1`; `(t1 − t0)/dt` must be an integer.
pub fn time_grid(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t0.is_finite() && t1.is_finite() && dt.is_finite()) || !(dt > 0.0) || !(t1 > t0) {
        return Err(Error::GridMismatch(format!("need dt > 0 and t1 > t0 (got t0 = {t0}, t1 = {t1}, dt = {dt})")));
    }
    let span = t1 - t0;
    let steps = (span / dt).round();
    if steps < 1.0 || (steps * dt - span).abs() > 1e-9 * span.max(1.0) {
        return Err(Error::GridMismatch(format!("(t1 - t0)/dt = {} is not an integer", span / dt)));
    }
    let n = steps as usize;
    Ok((0..=n).map(|i| if i == n { t1 } else { t0 + span * i as f64 / n as f64 }).collect())
}

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(y, x)| y + a * x).collect()
}

fn rk4_combine(y: &[f64], h: f64, k: [&[f64]; 4]) -> Vec<f64> {
    (0..y.len()).map(|i| y[i] + h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i])).collect()
}

fn check_schedule(sys: &LagrangianSystem, sched: &ForceSchedule) -> Result<()> {
    check_len("force schedule components", sys.dim(), sched.dim())
}

/// Integrates `(x, ẋ)` with `ẍ` from [`solve_accel`].
pub fn simulate_lagrangian(
    sys: &LagrangianSystem,
    sched: &ForceSchedule,
    init: &TangentVector,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Trajectory> {
    check_schedule(sys, sched)?;
    check_len("initial configuration", sys.dim(), init.x.len())?;
    check_len("initial velocity", sys.dim(), init.v.len())?;
    let grid = time_grid(t0, t1, dt)?;
    let accel = |t: f64, x: &[f64], v: &[f64]| -> Result<Vec<f64>> {
        let f = Covector { x: x.to_vec(), p: sched.at(t)? };
        let tv = TangentVector { x: x.to_vec(), v: v.to_vec() };
        solve_accel(sys, &tv, &f).map(|s| s.a).map_err(|e| e.at_time(t))
    };
    let mut xs = vec![init.x.clone()];
    let mut vs = vec![init.v.clone()];
    for w in grid.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        let (x, v) = (xs.last().unwrap(), vs.last().unwrap());
        let k1x = v.clone();
        let k1v = accel(t, x, v)?;
        let (x2, v2) = (axpy(x, h / 2.0, &k1x), axpy(v, h / 2.0, &k1v));
        let k2v = accel(t + h / 2.0, &x2, &v2)?;
        let k2x = v2;
        let (x3, v3) = (axpy(x, h / 2.0, &k2x), axpy(v, h / 2.0, &k2v));
        let k3v = accel(t + h / 2.0, &x3, &v3)?;
        let k3x = v3;
        let (x4, v4) = (axpy(x, h, &k3x), axpy(v, h, &k3v));
        let k4v = accel(t + h, &x4, &v4)?;
        let k4x = v4;
        let nx = rk4_combine(x, h, [&k1x, &k2x, &k3x, &k4x]);
        let nv = rk4_combine(v, h, [&k1v, &k2v, &k3v, &k4v]);
        xs.push(nx);
        vs.push(nv);
    }
    let mut p = Vec::with_capacity(grid.len());
    let mut f = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        let tv = TangentVector { x: xs[i].clone(), v: vs[i].clone() };
        p.push(legendre(sys, &tv).map_err(|e| e.at_time(t))?.p);
        f.push(sched.at(t)?);
    }
    Ok(Trajectory { t: grid, x: xs, v: vs, p, f })
}

/// Integrates `(x, p)` along the forced Hamilton equations; each stage
/// inverts the Legendre map by Newton iteration started at the previous velocity.
pub fn simulate_hamiltonian(
    sys: &LagrangianSystem,
    sched: &ForceSchedule,
    init_p: &Covector,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Trajectory> {
    simulate_hamiltonian_with(sys, sched, init_p, t0, t1, dt, &NewtonConfig::default())
}

pub fn simulate_hamiltonian_with(
    sys: &LagrangianSystem,
    sched: &ForceSchedule,
    init_p: &Covector,
    t0: f64,
    t1: f64,
    dt: f64,
    newton: &NewtonConfig,
) -> Result<Trajectory> {
    check_schedule(sys, sched)?;
    check_len("initial configuration", sys.dim(), init_p.x.len())?;
    check_len("initial momentum", sys.dim(), init_p.p.len())?;
    let grid = time_grid(t0, t1, dt)?;
    let mut guess = newton.initial_guess.clone().unwrap_or_else(|| vec![0.0; sys.dim()]);
    let rates = |t: f64, x: &[f64], p: &[f64], guess: &mut Vec<f64>| -> Result<(Vec<f64>, Vec<f64>)> {
        let cfg = newton.clone().with_guess(guess.clone());
        let at = Covector { x: x.to_vec(), p: p.to_vec() };
        let force = sched.at(t)?;
        let (xdot, pdot) = hamilton_rates(sys, &at, &force, &cfg).map_err(|e| e.at_time(t))?;
        guess.clone_from(&xdot);
        Ok((xdot, pdot))
    };
    let mut xs = vec![init_p.x.clone()];
    let mut ps = vec![init_p.p.clone()];
    let mut vs = Vec::with_capacity(grid.len());
    for w in grid.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        let (x, p) = (xs.last().unwrap().clone(), ps.last().unwrap().clone());
        let (k1x, k1p) = rates(t, &x, &p, &mut guess)?;
        vs.push(k1x.clone());
        let (k2x, k2p) = rates(t + h / 2.0, &axpy(&x, h / 2.0, &k1x), &axpy(&p, h / 2.0, &k1p), &mut guess)?;
        let (k3x, k3p) = rates(t + h / 2.0, &axpy(&x, h / 2.0, &k2x), &axpy(&p, h / 2.0, &k2p), &mut guess)?;
        let (k4x, k4p) = rates(t + h, &axpy(&x, h, &k3x), &axpy(&p, h, &k3p), &mut guess)?;
        guess.clone_from(&k1x);
        xs.push(rk4_combine(&x, h, [&k1x, &k2x, &k3x, &k4x]));
        ps.push(rk4_combine(&p, h, [&k1p, &k2p, &k3p, &k4p]));
    }
    let last = grid.len() - 1;
    let cfg = newton.clone().with_guess(vs.last().cloned().unwrap_or(guess));
    let at = Covector { x: xs[last].clone(), p: ps[last].clone() };
    vs.push(legendre_invert(sys, &at, &cfg).map_err(|e| e.at_time(grid[last]))?.v);
    let f = grid.iter().map(|&t| sched.at(t)).collect::<Result<_>>()?;
    Ok(Trajectory { t: grid, x: xs, v: vs, p: ps, f })
}

/// Momenta `η(a)` and `η(b)` at the trajectory ends.
pub fn boundary_momenta(sys: &LagrangianSystem, traj: &Trajectory) -> Result<(Covector, Covector)> {
    if traj.is_empty() {
        return Err(Error::GridMismatch("trajectory has no samples".into()));
    }
    let first = legendre(sys, &traj.velocity(0))?;
    let last = legendre(sys, &traj.velocity(traj.len() - 1))?;
    Ok((first, last))
}

/// Forces `ζ(t_i)` that realise a desired motion.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceSamples {
    pub t: Vec<f64>,
    pub f: Vec<Vec<f64>>,
}

/// Inverse dynamics from sampled positions, velocities and accelerations.
pub fn inverse_dynamics_sampled(
    sys: &LagrangianSystem,
    t: &[f64],
    x: &[Vec<f64>],
    v: &[Vec<f64>],
    a: &[Vec<f64>],
) -> Result<ForceSamples> {
    let n = t.len();
    if x.len() != n || v.len() != n || a.len() != n {
        return Err(Error::GridMismatch(format!(
            "sample counts differ: t {n}, x {}, v {}, a {}",
            x.len(),
            v.len(),
            a.len()
        )));
    }
    let f = (0..n)
        .map(|i| {
            let s = SecondTangent::new(x[i].clone(), v[i].clone(), a[i].clone())?;
            check_len("configuration", sys.dim(), s.x.len())?;
            euler_lagrange(sys, &s).map(|c| c.p).map_err(|e| e.at_time(t[i]))
        })
        .collect::<Result<_>>()?;
    Ok(ForceSamples { t: t.to_vec(), f })
}

/// Inverse dynamics along a desired path `x(t)` given as expressions in
/// `t`; velocities and accelerations come from differentiating them.
pub fn inverse_dynamics_path(
    sys: &LagrangianSystem,
    path: &[Expr],
    params: &Params,
    t: &[f64],
) -> Result<ForceSamples> {
    check_len("desired path components", sys.dim(), path.len())?;
    let scope = Scope::time(params.keys().cloned());
    for e in path {
        check_scope(e, &scope)?;
    }
    let mut xs = Vec::with_capacity(t.len());
    let mut vs = Vec::with_capacity(t.len());
    let mut as_ = Vec::with_capacity(t.len());
    for &ti in t {
        let jets = path.iter().map(|e| e.time_jet(ti, params)).collect::<Result<Vec<_>, _>>()?;
        xs.push(jets.iter().map(|j| j.value).collect());
        vs.push(jets.iter().map(|j| j.d1).collect());
        as_.push(jets.iter().map(|j| j.d2).collect());
    }
    inverse_dynamics_sampled(sys, t, &xs, &vs, &as_)
}

/// Inverse dynamics of a stored trajectory, with accelerations from
/// finite differences of its velocities.
pub fn inverse_dynamics_trajectory(sys: &LagrangianSystem, traj: &Trajectory) -> Result<ForceSamples> {
    let a = traj.acceleration_fd()?;
    inverse_dynamics_sampled(sys, &traj.t, &traj.x, &traj.v, &a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aircraft() -> LagrangianSystem {
        let params: Params = [("m", 2.0), ("g", 9.81), ("gamma_h", 0.5), ("gamma_v", 0.8)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        LagrangianSystem::parse(2, "0.5*m*(v1^2+v2^2) - m*g*x2", &["gamma_h*v1", "gamma_v*v2"], params).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert_eq!(time_grid(0.0, 1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(time_grid(0.0, 5.0, 1e-3).unwrap().len(), 5001);
        assert!(matches!(time_grid(0.0, 1.0, 0.3), Err(Error::GridMismatch(_))));
        assert!(matches!(time_grid(1.0, 0.0, 0.1), Err(Error::GridMismatch(_))));
        assert!(matches!(time_grid(0.0, 1.0, 0.0), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn differentiate_quartic_exactly() {
        let dt = 0.1;
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![(i as f64 * dt).powi(4)]).collect();
        let d = differentiate(&rows, dt).unwrap();
        for (i, r) in d.iter().enumerate() {
            let t = i as f64 * dt;
            assert!((r[0] - 4.0 * t.powi(3)).abs() < 1e-12, "{i}: {}", r[0]);
        }
        assert!(differentiate(&rows[..4], dt).is_err());
    }

    #[test]
    fn schedule_rejects_state_variables() {
        assert!(ForceSchedule::parse(&["x1"], Params::new()).is_err());
        let s = ForceSchedule::parse(&["a*t", "2"], [("a".to_string(), 3.0)].into()).unwrap();
        assert_eq!(s.at(2.0).unwrap(), vec![6.0, 2.0]);
    }

    #[test]
    fn steady_flight_stays_level() {
        let sys = aircraft();
        let sched = ForceSchedule::parse(&["5", "19.62"], Params::new()).unwrap();
        let init = TangentVector::new(vec![0.0, 0.0], vec![10.0, 0.0]).unwrap();
        let traj = simulate_lagrangian(&sys, &sched, &init, 0.0, 5.0, 0.01).unwrap();
        let last = traj.len() - 1;
        assert!((traj.x[last][0] - 50.0).abs() < 1e-10);
        assert!(traj.x[last][1].abs() < 1e-12);
        let (a, b) = boundary_momenta(&sys, &traj).unwrap();
        assert_eq!(a.p, vec![20.0, 0.0]);
        assert!((b.p[0] - 20.0).abs() < 1e-12 && b.p[1].abs() < 1e-12);
    }

    #[test]
    fn pictures_agree_on_free_flight() {
        let sys = aircraft();
        let sched = ForceSchedule::zero(2);
        let lag = simulate_lagrangian(
            &sys,
            &sched,
            &TangentVector::new(vec![0.0, 0.0], vec![10.0, 0.0]).unwrap(),
            0.0,
            1.0,
            0.01,
        )
        .unwrap();
        let ham = simulate_hamiltonian(
            &sys,
            &sched,
            &Covector::new(vec![0.0, 0.0], vec![20.0, 0.0]).unwrap(),
            0.0,
            1.0,
            0.01,
        )
        .unwrap();
        for i in 0..lag.len() {
            for k in 0..2 {
                assert!((lag.x[i][k] - ham.x[i][k]).abs() < 1e-10);
                assert!((lag.v[i][k] - ham.v[i][k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_flow_reports_time() {
        let sys = LagrangianSystem::parse(1, "0.5*x1*v1^2", &[], Params::new()).unwrap();
        let init = TangentVector::new(vec![0.0], vec![1.0]).unwrap();
        let err = simulate_lagrangian(&sys, &ForceSchedule::zero(1), &init, 0.0, 1.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::AtTime { t, .. } if t == 0.0));
        assert!(matches!(err.root(), Error::SingularMassMatrix { .. }));
    }

    #[test]
    fn path_inverse_dynamics_for_steady_flight() {
        let sys = aircraft();
        let path = [parse("10*t", &Scope::time(Vec::<String>::new())).unwrap(), Expr::zero()];
        let out = inverse_dynamics_path(&sys, &path, &Params::new(), &[0.0, 1.0, 2.5]).unwrap();
        for f in &out.f {
            assert!((f[0] - 5.0).abs() < 1e-13 && (f[1] - 19.62).abs() < 1e-13);
        }
    }
}
