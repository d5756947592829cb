use mechanics::bundle::{Covector, ForceMomentumSample, SecondTangent, TangentVector};
use mechanics::checks::random_observable;
use mechanics::corpus;
use mechanics::hamiltonian::*;
use mechanics::lagrangian::*;
use mechanics::poisson::*;
use mechanics::{Error, LagrangianSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 1e-5;

fn random(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(-scale..scale)).collect()
}

fn germs(seed: u64, per_system: usize) -> Vec<(&'static str, LagrangianSystem, SecondTangent)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (name, sys) in corpus::extended() {
        for _ in 0..per_system {
            let m = sys.dim();
            let s =
                SecondTangent { x: random(&mut rng, m, 1.5), v: random(&mut rng, m, 3.0), a: random(&mut rng, m, 3.0) };
            out.push((name, sys.clone(), s));
        }
    }
    out
}

fn shifted(base: &[f64], k: usize, d: f64) -> Vec<f64> {
    let mut s = base.to_vec();
    s[k] += d;
    s
}

/// Central difference of `f` along slot `k` of `base`.
fn partial(f: impl Fn(&[f64]) -> f64, base: &[f64], k: usize) -> f64 {
    (f(&shifted(base, k, H)) - f(&shifted(base, k, -H))) / (2.0 * H)
}

fn assert_close(what: &str, got: f64, want: f64, tol: f64) {
    assert!((got - want).abs() <= tol * want.abs().max(1.0), "{what}: {got} vs {want}");
}

fn tangent(s: &SecondTangent) -> TangentVector {
    TangentVector { x: s.x.clone(), v: s.v.clone() }
}

#[test]
fn legendre_map_is_the_velocity_gradient() {
    for (name, sys, s) in germs(1, 20) {
        let p = legendre(&sys, &tangent(&s)).unwrap();
        assert_eq!(p, legendre_via_alpha(&sys, &tangent(&s)).unwrap());
        for k in 0..sys.dim() {
            let fd = partial(|v| sys.lagrangian_at(&s.x, v).unwrap(), &s.v, k);
            assert_close(name, p.p[k], fd, 1e-7);
        }
    }
}

#[test]
fn euler_lagrange_matches_a_differenced_momentum() {
    // Along t ↦ (x + v t + a t²/2), d/dt ∂L/∂v is differenced in time.
    for (name, sys, s) in germs(2, 20) {
        let m = sys.dim();
        let at = |t: f64| {
            let x: Vec<f64> = (0..m).map(|k| s.x[k] + s.v[k] * t + 0.5 * s.a[k] * t * t).collect();
            let v: Vec<f64> = (0..m).map(|k| s.v[k] + s.a[k] * t).collect();
            legendre(&sys, &TangentVector { x, v }).unwrap().p
        };
        let (ahead, behind) = (at(H), at(-H));
        let rho = sys.rho_at(&s.x, &s.v).unwrap();
        let zeta = euler_lagrange(&sys, &s).unwrap();
        let rate = momentum_rate(&sys, &s).unwrap();
        for k in 0..m {
            let pdot = (ahead[k] - behind[k]) / (2.0 * H);
            let lx = partial(|x| sys.lagrangian_at(x, &s.v).unwrap(), &s.x, k);
            assert_close(name, rate[k], pdot, 1e-6);
            assert_close(name, zeta.p[k], pdot - lx + rho[k], 1e-6);
        }
    }
}

#[test]
fn solve_accel_inverts_euler_lagrange() {
    for (name, sys, s) in germs(3, 20) {
        let zeta = euler_lagrange(&sys, &s).unwrap();
        let back = solve_accel(&sys, &tangent(&s), &zeta).unwrap();
        for k in 0..sys.dim() {
            assert_close(name, back.a[k], s.a[k], 1e-10);
        }
    }
}

#[test]
fn off_shell_tulczyjew_identity_and_d0() {
    for (name, sys, s) in germs(4, 50) {
        let r = tulczyjew_identity_residual(&sys, &s).unwrap();
        assert!(r.iter().all(|c| c.abs() <= 1e-12), "{name}: {r:?}");

        let p = legendre(&sys, &tangent(&s)).unwrap();
        let z = vector_field_z(&sys, &p, &NewtonConfig::default()).unwrap();
        let d0 = d0_residual(&sys, &z).unwrap();
        assert!(d0.iter().all(|c| c.abs() <= 1e-10), "{name}: {d0:?}");
    }
}

#[test]
fn hamiltonian_is_a_legendre_transform() {
    let cfg = NewtonConfig::default();
    for (name, sys, s) in germs(5, 20) {
        let v = tangent(&s);
        let p = legendre(&sys, &v).unwrap();
        let h = hamiltonian(&sys, &p, &cfg).unwrap();
        let l = sys.lagrangian_at(&s.x, &s.v).unwrap();
        let pv: f64 = p.p.iter().zip(&s.v).map(|(a, b)| a * b).sum();
        assert_close(name, h + l, pv, 1e-10);
        assert_close(name, energy(&sys, &s.x, &s.v, &p.p).unwrap(), h, 1e-10);

        let inv = legendre_invert(&sys, &p, &cfg).unwrap();
        for k in 0..sys.dim() {
            assert_close(name, inv.v[k], s.v[k], 1e-10);
        }
    }
}

#[test]
fn hamiltonian_gradient_matches_differences() {
    let cfg = NewtonConfig::default();
    for (name, sys, s) in germs(6, 10) {
        let p = legendre(&sys, &tangent(&s)).unwrap();
        let theta = theta_form(&sys, &p, &cfg).unwrap();
        let rho = sys.rho_at(&s.x, &s.v).unwrap();
        for (k, r) in rho.iter().enumerate() {
            let hp =
                partial(|q| hamiltonian(&sys, &Covector { x: p.x.clone(), p: q.to_vec() }, &cfg).unwrap(), &p.p, k);
            let hx =
                partial(|x| hamiltonian(&sys, &Covector { x: x.to_vec(), p: p.p.clone() }, &cfg).unwrap(), &p.x, k);
            assert_close(name, theta.dp[k], hp, 1e-6);
            assert_close(name, theta.dx[k], hx + r, 1e-6);
        }
    }
}

#[test]
fn vector_field_from_both_routes() {
    let cfg = NewtonConfig::default();
    for (name, sys, s) in germs(7, 20) {
        let p = legendre(&sys, &tangent(&s)).unwrap();
        let direct = vector_field_z(&sys, &p, &cfg).unwrap();
        let via = vector_field_from_theta(&theta_form(&sys, &p, &cfg).unwrap(), &p);
        assert_eq!(direct.base(), via.base(), "{name}");
        for k in 0..sys.dim() {
            assert_close(name, via.v[k], direct.v[k], 1e-15);
            assert_close(name, via.pdot[k], direct.pdot[k], 1e-15);
        }
    }
}

fn on_shell(sys: &LagrangianSystem, s: &SecondTangent) -> (ForceMomentumSample, Vec<f64>, Vec<f64>) {
    let zeta = euler_lagrange(sys, s).unwrap();
    let p = legendre(sys, &tangent(s)).unwrap();
    let pdot = momentum_rate(sys, s).unwrap();
    (ForceMomentumSample { x: s.x.clone(), f: zeta.p, p: p.p }, s.v.clone(), pdot)
}

#[test]
fn hamilton_equations_hold_exactly_when_euler_lagrange_does() {
    let cfg = NewtonConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (name, sys, s) in germs(8, 20) {
        let (sample, xdot, pdot) = on_shell(&sys, &s);
        let r = hamilton_residual(&sys, &sample, &pdot, &xdot, &cfg).unwrap();
        assert!(r.iter().all(|c| c.abs() <= 1e-9), "{name}: {r:?}");

        let kick = random(&mut rng, sys.dim(), 1.0);
        let pushed = ForceMomentumSample { f: sample.f.iter().zip(&kick).map(|(f, d)| f + d).collect(), ..sample };
        let r = hamilton_residual(&sys, &pushed, &pdot, &xdot, &cfg).unwrap();
        let m = sys.dim();
        for k in 0..m {
            assert_close(name, r[m + k], -kick[k], 1e-9);
        }
    }
}

#[test]
fn energy_changes_at_the_power_of_the_net_force() {
    for (name, sys, s) in germs(9, 20) {
        let m = sys.dim();
        let energy_at = |t: f64| {
            let x: Vec<f64> = (0..m).map(|k| s.x[k] + s.v[k] * t + 0.5 * s.a[k] * t * t).collect();
            let v: Vec<f64> = (0..m).map(|k| s.v[k] + s.a[k] * t).collect();
            let p = legendre(&sys, &TangentVector { x: x.clone(), v: v.clone() }).unwrap();
            energy(&sys, &x, &v, &p.p).unwrap()
        };
        let rate = (energy_at(H) - energy_at(-H)) / (2.0 * H);
        let zeta = euler_lagrange(&sys, &s).unwrap();
        let rho = sys.rho_at(&s.x, &s.v).unwrap();
        let power: f64 = (0..m).map(|k| (zeta.p[k] - rho[k]) * s.v[k]).sum();
        assert_close(name, rate, power, 1e-6);
    }
}

#[test]
fn bracket_evolution_law_holds_on_shell_and_detects_off_shell_rates() {
    let cfg = NewtonConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (name, sys, s) in germs(10, 10) {
        let m = sys.dim();
        let (sample, xdot, pdot) = on_shell(&sys, &s);
        for _ in 0..5 {
            let f = random_observable(&mut rng, m);
            let r = evolution_residual(&sys, &f, &sample, &xdot, &pdot, &cfg).unwrap();
            assert!(r.abs() <= 1e-8 * f.eval(&sample.momentum()).unwrap().abs().max(1.0), "{name}: {r}");
        }
        let wrong: Vec<f64> = pdot.iter().map(|p| p + 0.5).collect();
        let hamilton = hamilton_residual(&sys, &sample, &wrong, &xdot, &cfg).unwrap();
        assert!(hamilton.iter().any(|c| c.abs() > 0.1));
        let coordinate = ObservableExpr::parse(m, "p1", Default::default()).unwrap();
        let r = evolution_residual(&sys, &coordinate, &sample, &xdot, &wrong, &cfg).unwrap();
        assert_close(name, r, 0.5, 1e-8);
    }
}

#[test]
fn bracket_with_hamiltonian_matches_differenced_flow() {
    // {F, H} = ∂F/∂x·∂H/∂p − ∂H/∂x·∂F/∂p with ∂H differenced.
    let cfg = NewtonConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, sys) in corpus::extended() {
        let m = sys.dim();
        for _ in 0..5 {
            let at = Covector { x: random(&mut rng, m, 1.0), p: random(&mut rng, m, 1.0) };
            let f = random_observable(&mut rng, m);
            let (fx, fp) = f.gradient(&at).unwrap();
            let mut want = 0.0;
            for k in 0..m {
                let hp = partial(
                    |q| hamiltonian(&sys, &Covector { x: at.x.clone(), p: q.to_vec() }, &cfg).unwrap(),
                    &at.p,
                    k,
                );
                let hx = partial(
                    |x| hamiltonian(&sys, &Covector { x: x.to_vec(), p: at.p.clone() }, &cfg).unwrap(),
                    &at.x,
                    k,
                );
                want += fx[k] * hp - hx * fp[k];
            }
            assert_close(name, bracket_with_hamiltonian(&sys, &f, &at, &cfg).unwrap(), want, 1e-6);
        }
    }
}

#[test]
fn poisson_algebra_on_random_observables() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let m = rng.gen_range(1..4);
        let (f, g, k) =
            (random_observable(&mut rng, m), random_observable(&mut rng, m), random_observable(&mut rng, m));
        let at = Covector { x: random(&mut rng, m, 1.0), p: random(&mut rng, m, 1.0) };
        let fg = poisson_bracket(&f, &g, &at).unwrap();
        assert_eq!(fg, -poisson_bracket(&g, &f, &at).unwrap());
        assert_close("symbolic bracket", f.bracket(&g).unwrap().eval(&at).unwrap(), fg, 1e-12);

        let leibniz = poisson_bracket(&f, &g.product(&k).unwrap(), &at).unwrap();
        let split = fg * k.eval(&at).unwrap() + g.eval(&at).unwrap() * poisson_bracket(&f, &k, &at).unwrap();
        assert_close("Leibniz", leibniz, split, 1e-12);

        let jacobi = poisson_bracket(&f, &g.bracket(&k).unwrap(), &at).unwrap()
            + poisson_bracket(&g, &k.bracket(&f).unwrap(), &at).unwrap()
            + poisson_bracket(&k, &f.bracket(&g).unwrap(), &at).unwrap();
        assert!(jacobi.abs() <= 1e-6, "Jacobi: {jacobi}");
    }
}

#[test]
fn canonical_brackets() {
    let at = Covector { x: vec![0.3, -0.2], p: vec![1.1, 0.4] };
    let obs = |t: &str| ObservableExpr::parse(2, t, Default::default()).unwrap();
    for i in 1..=2 {
        for j in 1..=2 {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert_eq!(poisson_bracket(&obs(&format!("x{i}")), &obs(&format!("p{j}")), &at).unwrap(), expected);
            assert_eq!(poisson_bracket(&obs(&format!("x{i}")), &obs(&format!("x{j}")), &at).unwrap(), 0.0);
            assert_eq!(poisson_bracket(&obs(&format!("p{i}")), &obs(&format!("p{j}")), &at).unwrap(), 0.0);
        }
    }
}

#[test]
fn degenerate_lagrangians_are_reported() {
    let sys = LagrangianSystem::parse(2, "0.5*v1^2 - x2", &[], Default::default()).unwrap();
    let v = TangentVector { x: vec![0.0, 0.0], v: vec![1.0, 1.0] };
    let f = Covector { x: vec![0.0, 0.0], p: vec![0.0, 0.0] };
    assert!(matches!(solve_accel(&sys, &v, &f), Err(Error::SingularMassMatrix { .. })));
    let p = Covector { x: vec![0.0, 0.0], p: vec![1.0, 1.0] };
    assert!(legendre_invert(&sys, &p, &NewtonConfig::default()).is_err());

    let cfg = NewtonConfig { max_iter: 1, ..Default::default() };
    let quartic = corpus::quartic_kinetic();
    let far = Covector { x: vec![0.0], p: vec![50.0] };
    assert!(matches!(legendre_invert(&quartic, &far, &cfg), Err(Error::NoConvergence { .. })));
}
