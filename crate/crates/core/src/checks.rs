//! Catalogue of numerical identity checks run by `engine check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::{
    alpha, alpha_inv, beta, beta_inv, f11, f21, f22, kappa11, pair_tsts, pair_tt, tangent_pair, Covector,
    SecondTangent, TT2Point, TTPoint, TTStarPoint, TangentVector,
};
use crate::corpus::{self, Aircraft};
use crate::error::Result;
use crate::expr::Params;
use crate::hamiltonian::{legendre_invert_report, NewtonConfig};
use crate::integrator::{simulate_lagrangian, ForceSchedule};
use crate::lagrangian::{legendre, tulczyjew_identity_residual};
use crate::poisson::{poisson_bracket, ObservableExpr};
use crate::variational::{principle_residual, Variation};

pub const DEFAULT_SEED: u64 = 0x5EED_2024;

/// One line of a check table.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// Rows whose value must lie in `[lower, tolerance]` rather than below it.
    pub lower: Option<f64>,
}

impl CheckRow {
    fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, lower: None }
    }

    fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self { name: name.into(), value, tolerance: upper, lower: Some(lower) }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.tolerance && self.lower.is_none_or(|l| self.value >= l)
    }
}

fn vec_of(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(-scale..scale)).collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn tt(rng: &mut ChaCha8Rng, m: usize) -> TTPoint {
    TTPoint { x: vec_of(rng, m, 10.0), v: vec_of(rng, m, 10.0), dx: vec_of(rng, m, 10.0), dv: vec_of(rng, m, 10.0) }
}

fn ttstar(rng: &mut ChaCha8Rng, m: usize) -> TTStarPoint {
    TTStarPoint {
        x: vec_of(rng, m, 10.0),
        p: vec_of(rng, m, 10.0),
        v: vec_of(rng, m, 10.0),
        pdot: vec_of(rng, m, 10.0),
    }
}

fn tt2(rng: &mut ChaCha8Rng, m: usize) -> TT2Point {
    TT2Point {
        x: vec_of(rng, m, 10.0),
        v: vec_of(rng, m, 10.0),
        a: vec_of(rng, m, 10.0),
        dx: vec_of(rng, m, 10.0),
        dv: vec_of(rng, m, 10.0),
        da: vec_of(rng, m, 10.0),
    }
}

fn tt2_diff(a: &TT2Point, b: &TT2Point) -> f64 {
    [(&a.x, &b.x), (&a.v, &b.v), (&a.a, &b.a), (&a.dx, &b.dx), (&a.dv, &b.dv), (&a.da, &b.da)]
        .iter()
        .fold(0.0, |m, (p, q)| m.max(max_diff(p, q)))
}

/// Exact coordinate identities of the bundle maps.
pub fn bundle_identities(seed: u64, samples: usize) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut kappa, mut comp, mut duality, mut anti, mut inverses) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..samples {
        let m = 1 + i % 3;
        let w = tt(&mut rng, m);
        let back = kappa11(&kappa11(&w));
        kappa = kappa.max(max_diff(&back.v, &w.v)).max(max_diff(&back.dx, &w.dx)).max(max_diff(&back.dv, &w.dv));

        let ff = f11(&f11(&w));
        comp = comp.max(max_diff(&ff.dx, &vec![0.0; m])).max(max_diff(&ff.dv, &vec![0.0; m]));
        let w2 = tt2(&mut rng, m);
        let zero = TT2Point { dx: vec![0.0; m], dv: vec![0.0; m], da: vec![0.0; m], ..w2.clone() };
        comp = comp
            .max(tt2_diff(&f21(&f21(&w2)), &f22(&w2)))
            .max(tt2_diff(&f21(&f22(&w2)), &zero))
            .max(tt2_diff(&f22(&f21(&w2)), &zero))
            .max(tt2_diff(&f22(&f22(&w2)), &zero));

        let z = ttstar(&mut rng, m);
        let w_over = TTPoint { x: z.x.clone(), dx: z.v.clone(), ..tt(&mut rng, m) };
        duality = duality.max((pair_tt(&alpha(&z), &kappa11(&w_over))? - tangent_pair(&z, &w_over)?).abs());

        let u2 = TTStarPoint { x: z.x.clone(), p: z.p.clone(), ..ttstar(&mut rng, m) };
        anti = anti.max((pair_tsts(&beta(&z), &u2)? + pair_tsts(&beta(&u2), &z)?).abs());

        let ra = alpha_inv(&alpha(&z));
        let rb = beta_inv(&beta(&z));
        inverses = inverses
            .max(max_diff(&ra.p, &z.p))
            .max(max_diff(&ra.pdot, &z.pdot))
            .max(max_diff(&rb.v, &z.v))
            .max(max_diff(&rb.pdot, &z.pdot));
    }
    Ok(vec![
        CheckRow::below("kappa involution", kappa, 1e-15),
        CheckRow::below("F(k;n) composition table", comp, 1e-15),
        CheckRow::below("alpha/kappa duality", duality, 1e-15),
        CheckRow::below("beta antisymmetry", anti, 1e-15),
        CheckRow::below("alpha, beta inverses", inverses, 1e-15),
    ])
}

/// Off-shell Tulczyjew identity and Legendre round trips on the corpus.
pub fn dynamics_identities(seed: u64, samples: usize) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut identity = 0.0f64;
    let (mut round, mut iterations) = (0.0f64, 0usize);
    let systems = corpus::standard();
    for i in 0..samples {
        let (_, sys) = &systems[i % systems.len()];
        let m = sys.dim();
        let s = SecondTangent { x: vec_of(&mut rng, m, 2.0), v: vec_of(&mut rng, m, 5.0), a: vec_of(&mut rng, m, 5.0) };
        identity = identity.max(tulczyjew_identity_residual(sys, &s)?.iter().fold(0.0, |a, c| a.max(c.abs())));

        let v = TangentVector { x: s.x.clone(), v: s.v.clone() };
        let p = legendre(sys, &v)?;
        let inv = legendre_invert_report(sys, &p, &NewtonConfig::default())?;
        iterations = iterations.max(inv.iterations);
        round = round.max(max_diff(&legendre(sys, &inv.velocity)?.p, &p.p));
    }
    rows.push(CheckRow::below("Tulczyjew identity off shell", identity, 1e-12));
    rows.push(CheckRow::below("Legendre round trip", round, 1e-12));
    rows.push(CheckRow::below("Newton iterations", iterations as f64, 6.0));
    Ok(rows)
}

/// A random observable on T*M built from a few monomials and transcendental terms.
pub fn random_observable(rng: &mut ChaCha8Rng, dim: usize) -> ObservableExpr {
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(2..5) {
        let c: f64 = rng.gen_range(-1.0..1.0);
        let i = rng.gen_range(1..=dim);
        let j = rng.gen_range(1..=dim);
        let term = match rng.gen_range(0..5) {
            0 => format!("x{i}^{}*p{j}^{}", rng.gen_range(1..3), rng.gen_range(1..3)),
            1 => format!("sin(x{i})*p{j}"),
            2 => format!("exp(0.5*p{j})*x{i}"),
            3 => format!("p{i}*p{j}"),
            _ => format!("cos(x{i}*p{j})"),
        };
        terms.push(format!("({c:?})*{term}"));
    }
    ObservableExpr::parse(dim, &terms.join(" + "), Params::new()).expect("generated observable parses")
}

/// Antisymmetry, Leibniz rule and Jacobi identity of the canonical bracket.
pub fn poisson_identities(seed: u64, samples: usize) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut anti, mut leibniz, mut jacobi) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let dim = 2;
        let f = random_observable(&mut rng, dim);
        let g = random_observable(&mut rng, dim);
        let k = random_observable(&mut rng, dim);
        let at = Covector { x: vec_of(&mut rng, dim, 1.0), p: vec_of(&mut rng, dim, 1.0) };

        anti = anti.max((poisson_bracket(&f, &g, &at)? + poisson_bracket(&g, &f, &at)?).abs());

        let lhs = poisson_bracket(&f, &g.product(&k)?, &at)?;
        let rhs = poisson_bracket(&f, &g, &at)? * k.eval(&at)? + g.eval(&at)? * poisson_bracket(&f, &k, &at)?;
        leibniz = leibniz.max((lhs - rhs).abs());

        let cyc = poisson_bracket(&f, &g.bracket(&k)?, &at)?
            + poisson_bracket(&g, &k.bracket(&f)?, &at)?
            + poisson_bracket(&k, &f.bracket(&g)?, &at)?;
        jacobi = jacobi.max(cyc.abs());
    }
    Ok(vec![
        CheckRow::below("Poisson antisymmetry", anti, 0.0),
        CheckRow::below("Poisson Leibniz rule", leibniz, 1e-12),
        CheckRow::below("Poisson Jacobi identity", jacobi, 1e-6),
    ])
}

/// Every identity row.
pub fn identities(seed: u64) -> Result<Vec<CheckRow>> {
    let mut rows = bundle_identities(seed, 1000)?;
    rows.extend(dynamics_identities(seed.wrapping_add(1), 1000)?);
    rows.extend(poisson_identities(seed.wrapping_add(2), 100)?);
    Ok(rows)
}

/// Random cubic variations in `t/T`, generally nonzero at both ends.
pub fn random_variations(rng: &mut ChaCha8Rng, dim: usize, t_final: f64, count: usize) -> Vec<Variation> {
    (0..count)
        .map(|_| {
            let comps: Vec<String> = (0..dim)
                .map(|_| {
                    let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    format!(
                        "({:?}) + ({:?})*(t/{T:?}) + ({:?})*(t/{T:?})^2 + ({:?})*(t/{T:?})^3",
                        c[0],
                        c[1],
                        c[2],
                        c[3],
                        T = t_final
                    )
                })
                .collect();
            let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
            Variation::parse(&refs, &Params::new()).expect("generated variation parses")
        })
        .collect()
}

/// Residual of the variational principle for one step size.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    /// Per-variation residuals.
    pub residuals: Vec<f64>,
}

impl ConvergenceRow {
    pub fn max_abs(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// Principle residuals along aircraft free flight for each step size.
pub fn variational_table(seed: u64, steps: &[f64], variations: usize) -> Result<Vec<ConvergenceRow>> {
    let plane = Aircraft::default();
    let sys = plane.system();
    let sched = ForceSchedule::zero(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = random_variations(&mut rng, 2, plane.t_final, variations);
    let init = TangentVector { x: vec![0.0, 0.0], v: vec![plane.v0, 0.0] };
    steps
        .iter()
        .map(|&dt| {
            let traj = simulate_lagrangian(&sys, &sched, &init, 0.0, plane.t_final, dt)?;
            let residuals = vars.iter().map(|v| principle_residual(&sys, &traj, &sched, v)).collect::<Result<_>>()?;
            Ok(ConvergenceRow { dt, residuals })
        })
        .collect()
}

/// Smallest and largest per-variation ratio between consecutive rows.
pub fn halving_ratios(coarse: &ConvergenceRow, fine: &ConvergenceRow) -> (f64, f64) {
    coarse.residuals.iter().zip(&fine.residuals).fold((f64::INFINITY, 0.0f64), |(lo, hi), (c, f)| {
        let r = (c / f).abs();
        (lo.min(r), hi.max(r))
    })
}

pub const HALVING_STEPS: [f64; 3] = [0.1, 0.05, 0.025];

/// Accuracy at `dt = 1e-3` and the Simpson/RK4 order under halving.
pub fn variational(seed: u64) -> Result<(Vec<CheckRow>, Vec<ConvergenceRow>)> {
    let mut table = variational_table(seed, &HALVING_STEPS, 10)?;
    table.extend(variational_table(seed, &[1e-3], 10)?);
    let mut rows = Vec::new();
    for pair in table[..HALVING_STEPS.len()].windows(2) {
        let (lo, hi) = halving_ratios(&pair[0], &pair[1]);
        rows.push(CheckRow::within(format!("halving ratio min, dt {} -> {}", pair[0].dt, pair[1].dt), lo, 14.0, 18.0));
        rows.push(CheckRow::within(format!("halving ratio max, dt {} -> {}", pair[0].dt, pair[1].dt), hi, 14.0, 18.0));
    }
    rows.push(CheckRow::below("principle residual at dt 0.001", table[table.len() - 1].max_abs(), 1e-8));
    Ok((rows, table))
}
