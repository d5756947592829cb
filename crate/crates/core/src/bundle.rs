//! Coordinate points of the iterated bundles over a configuration space and
//! the canonical maps between them.
//!
//! Every point is a plain record of coordinate tuples in one global chart.
//! Slot naming follows the induced charts:
//!
//! | type | bundle | slots |
//! |------|--------|-------|
//! | [`TangentVector`] | TM | `(x, v)` |
//! | [`Covector`] | T*M | `(x, p)` |
//! | [`SecondTangent`] | T²M | `(x, v, a)` |
//! | [`TTPoint`] | TTM | `(x, v, dx, dv)`, base point `(x, v)` |
//! | [`TTStarPoint`] | TT*M | `(x, p, v, pdot)`, base point `(x, p)` |
//! | [`TStarTPoint`] | T*TM | `(x, v, a, b)`, base point `(x, v)` |
//! | [`TStarTStarPoint`] | T*T*M | `(x, p, y, z)`, base point `(x, p)` |
//! | [`TT2Point`] | TT²M | `(x, v, a, dx, dv, da)`, base point `(x, v, a)` |
//!
//! For a [`TTPoint`] the second projection (the tangent map of the bundle
//! projection) is `(x, dx)`; [`kappa11`] exchanges the two.

use crate::error::{check_len, Error, Result};

macro_rules! point {
    ($(#[$meta:meta])* $name:ident { $($field:ident),+ }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Default)]
        pub struct $name {
            $(pub $field: Vec<f64>,)+
        }

        impl $name {
            /// Builds a point, checking that every tuple has the same length.
            pub fn new($($field: Vec<f64>),+) -> Result<Self> {
                let lens = [$($field.len()),+];
                for len in lens {
                    check_len(stringify!($name), lens[0], len)?;
                }
                Ok(Self { $($field),+ })
            }

            pub fn zeros(dim: usize) -> Self {
                Self { $($field: vec![0.0; dim]),+ }
            }

            pub fn dim(&self) -> usize {
                self.x.len()
            }
        }
    };
}

point!(
    /// Velocity `(x, v)` at a configuration.
    TangentVector { x, v }
);
point!(
    /// Covector `(x, p)`: a momentum or a force at a configuration.
    Covector { x, p }
);
point!(
    /// Second-order germ `(x, v, a)`.
    SecondTangent { x, v, a }
);
point!(TTPoint { x, v, dx, dv });
point!(TTStarPoint { x, p, v, pdot });
point!(TStarTPoint { x, v, a, b });
point!(TStarTStarPoint { x, p, y, z });
point!(TT2Point { x, v, a, dx, dv, da });
point!(
    /// An external force and a momentum over one configuration.
    ForceMomentumSample { x, f, p }
);

/// Coordinate increments of a tangent vector to TT*M at some point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TTStarIncrement {
    pub dx: Vec<f64>,
    pub dp: Vec<f64>,
    pub dv: Vec<f64>,
    pub dpdot: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn same(what: &'static str, a: &[f64], b: &[f64]) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::BaseMismatch(what))
    }
}

impl TTStarPoint {
    /// Projection onto T*M.
    pub fn base(&self) -> Covector {
        Covector { x: self.x.clone(), p: self.p.clone() }
    }

    /// Tangent projection onto TM.
    pub fn tangent_base(&self) -> TangentVector {
        TangentVector { x: self.x.clone(), v: self.v.clone() }
    }
}

impl TStarTPoint {
    pub fn base(&self) -> TangentVector {
        TangentVector { x: self.x.clone(), v: self.v.clone() }
    }
}

impl TTPoint {
    pub fn base(&self) -> TangentVector {
        TangentVector { x: self.x.clone(), v: self.v.clone() }
    }

    /// Image under the tangent map of the bundle projection.
    pub fn tangent_base(&self) -> TangentVector {
        TangentVector { x: self.x.clone(), v: self.dx.clone() }
    }
}

impl TStarTStarPoint {
    pub fn base(&self) -> Covector {
        Covector { x: self.x.clone(), p: self.p.clone() }
    }
}

impl ForceMomentumSample {
    pub fn force(&self) -> Covector {
        Covector { x: self.x.clone(), p: self.f.clone() }
    }

    pub fn momentum(&self) -> Covector {
        Covector { x: self.x.clone(), p: self.p.clone() }
    }
}

/// Canonical involution of TTM: swaps `v` and `dx`.
pub fn kappa11(w: &TTPoint) -> TTPoint {
    TTPoint { x: w.x.clone(), v: w.dx.clone(), dx: w.v.clone(), dv: w.dv.clone() }
}

/// `α_M : TT*M → T*TM`, `(x, p, v, pdot) ↦ (x, v, a = pdot, b = p)`.
pub fn alpha(z: &TTStarPoint) -> TStarTPoint {
    TStarTPoint { x: z.x.clone(), v: z.v.clone(), a: z.pdot.clone(), b: z.p.clone() }
}

pub fn alpha_inv(s: &TStarTPoint) -> TTStarPoint {
    TTStarPoint { x: s.x.clone(), p: s.b.clone(), v: s.v.clone(), pdot: s.a.clone() }
}

/// `β : TT*M → T*T*M`, `(x, p, v, pdot) ↦ (x, p, y = pdot, z = -v)`.
pub fn beta(z: &TTStarPoint) -> TStarTStarPoint {
    TStarTStarPoint { x: z.x.clone(), p: z.p.clone(), y: z.pdot.clone(), z: z.v.iter().map(|v| -v).collect() }
}

pub fn beta_inv(b: &TStarTStarPoint) -> TTStarPoint {
    TTStarPoint { x: b.x.clone(), p: b.p.clone(), v: b.z.iter().map(|z| -z).collect(), pdot: b.y.clone() }
}

/// Vertical endomorphism `F(1;1)` of TTM: `(x, v, dx, dv) ↦ (x, v, 0, dx)`.
pub fn f11(w: &TTPoint) -> TTPoint {
    TTPoint { x: w.x.clone(), v: w.v.clone(), dx: vec![0.0; w.dim()], dv: w.dx.clone() }
}

/// `F(2;1)` on TT²M: `(dx, dv, da) ↦ (0, dx, 2 dv)`.
///
/// The factor 2 follows from `F(k;n)` acting on the `s`-derivative of
/// `θ(s·tⁿ, t)`; it is what makes `F(2;1)∘F(2;1) = F(2;2)`.
pub fn f21(w: &TT2Point) -> TT2Point {
    TT2Point {
        x: w.x.clone(),
        v: w.v.clone(),
        a: w.a.clone(),
        dx: vec![0.0; w.dim()],
        dv: w.dx.clone(),
        da: w.dv.iter().map(|d| 2.0 * d).collect(),
    }
}

/// `F(2;2)` on TT²M: `(dx, dv, da) ↦ (0, 0, 2 dx)`.
pub fn f22(w: &TT2Point) -> TT2Point {
    TT2Point {
        x: w.x.clone(),
        v: w.v.clone(),
        a: w.a.clone(),
        dx: vec![0.0; w.dim()],
        dv: vec![0.0; w.dim()],
        da: w.dx.iter().map(|d| 2.0 * d).collect(),
    }
}

/// `T(1) : T²M → TTM`, `(x, v, a) ↦ (x, v, v, a)`.
pub fn tangent_lift_t1(s: &SecondTangent) -> TTPoint {
    TTPoint { x: s.x.clone(), v: s.v.clone(), dx: s.v.clone(), dv: s.a.clone() }
}

/// Vertical lift of a force at a momentum: `(x, f, p) ↦ (x, p, 0, f)`.
pub fn mu(f: &Covector, p: &Covector) -> Result<TTStarPoint> {
    same("force and momentum must share a configuration", &f.x, &p.x)?;
    Ok(TTStarPoint { x: p.x.clone(), p: p.p.clone(), v: vec![0.0; p.dim()], pdot: f.p.clone() })
}

/// Removes a force from the momentum rate: `(x, p, v, pdot) ↦ (x, p, v, pdot - f)`.
pub fn chi(f: &Covector, w: &TTStarPoint) -> Result<TTStarPoint> {
    same("force and tangent vector must share a configuration", &f.x, &w.x)?;
    Ok(TTStarPoint {
        x: w.x.clone(),
        p: w.p.clone(),
        v: w.v.clone(),
        pdot: w.pdot.iter().zip(&f.p).map(|(pd, fk)| pd - fk).collect(),
    })
}

/// `⟨f, v⟩ = Σ f_k v^k`.
pub fn pair_t(f: &Covector, v: &TangentVector) -> Result<f64> {
    same("covector and vector must share a configuration", &f.x, &v.x)?;
    Ok(dot(&f.p, &v.v))
}

/// Pairing of T*TM with TTM over TM: `Σ a_k dx^k + b_k dv^k`.
pub fn pair_tt(z: &TStarTPoint, w: &TTPoint) -> Result<f64> {
    same("T*TM and TTM points must share x", &z.x, &w.x)?;
    same("T*TM and TTM points must share v", &z.v, &w.v)?;
    Ok(dot(&z.a, &w.dx) + dot(&z.b, &w.dv))
}

/// Tangent pairing of TT*M with TTM.
///
/// Both must lie over the same vector of TM: `z.v` must equal the tangent
/// projection `w.dx`. The value is `Σ pdot_k w.v^k + p_k w.dv^k`, i.e. the
/// time derivative of `⟨η, δξ⟩` when `z` and `w` are prolongations of curves
/// `η` and `δξ`.
pub fn tangent_pair(z: &TTStarPoint, w: &TTPoint) -> Result<f64> {
    same("TT*M and TTM points must share x", &z.x, &w.x)?;
    same("TT*M velocity must equal the tangent projection of the TTM point", &z.v, &w.dx)?;
    Ok(dot(&z.pdot, &w.v) + dot(&z.p, &w.dv))
}

/// Pairing of T*T*M with TT*M over T*M: `Σ y_k v^k + z^k pdot_k`.
pub fn pair_tsts(b: &TStarTStarPoint, z: &TTStarPoint) -> Result<f64> {
    same("T*T*M and TT*M points must share x", &b.x, &z.x)?;
    same("T*T*M and TT*M points must share p", &b.p, &z.p)?;
    Ok(dot(&b.y, &z.v) + dot(&b.z, &z.pdot))
}

/// Liouville form `p dx` evaluated on a tangent vector of T*M.
pub fn liouville_theta(w: &TTStarPoint) -> f64 {
    dot(&w.p, &w.v)
}

/// Symplectic form `dp ∧ dx` on two tangent vectors of T*M at one point.
pub fn omega(u: &TTStarPoint, u2: &TTStarPoint) -> Result<f64> {
    same("tangent vectors must share x", &u.x, &u2.x)?;
    same("tangent vectors must share p", &u.p, &u2.p)?;
    Ok(dot(&u.pdot, &u2.v) - dot(&u.v, &u2.pdot))
}

/// `d_T θ_M = pdot dx + p dv` on a direction in TT*M.
pub fn dt_theta(w: &TTStarPoint, dir: &TTStarIncrement) -> f64 {
    dot(&w.pdot, &dir.dx) + dot(&w.p, &dir.dv)
}

/// `i_T ω_M = pdot dx - v dp` on a direction in TT*M.
pub fn it_omega(w: &TTStarPoint, dir: &TTStarIncrement) -> f64 {
    dot(&w.pdot, &dir.dx) - dot(&w.v, &dir.dp)
}

/// `G_M = Σ p_k v^k`.
pub fn g_m(w: &TTStarPoint) -> f64 {
    dot(&w.p, &w.v)
}

/// Differential of [`g_m`]: `v dp + p dv`.
pub fn dg_m(w: &TTStarPoint, dir: &TTStarIncrement) -> f64 {
    dot(&w.v, &dir.dp) + dot(&w.p, &dir.dv)
}
