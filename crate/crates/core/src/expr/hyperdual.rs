//! Second-order hyper-dual numbers.
//!
//! A [`HyperDual2`] carries `f(a + s·u + r·w)` truncated to the monomials
//! `1, s, r, s·r` of a scalar function along two probe directions `u` and `w`.
//! Lifting every primitive operation through this ring yields exact first
//! derivatives along `u` and `w` and the mixed second derivative `uᵀ·∇²f·w`,
//! with no step-size error.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Truncated Taylor coefficient set `(f, ∂_u f, ∂_w f, ∂_u ∂_w f)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HyperDual2 {
    pub val: f64,
    pub d1: f64,
    pub d2: f64,
    pub d12: f64,
}

impl HyperDual2 {
    pub const fn new(val: f64, d1: f64, d2: f64, d12: f64) -> Self {
        Self { val, d1, d2, d12 }
    }

    pub const fn constant(val: f64) -> Self {
        Self::new(val, 0.0, 0.0, 0.0)
    }

    /// Variable seeded along both probe directions with unit weights `(du, dw)`.
    pub const fn variable(val: f64, du: f64, dw: f64) -> Self {
        Self::new(val, du, dw, 0.0)
    }

    /// Lifts a scalar function given its value and first two derivatives at `self.val`.
    #[inline]
    pub fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        Self { val: f0, d1: f1 * self.d1, d2: f1 * self.d2, d12: f2 * self.d1 * self.d2 + f1 * self.d12 }
    }

    pub fn has_derivative_part(&self) -> bool {
        self.d1 != 0.0 || self.d2 != 0.0 || self.d12 != 0.0
    }

    pub fn recip(self) -> Self {
        let inv = 1.0 / self.val;
        self.chain(inv, -inv * inv, 2.0 * inv * inv * inv)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(self) -> Self {
        let e = self.val.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let inv = 1.0 / self.val;
        self.chain(self.val.ln(), inv, -inv * inv)
    }

    pub fn sqrt(self) -> Self {
        let r = self.val.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.val))
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(1.0),
            1 => self,
            _ => {
                let nf = f64::from(n);
                self.chain(self.val.powi(n), nf * self.val.powi(n - 1), nf * (nf - 1.0) * self.val.powi(n - 2))
            }
        }
    }

    pub fn powf(self, c: f64) -> Self {
        if c == 0.0 {
            return Self::constant(1.0);
        }
        if c == 1.0 {
            return self;
        }
        self.chain(self.val.powf(c), c * self.val.powf(c - 1.0), c * (c - 1.0) * self.val.powf(c - 2.0))
    }
}

impl From<f64> for HyperDual2 {
    fn from(v: f64) -> Self {
        Self::constant(v)
    }
}

impl Add for HyperDual2 {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.val + o.val, self.d1 + o.d1, self.d2 + o.d2, self.d12 + o.d12)
    }
}

impl Sub for HyperDual2 {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.val - o.val, self.d1 - o.d1, self.d2 - o.d2, self.d12 - o.d12)
    }
}

impl Mul for HyperDual2 {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self {
            val: self.val * o.val,
            d1: self.d1 * o.val + self.val * o.d1,
            d2: self.d2 * o.val + self.val * o.d2,
            d12: self.d12 * o.val + self.d1 * o.d2 + self.d2 * o.d1 + self.val * o.d12,
        }
    }
}

impl Div for HyperDual2 {
    type Output = Self;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for HyperDual2 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.val, -self.d1, -self.d2, -self.d12)
    }
}

impl fmt::Display for HyperDual2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}ε₁ + {}ε₂ + {}ε₁ε₂", self.val, self.d1, self.d2, self.d12)
    }
}

/// Number types an [`Expr`](super::Expr) can be evaluated over.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;
    fn value(&self) -> f64;
    /// True for types carrying derivative parts.
    const LIFTED: bool;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, c: f64) -> Self;
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    const LIFTED: bool = false;
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, c: f64) -> Self {
        f64::powf(self, c)
    }
}

impl Scalar for HyperDual2 {
    fn constant(v: f64) -> Self {
        HyperDual2::constant(v)
    }
    fn value(&self) -> f64 {
        self.val
    }
    const LIFTED: bool = true;
    fn sin(self) -> Self {
        HyperDual2::sin(self)
    }
    fn cos(self) -> Self {
        HyperDual2::cos(self)
    }
    fn exp(self) -> Self {
        HyperDual2::exp(self)
    }
    fn ln(self) -> Self {
        HyperDual2::ln(self)
    }
    fn sqrt(self) -> Self {
        HyperDual2::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        HyperDual2::powi(self, n)
    }
    fn powf(self, c: f64) -> Self {
        HyperDual2::powf(self, c)
    }
}
