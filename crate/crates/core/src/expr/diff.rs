//! Symbolic partial derivatives of expression trees.
//!
//! Only literal zeros and ones are pruned while building; no other rewriting
//! happens. Used where a derivative must itself be differentiated again, as in
//! nested Poisson brackets.

use super::ast::{BinOp, Expr, Func, Var};

fn add(a: Expr, b: Expr) -> Expr {
    if a.is_literal_zero() {
        b
    } else if b.is_literal_zero() {
        a
    } else {
        Expr::binary(BinOp::Add, a, b)
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if b.is_literal_zero() {
        a
    } else if a.is_literal_zero() {
        neg(b)
    } else {
        Expr::binary(BinOp::Sub, a, b)
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if a.is_literal_zero() || b.is_literal_zero() {
        Expr::zero()
    } else if a.is_literal(1.0) {
        b
    } else if b.is_literal(1.0) {
        a
    } else {
        Expr::binary(BinOp::Mul, a, b)
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if a.is_literal_zero() {
        Expr::zero()
    } else {
        Expr::binary(BinOp::Div, a, b)
    }
}

fn neg(a: Expr) -> Expr {
    if a.is_literal_zero() {
        Expr::zero()
    } else {
        Expr::Neg(Box::new(a))
    }
}

impl Expr {
    /// `∂self/∂var` as a new tree.
    pub fn diff(&self, var: Var) -> Expr {
        match self {
            Expr::Const(_) | Expr::Param(_) => Expr::zero(),
            Expr::Var(v) => Expr::Const(if *v == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.diff(var)),
            Expr::Binary(op, a, b) => {
                let da = a.diff(var);
                match op {
                    BinOp::Add => add(da, b.diff(var)),
                    BinOp::Sub => sub(da, b.diff(var)),
                    BinOp::Mul => {
                        let db = b.diff(var);
                        add(mul(da, (**b).clone()), mul((**a).clone(), db))
                    }
                    BinOp::Div => {
                        // (a/b)' = a'/b - a b' / b^2
                        let db = b.diff(var);
                        let first = div(da, (**b).clone());
                        if db.is_literal_zero() {
                            return first;
                        }
                        let b2 = Expr::binary(BinOp::Pow, (**b).clone(), Expr::Const(2.0));
                        sub(first, div(mul((**a).clone(), db), b2))
                    }
                    BinOp::Pow => {
                        // exponent is variable-free: (a^c)' = c a^(c-1) a'
                        if da.is_literal_zero() {
                            return Expr::zero();
                        }
                        let c = (**b).clone();
                        let c_minus_one = match &c {
                            Expr::Const(k) => Expr::Const(k - 1.0),
                            _ => Expr::binary(BinOp::Sub, c.clone(), Expr::Const(1.0)),
                        };
                        let lowered = Expr::binary(BinOp::Pow, (**a).clone(), c_minus_one);
                        mul(mul(c, lowered), da)
                    }
                }
            }
            Expr::Call(func, a) => {
                let da = a.diff(var);
                if da.is_literal_zero() {
                    return Expr::zero();
                }
                let arg = (**a).clone();
                let outer = match func {
                    Func::Sin => Expr::call(Func::Cos, arg),
                    Func::Cos => neg(Expr::call(Func::Sin, arg)),
                    Func::Exp => Expr::call(Func::Exp, arg),
                    Func::Ln => div(Expr::Const(1.0), arg),
                    Func::Sqrt => div(Expr::Const(0.5), Expr::call(Func::Sqrt, arg)),
                };
                mul(outer, da)
            }
        }
    }
}
