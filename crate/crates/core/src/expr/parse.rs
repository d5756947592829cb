//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' unary)?          right-associative, exponent variable-free
//! atom  := number | ident | func '(' expr ')' | '(' expr ')'
//! ```

use std::collections::BTreeSet;

use super::ast::{BinOp, Expr, Func, Var};
use crate::error::ExprError;

/// Which identifiers an expression may reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scope {
    pub dim: usize,
    pub allow_x: bool,
    pub allow_v: bool,
    pub allow_p: bool,
    pub allow_t: bool,
    pub params: BTreeSet<String>,
}

impl Scope {
    fn with(dim: usize, params: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            dim,
            allow_x: false,
            allow_v: false,
            allow_p: false,
            allow_t: false,
            params: params.into_iter().map(Into::into).collect(),
        }
    }

    /// Functions on the tangent bundle: `x1..xm`, `v1..vm`.
    pub fn tangent(dim: usize, params: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { allow_x: true, allow_v: true, ..Self::with(dim, params) }
    }

    /// Functions on the cotangent bundle: `x1..xm`, `p1..pm`.
    pub fn phase(dim: usize, params: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { allow_x: true, allow_p: true, ..Self::with(dim, params) }
    }

    /// Functions of time only: force schedules, variations, desired paths.
    pub fn time(params: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { allow_t: true, ..Self::with(0, params) }
    }
}

pub fn parse(text: &str, scope: &Scope) -> Result<Expr, ExprError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, scope, end: text.len() };
    if parser.tokens.is_empty() {
        return Err(ExprError::Syntax { offset: 0, message: "empty expression".into() });
    }
    let expr = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(ExprError::Syntax { offset: tok.offset, message: format!("unexpected {}", tok.kind.describe()) });
    }
    Ok(expr)
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(n) => format!("number {n}"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Op(c) => format!("`{c}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token { kind: TokenKind::Op(c as char), offset: start });
                i += 1;
            }
            b'(' => {
                out.push(Token { kind: TokenKind::LParen, offset: start });
                i += 1;
            }
            b')' => {
                out.push(Token { kind: TokenKind::RParen, offset: start });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let value: f64 = lit
                    .parse()
                    .map_err(|_| ExprError::Syntax { offset: start, message: format!("malformed number `{lit}`") })?;
                if !value.is_finite() {
                    return Err(ExprError::Syntax { offset: start, message: format!("number `{lit}` is not finite") });
                }
                out.push(Token { kind: TokenKind::Number(value), offset: start });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token { kind: TokenKind::Ident(text[start..i].to_string()), offset: start });
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax { offset: start, message: format!("unexpected character `{ch}`") });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    scope: &'a Scope,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        tok
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token { kind: TokenKind::Op(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let offset = self.offset();
            let exponent = self.unary()?;
            if !exponent.is_variable_free() {
                return Err(ExprError::NonConstantExponent { offset });
            }
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        let Some(tok) = self.next() else {
            return Err(ExprError::Syntax { offset, message: "unexpected end of input".into() });
        };
        match tok.kind {
            TokenKind::Number(v) => Ok(Expr::Const(v)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    match self.next() {
                        Some(Token { kind: TokenKind::LParen, .. }) => {}
                        _ => {
                            return Err(ExprError::Syntax {
                                offset: tok.offset,
                                message: format!("function `{name}` must be followed by `(`"),
                            })
                        }
                    }
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::call(func, arg));
                }
                self.identifier(name, tok.offset)
            }
            other => Err(ExprError::Syntax { offset: tok.offset, message: format!("unexpected {}", other.describe()) }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        let offset = self.offset();
        match self.next() {
            Some(Token { kind: TokenKind::RParen, .. }) => Ok(()),
            _ => Err(ExprError::Syntax { offset, message: "expected `)`".into() }),
        }
    }

    fn identifier(&self, name: String, offset: usize) -> Result<Expr, ExprError> {
        let scope = self.scope;
        if name == "t" && scope.allow_t {
            return Ok(Expr::Var(Var::T));
        }
        if let Some((kind, index)) = split_indexed(&name) {
            let allowed = match kind {
                'x' => scope.allow_x,
                'v' => scope.allow_v,
                'p' => scope.allow_p,
                _ => false,
            };
            if allowed {
                if index == 0 || index > scope.dim {
                    return Err(ExprError::VariableOutOfRange { name, offset, dim: scope.dim });
                }
                let i = index - 1;
                return Ok(Expr::Var(match kind {
                    'x' => Var::X(i),
                    'v' => Var::V(i),
                    _ => Var::P(i),
                }));
            }
        }
        if scope.params.contains(&name) {
            return Ok(Expr::Param(name));
        }
        Err(ExprError::UnknownIdentifier { name, offset })
    }
}

/// Splits `x12` into `('x', 12)`; rejects leading zeros other than `x0` itself.
fn split_indexed(name: &str) -> Option<(char, usize)> {
    let mut chars = name.chars();
    let kind = chars.next()?;
    if !matches!(kind, 'x' | 'v' | 'p') {
        return None;
    }
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().map(|i| (kind, i))
}
