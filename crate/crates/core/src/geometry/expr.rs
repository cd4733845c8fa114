//! Small expression grammar for conformal factors: `+ - * / ^`, `exp(..)`,
//! `pow(a, b)`, numeric literals and the chart variables `t`, `x`.
//!
//! Expressions evaluate in any scalar type and differentiate symbolically,
//! so conformally flat metrics get exact Christoffel symbols instead of
//! finite-difference ones.

use crate::scalar::Real;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Clone, Debug)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Exp(Arc<Expr>),
    Pow(Arc<Expr>, Arc<Expr>),
    /// Not part of the surface grammar; produced by differentiating pow.
    Ln(Arc<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    T,
    X,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("unexpected character '{0}' at byte {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("expected '{0}' at byte {1}")]
    Expected(char, usize),
    #[error("trailing input at byte {0}")]
    Trailing(usize),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(ParseError::Trailing(p.pos));
        }
        Ok(e)
    }

    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn eval<T: Real>(&self, t: T, x: T) -> T {
        match self {
            Expr::Const(c) => T::lit(*c),
            Expr::Var(Var::T) => t,
            Expr::Var(Var::X) => x,
            Expr::Add(a, b) => a.eval(t, x) + b.eval(t, x),
            Expr::Sub(a, b) => a.eval(t, x) - b.eval(t, x),
            Expr::Mul(a, b) => a.eval(t, x) * b.eval(t, x),
            Expr::Div(a, b) => a.eval(t, x) / b.eval(t, x),
            Expr::Exp(a) => a.eval(t, x).exp(),
            Expr::Pow(a, b) => a.eval(t, x).powf(b.eval(t, x)),
            Expr::Ln(a) => a.eval(t, x).ln(),
        }
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, v: Var) -> Expr {
        use Expr::*;
        match self {
            Const(_) => Const(0.0),
            Var(w) => Const(if *w == v { 1.0 } else { 0.0 }),
            Add(a, b) => Add(Arc::new(a.diff(v)), Arc::new(b.diff(v))),
            Sub(a, b) => Sub(Arc::new(a.diff(v)), Arc::new(b.diff(v))),
            Mul(a, b) => Add(
                Arc::new(Mul(Arc::new(a.diff(v)), b.clone())),
                Arc::new(Mul(a.clone(), Arc::new(b.diff(v)))),
            ),
            Div(a, b) => Div(
                Arc::new(Sub(
                    Arc::new(Mul(Arc::new(a.diff(v)), b.clone())),
                    Arc::new(Mul(a.clone(), Arc::new(b.diff(v)))),
                )),
                Arc::new(Mul(b.clone(), b.clone())),
            ),
            Exp(a) => Mul(Arc::new(Exp(a.clone())), Arc::new(a.diff(v))),
            // d(a^b) = a^b (b' ln a + b a'/a)
            Pow(a, b) => {
                let t1 = Mul(Arc::new(b.diff(v)), Arc::new(Ln(a.clone())));
                let t2 = Mul(
                    b.clone(),
                    Arc::new(Div(Arc::new(a.diff(v)), a.clone())),
                );
                Mul(
                    Arc::new(Pow(a.clone(), b.clone())),
                    Arc::new(Add(Arc::new(t1), Arc::new(t2))),
                )
            }
            Ln(a) => Div(Arc::new(a.diff(v)), a.clone()),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    e = Expr::Add(Arc::new(e), Arc::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    e = Expr::Sub(Arc::new(e), Arc::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    e = Expr::Mul(Arc::new(e), Arc::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    e = Expr::Div(Arc::new(e), Arc::new(self.unary()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let e = self.unary()?;
            return Ok(Expr::Sub(Arc::new(Expr::Const(0.0)), Arc::new(e)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Arc::new(base), Arc::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(ParseError::UnexpectedEnd),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(ParseError::UnexpectedChar(c as char, self.pos)),
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::Expected(c as char, self.pos))
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit()
                || self.src[self.pos] == b'.'
                || ((self.src[self.pos] == b'e' || self.src[self.pos] == b'E')
                    && self.pos + 1 < self.src.len()
                    && (self.src[self.pos + 1].is_ascii_digit()
                        || self.src[self.pos + 1] == b'-'
                        || self.src[self.pos + 1] == b'+'))
                || ((self.src[self.pos] == b'-' || self.src[self.pos] == b'+')
                    && self.pos > start
                    && (self.src[self.pos - 1] == b'e' || self.src[self.pos - 1] == b'E')))
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| ParseError::UnexpectedChar(self.src[start] as char, start))
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "t" => Ok(Expr::Var(Var::T)),
            "x" => Ok(Expr::Var(Var::X)),
            "exp" => {
                self.expect(b'(')?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Exp(Arc::new(e)))
            }
            "pow" => {
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Pow(Arc::new(a), Arc::new(b)))
            }
            _ => Err(ParseError::UnexpectedChar(self.src[start] as char, start)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(Var::T) => write!(f, "t"),
            Expr::Var(Var::X) => write!(f, "x"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Pow(a, b) => write!(f, "pow({a}, {b})"),
            Expr::Ln(a) => write!(f, "ln({a})"),
        }
    }
}
