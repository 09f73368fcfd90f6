//! Named one-variable formulas such as `2*x`, `x^2+1` or `3`.
//!
//! Rank functions and the growth functions of the regularization engine are
//! both configured this way.

use std::fmt;

use crate::error::{QfaError, Result};

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Num(f64),
    X,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Pow(a, b) => a.eval(x).powf(b.eval(x)),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> QfaError {
        QfaError::Parse(format!("{msg} at position {} in formula", self.pos))
    }

    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            lhs = if c == b'+' { Expr::Add(lhs.into(), rhs.into()) } else { Expr::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.power()?;
        while let Some(b'*') = self.peek() {
            self.pos += 1;
            let rhs = self.power()?;
            lhs = Expr::Mul(lhs.into(), rhs.into());
        }
        Ok(lhs)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(b'^') = self.peek() {
            self.pos += 1;
            let e = self.power()?;
            return Ok(Expr::Pow(base.into(), e.into()));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(Expr::X)
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'.') {
                    self.pos += 1;
                }
                let t = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                t.parse().map(Expr::Num).map_err(|_| self.err("bad number"))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

/// A parsed formula in one variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    text: String,
    expr: Expr,
}

impl Formula {
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { s: text.as_bytes(), pos: 0 };
        let expr = p.sum()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(Self { text: text.trim().to_string(), expr })
    }

    pub fn constant(c: f64) -> Self {
        Self { text: format!("{c}"), expr: Expr::Num(c) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.expr.eval(x)
    }

    /// Integer value, rounded up; used where the formula bounds a count.
    pub fn eval_ceil(&self, x: usize) -> usize {
        let v = self.eval(x as f64);
        if v <= 0.0 {
            0
        } else {
            v.ceil() as usize
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    fn check_on_prefix(&self, strict: bool) -> bool {
        (0..64).all(|x| {
            let (a, b) = (self.eval(x as f64), self.eval(x as f64 + 1.0));
            if strict {
                b > a
            } else {
                b >= a
            }
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// A strictly increasing map `N -> R_{>0}`, checked on `0..=64`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankFunction(Formula);

impl RankFunction {
    pub fn new(f: Formula) -> Result<Self> {
        if !f.check_on_prefix(true) || f.eval(0.0) <= 0.0 && f.eval(1.0) <= 0.0 {
            return Err(QfaError::Invalid(format!("rank function {f} is not strictly increasing and positive")));
        }
        Ok(Self(f))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(Formula::parse(text)?)
    }

    /// Required rank at complexity `x`.
    pub fn target(&self, x: usize) -> usize {
        self.0.eval_ceil(x)
    }

    pub fn formula(&self) -> &Formula {
        &self.0
    }
}

/// A non-decreasing integer map, checked on `0..=64`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFunction(Formula);

impl GrowthFunction {
    pub fn new(f: Formula) -> Result<Self> {
        if !f.check_on_prefix(false) {
            return Err(QfaError::Invalid(format!("growth function {f} is not monotone")));
        }
        Ok(Self(f))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(Formula::parse(text)?)
    }

    pub fn eval(&self, x: usize) -> usize {
        self.0.eval_ceil(x)
    }

    pub fn formula(&self) -> &Formula {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_shapes() {
        let cases = [("2*x", 3.0, 6.0), ("x^2", 3.0, 9.0), ("2*x+1", 2.0, 5.0), ("7", 1.0, 7.0), ("(x+1)*(x-1)", 3.0, 8.0)];
        for (t, x, want) in cases {
            assert_eq!(Formula::parse(t).unwrap().eval(x), want, "{t}");
        }
        assert!(Formula::parse("2*").is_err());
        assert!(Formula::parse("y").is_err());
    }

    #[test]
    fn monotonicity_checks() {
        assert!(RankFunction::parse("x+1").is_ok());
        assert!(RankFunction::parse("3").is_err());
        assert!(GrowthFunction::parse("3").is_ok());
        assert!(GrowthFunction::parse("10-x").is_err());
    }
}
