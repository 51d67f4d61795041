//! Plain-text expression grammar shared by scalars and graded elements.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := integer | 'i' | name | '(' expr ')' | 'e[' (index ('^' index)*)? ']'
//! ```
//!
//! `e[...]` atoms are basis monomials of a graded element (1-based indices)
//! and are rejected when a plain scalar is expected.

use super::coeff::Gaussian;
use super::rational::ScalarField;
use super::Chart;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    I,
    Var(usize),
    Basis(Vec<usize>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, i32, usize),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    chart: &'a Chart,
}

fn perr(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(perr(start, "expected integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| perr(start, "integer out of range"))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), at);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            let at = self.pos;
            self.pos += 1;
            let neg = self.eat(b'-');
            let e = self.integer()?;
            let e = i32::try_from(e).map_err(|_| perr(at, "exponent out of range"))?;
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }, at));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            None => Err(perr(start, "unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(perr(self.pos, "expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Int(self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if name == "e" && self.peek() == Some(b'[') {
                    self.pos += 1;
                    return self.basis(start);
                }
                if name == "i" {
                    return Ok(Expr::I);
                }
                match self.chart.index_of(name) {
                    Some(k) => Ok(Expr::Var(k)),
                    None => Err(perr(start, format!("unknown identifier '{}'", name))),
                }
            }
            Some(c) => Err(perr(start, format!("unexpected character '{}'", c as char))),
        }
    }

    fn basis(&mut self, start: usize) -> Result<Expr> {
        let mut idx = Vec::new();
        if self.eat(b']') {
            return Ok(Expr::Basis(idx));
        }
        loop {
            let at = self.pos;
            let k = self.integer()?;
            if k < 1 {
                return Err(perr(at, "basis indices are 1-based"));
            }
            idx.push(k as usize - 1);
            if self.eat(b']') {
                break;
            }
            if !self.eat(b'^') {
                return Err(perr(self.pos, "expected '^' or ']' in basis element"));
            }
        }
        if idx.is_empty() {
            return Err(perr(start, "empty basis element"));
        }
        Ok(Expr::Basis(idx))
    }
}

/// Parses an expression over the chart's coordinate names.
pub fn parse_expr(src: &str, chart: &Chart) -> Result<Expr> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        chart,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(perr(p.pos, "trailing input"));
    }
    Ok(e)
}

/// Evaluates an expression that must not contain basis atoms.
pub fn eval_scalar(e: &Expr) -> Result<ScalarField> {
    Ok(match e {
        Expr::Int(n) => ScalarField::from_int(*n),
        Expr::I => ScalarField::constant(Gaussian::i()),
        Expr::Var(k) => ScalarField::var(*k),
        Expr::Basis(_) => {
            return Err(perr(0, "basis element not allowed in a scalar expression"))
        }
        Expr::Neg(a) => -eval_scalar(a)?,
        Expr::Add(a, b) => eval_scalar(a)? + eval_scalar(b)?,
        Expr::Sub(a, b) => eval_scalar(a)? - eval_scalar(b)?,
        Expr::Mul(a, b) => eval_scalar(a)? * eval_scalar(b)?,
        Expr::Div(a, b, at) => eval_scalar(a)?
            .div(&eval_scalar(b)?)
            .map_err(|_| perr(*at, "division by the zero function"))?,
        Expr::Pow(a, k, at) => eval_scalar(a)?
            .pow(*k)
            .map_err(|_| perr(*at, "negative power of the zero function"))?,
    })
}

impl ScalarField {
    /// Parses the plain-text scalar grammar over the chart's coordinates.
    pub fn parse(src: &str, chart: &Chart) -> Result<ScalarField> {
        eval_scalar(&parse_expr(src, chart)?)
    }

    /// Renders using the chart's coordinate names; `parse` reads it back.
    pub fn to_expr_string(&self, chart: &Chart) -> String {
        self.fmt_with(&|k| chart.name(k).to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart {
        Chart::new(vec!["x".into(), "y".into()]).unwrap()
    }

    #[test]
    fn parses_precedence() {
        let c = chart();
        let f = ScalarField::parse("1 + 2*x^2 - y/2", &c).unwrap();
        let x = ScalarField::var(0);
        let y = ScalarField::var(1);
        let expect = ScalarField::one() + ScalarField::from_int(2) * &x * &x - y * ScalarField::from_ratio(1, 2);
        assert_eq!(f, expect);
    }

    #[test]
    fn negative_powers_and_i() {
        let c = chart();
        let f = ScalarField::parse("i*x^-1", &c).unwrap();
        assert_eq!(f, ScalarField::i().div(&ScalarField::var(0)).unwrap());
    }

    #[test]
    fn reports_positions() {
        let c = chart();
        match ScalarField::parse("x + z", &c) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{:?}", other),
        }
        assert!(matches!(ScalarField::parse("x/(y-y)", &c), Err(Error::Parse { pos: 1, .. })));
        assert!(ScalarField::parse("(x", &c).is_err());
        assert!(ScalarField::parse("e[1]", &c).is_err());
    }

    #[test]
    fn print_parse_roundtrip() {
        let c = chart();
        for s in ["0", "-x", "(1/2+i)*x^2*y - 3/4", "(x - i)/(y^2 + 1)", "-1/(2*x)", "-i*y + 2"] {
            let f = ScalarField::parse(s, &c).unwrap();
            let printed = f.to_expr_string(&c);
            assert_eq!(ScalarField::parse(&printed, &c).unwrap(), f, "{} -> {}", s, printed);
        }
    }
}
