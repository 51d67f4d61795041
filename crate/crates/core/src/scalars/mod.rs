//! Exact coefficient field: rational functions in the chart coordinates with
//! Gaussian-rational coefficients.

mod coeff;
mod parse;
mod poly;
mod rational;

pub use coeff::Gaussian;
pub use parse::{eval_scalar, parse_expr, Expr};
pub use poly::{gcd, Monomial, Poly};
pub use rational::ScalarField;

use crate::error::{Error, Result};

/// A single coordinate chart of dimension `m`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidChart("dimension must be at least 1".into()));
        }
        for (k, n) in names.iter().enumerate() {
            let valid = n
                .chars()
                .next()
                .map(|c| c.is_ascii_alphabetic() || c == '_')
                .unwrap_or(false)
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || n == "i" || n == "e" {
                return Err(Error::InvalidChart(format!("invalid coordinate name '{}'", n)));
            }
            if names[..k].contains(n) {
                return Err(Error::InvalidChart(format!("duplicate coordinate name '{}'", n)));
            }
        }
        Ok(Chart { names })
    }

    /// Chart with coordinates `x1, ..., xm`.
    pub fn standard(dim: usize) -> Self {
        Chart::new((1..=dim).map(|k| format!("x{}", k)).collect()).expect("valid names")
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, k: usize) -> &str {
        &self.names[k]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coordinate(&self, k: usize) -> Result<ScalarField> {
        if k >= self.dim() {
            return Err(Error::IndexOutOfRange { index: k, bound: self.dim() });
        }
        Ok(ScalarField::var(k))
    }

    /// Bounds-checked partial derivative.
    pub fn partial(&self, f: &ScalarField, k: usize) -> Result<ScalarField> {
        if k >= self.dim() {
            return Err(Error::IndexOutOfRange { index: k, bound: self.dim() });
        }
        Ok(f.partial(k))
    }

    /// All monomials in the chart coordinates of total degree `1..=max_degree`.
    pub fn monomials(&self, max_degree: u32) -> Vec<ScalarField> {
        let mut out = Vec::new();
        fn rec(dim: usize, k: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
            if k == dim {
                out.push(Monomial::from_exponents(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur.push(e as u16);
                rec(dim, k + 1, left - e, cur, out);
                cur.pop();
            }
        }
        let mut monos = Vec::new();
        rec(self.dim(), 0, max_degree, &mut Vec::new(), &mut monos);
        monos.sort();
        for m in monos.into_iter().filter(|m| !m.is_one()) {
            out.push(ScalarField::from_poly(Poly::monomial(m, Gaussian::one())));
        }
        out
    }
}
