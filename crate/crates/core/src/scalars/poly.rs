//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! Monomials are exponent vectors with trailing zeros trimmed, so polynomials
//! in different numbers of variables compare and combine without padding.
//! The term order is graded lexicographic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::coeff::Gaussian;

/// Exponent vector, trailing zeros removed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(k: usize) -> Self {
        let mut e = vec![0; k + 1];
        e[k] = 1;
        Monomial(e)
    }

    pub fn from_exponents(mut e: Vec<u16>) -> Self {
        while e.last() == Some(&0) {
            e.pop();
        }
        Monomial(e)
    }

    pub fn exponent(&self, k: usize) -> u16 {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let e = (0..n).map(|k| self.exponent(k) + other.exponent(k)).collect();
        Monomial::from_exponents(e)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut e = self.0.clone();
        for (k, &o) in other.0.iter().enumerate() {
            if e[k] < o {
                return None;
            }
            e[k] -= o;
        }
        Some(Monomial::from_exponents(e))
    }

    fn with_exponent(&self, k: usize, value: u16) -> Monomial {
        let mut e = self.0.clone();
        if e.len() <= k {
            e.resize(k + 1, 0);
        }
        e[k] = value;
        Monomial::from_exponents(e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for k in 0..n {
                match self.exponent(k).cmp(&other.exponent(k)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Gaussian>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Gaussian) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn one() -> Self {
        Poly::constant(Gaussian::one())
    }

    pub fn var(k: usize) -> Self {
        Poly::monomial(Monomial::var(k), Gaussian::one())
    }

    pub fn monomial(m: Monomial, c: Gaussian) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Gaussian)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Monomial::one()))
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::one())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn constant_value(&self) -> Option<Gaussian> {
        if self.is_zero() {
            Some(Gaussian::zero())
        } else if self.is_constant() {
            self.terms.get(&Monomial::one()).cloned()
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Number of variable slots used (one past the highest variable index).
    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Gaussian)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Gaussian {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_default()
    }

    fn add_term(&mut self, m: Monomial, c: Gaussian) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Gaussian) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Gaussian) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn conj(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }

    pub fn derivative(&self, k: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(k);
            if e == 0 {
                continue;
            }
            let nm = m.with_exponent(k, e - 1);
            out.add_term(nm, c * &Gaussian::from_int(e as i64));
        }
        out
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.inv()?));
        }
        let (lm, lc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.div(&lm)?;
            let qc = &c * &lc_inv;
            rem = rem.sub(&divisor.mul_monomial(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub fn degree_in(&self, k: usize) -> u16 {
        self.terms.keys().map(|m| m.exponent(k)).max().unwrap_or(0)
    }

    /// View as a polynomial in variable `k` with coefficients free of `k`.
    pub(crate) fn to_univariate(&self, k: usize) -> Vec<Poly> {
        let d = self.degree_in(k) as usize;
        let mut out = vec![Poly::zero(); d + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(k) as usize;
            out[e].add_term(m.with_exponent(k, 0), c.clone());
        }
        out
    }

    pub(crate) fn from_univariate(k: usize, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (e, p) in coeffs.iter().enumerate() {
            for (m, c) in &p.terms {
                out.add_term(m.with_exponent(k, e as u16), c.clone());
            }
        }
        out
    }

    /// Evaluates the polynomial, substituting `values[k]` for variable `k`.
    pub fn eval(&self, values: &[Gaussian]) -> Gaussian {
        let mut acc = Gaussian::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, &e) in m.0.iter().enumerate() {
                let v = values.get(k).cloned().unwrap_or_default();
                for _ in 0..e {
                    t = &t * &v;
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn fmt_with(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(k, &e)| {
                    if e == 1 {
                        names(k)
                    } else {
                        format!("{}^{}", names(k), e)
                    }
                })
                .collect();
            let (neg, mag) = if c.is_negative_real() {
                (true, -c)
            } else {
                (false, c.clone())
            };
            let coeff = if mag.needs_parens() {
                format!("({})", mag)
            } else {
                mag.to_string()
            };
            let body = if mono.is_empty() {
                coeff
            } else if mag.is_one() {
                mono.join("*")
            } else {
                format!("{}*{}", coeff, mono.join("*"))
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&body);
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&|k| format!("x{}", k + 1)))
    }
}

/// Greatest common divisor, normalized monic (zero only if both inputs are).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let nv = a.num_vars().max(b.num_vars());
    // Main variable: the highest-index one present in both, else reduce to content.
    let var = (0..nv)
        .rev()
        .find(|&k| a.degree_in(k) > 0 || b.degree_in(k) > 0)
        .expect("non-constant polynomial has a variable");
    let da = a.degree_in(var);
    let db = b.degree_in(var);
    if da == 0 {
        return gcd(a, &content(b, var));
    }
    if db == 0 {
        return gcd(&content(a, var), b);
    }
    let ca = content(a, var);
    let cb = content(b, var);
    let c = gcd(&ca, &cb);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    let g = primitive_prs(pa, pb, var);
    c.mul(&g).monic()
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `var`.
fn content(p: &Poly, var: usize) -> Poly {
    let coeffs = p.to_univariate(var);
    let mut g = Poly::zero();
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_part(p: &Poly, var: usize) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    let c = content(p, var);
    p.exact_div(&c).expect("content divides")
}

fn primitive_prs(mut a: Poly, mut b: Poly, var: usize) -> Poly {
    if a.degree_in(var) < b.degree_in(var) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.is_zero() {
            return primitive_part(&a, var).monic();
        }
        if b.degree_in(var) == 0 {
            return Poly::one();
        }
        let r = pseudo_rem(&a, &b, var);
        a = b;
        b = primitive_part(&r, var);
    }
}

fn pseudo_rem(a: &Poly, b: &Poly, var: usize) -> Poly {
    let bu = b.to_univariate(var);
    let db = bu.len() - 1;
    let lcb = bu[db].clone();
    let mut r = a.to_univariate(var);
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lcr = r[dr].clone();
        if lcr.is_zero() {
            r.pop();
            continue;
        }
        let shift = dr - db;
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(&lcb)).collect();
        for (e, c) in bu.iter().enumerate() {
            next[e + shift] = next[e + shift].sub(&c.mul(&lcr));
        }
        while next.last().map(|c| c.is_zero()).unwrap_or(false) {
            next.pop();
        }
        r = next;
    }
    Poly::from_univariate(var, &r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(k: usize) -> Poly {
        Poly::var(k)
    }

    fn c(n: i64) -> Poly {
        Poly::constant(Gaussian::from_int(n))
    }

    #[test]
    fn univariate_gcd() {
        // x^2 - 1 and x - 1
        let a = x(0).mul(&x(0)).sub(&c(1));
        let b = x(0).sub(&c(1));
        assert_eq!(gcd(&a, &b), b);
    }

    #[test]
    fn multivariate_gcd_common_factor() {
        let f = x(0).add(&x(1)).add(&c(1));
        let g1 = x(0).mul(&x(2)).sub(&x(1));
        let g2 = x(2).mul(&x(2)).add(&x(0));
        let a = f.mul(&g1);
        let b = f.mul(&g2);
        assert_eq!(gcd(&a, &b), f.monic());
    }

    #[test]
    fn gcd_over_gaussian_coefficients() {
        // (x + i y)(x - i y) = x^2 + y^2 ; gcd with x + i y
        let i = Poly::constant(Gaussian::i());
        let p = x(0).add(&i.mul(&x(1)));
        let q = x(0).sub(&i.mul(&x(1)));
        let prod = p.mul(&q);
        assert_eq!(prod, x(0).mul(&x(0)).add(&x(1).mul(&x(1))));
        assert_eq!(gcd(&prod, &p), p.monic());
        assert!(gcd(&p, &q).is_one());
    }

    #[test]
    fn exact_division_detects_remainder() {
        let a = x(0).mul(&x(0)).add(&c(1));
        assert!(a.exact_div(&x(0)).is_none());
        let q = a.mul(&x(1)).exact_div(&x(1)).unwrap();
        assert_eq!(q, a);
    }

    #[test]
    fn derivative_power_rule() {
        let p = x(0).pow(3).mul(&x(1));
        assert_eq!(p.derivative(0), x(0).pow(2).mul(&x(1)).scale(&Gaussian::from_int(3)));
        assert!(p.derivative(2).is_zero());
    }

    #[test]
    fn monomial_order_is_graded() {
        assert!(Monomial::var(0) < Monomial::var(0).mul(&Monomial::var(3)));
        assert!(Monomial::var(1) < Monomial::var(0));
    }
}
