//! Rational functions over `ℚ(i)` in canonical form.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock};

use super::coeff::Gaussian;
use super::poly::{gcd, Poly};
use crate::error::{Error, Result};

/// An exact scalar function on the chart: `numerator / denominator`.
///
/// Canonical form: `gcd(num, den) = 1` and `den` is monic in graded-lex
/// order; zero is `0 / 1`. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ScalarField {
    num: Arc<Poly>,
    den: Arc<Poly>,
}

fn shared_one() -> Arc<Poly> {
    static ONE: OnceLock<Arc<Poly>> = OnceLock::new();
    ONE.get_or_init(|| Arc::new(Poly::one())).clone()
}

fn shared_zero() -> Arc<Poly> {
    static ZERO: OnceLock<Arc<Poly>> = OnceLock::new();
    ZERO.get_or_init(|| Arc::new(Poly::zero())).clone()
}

impl Default for ScalarField {
    fn default() -> Self {
        ScalarField::zero()
    }
}

impl ScalarField {
    fn raw(num: Poly, den: Poly) -> Self {
        let den = if den.is_one() { shared_one() } else { Arc::new(den) };
        let num = if num.is_zero() { shared_zero() } else { Arc::new(num) };
        ScalarField { num, den }
    }

    fn with_den(num: Poly, den: &Arc<Poly>) -> Self {
        if num.is_zero() {
            return ScalarField::zero();
        }
        ScalarField {
            num: Arc::new(num),
            den: den.clone(),
        }
    }

    pub fn zero() -> Self {
        ScalarField {
            num: shared_zero(),
            den: shared_one(),
        }
    }

    pub fn one() -> Self {
        ScalarField::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        ScalarField::constant(Gaussian::from_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        ScalarField::constant(Gaussian::from_ratio(n, d))
    }

    pub fn i() -> Self {
        ScalarField::constant(Gaussian::i())
    }

    pub fn constant(c: Gaussian) -> Self {
        ScalarField::with_den(Poly::constant(c), &shared_one())
    }

    /// The coordinate function `x_k` (0-based).
    pub fn var(k: usize) -> Self {
        ScalarField::from_poly(Poly::var(k))
    }

    pub fn from_poly(p: Poly) -> Self {
        ScalarField::with_den(p, &shared_one())
    }

    /// Builds `num / den`, reducing to canonical form.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZeroFunction);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return ScalarField::zero();
        }
        if let Some(c) = den.constant_value() {
            let inv = c.inv().expect("nonzero denominator");
            return ScalarField::with_den(num.scale(&inv), &shared_one());
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff().inv().expect("nonzero denominator");
        ScalarField::raw(num.scale(&lc), den.scale(&lc))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<Gaussian> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Complex conjugation: conjugates coefficients, fixes coordinates.
    pub fn conj(&self) -> Self {
        // conj of a monic denominator is still monic, and conjugation preserves gcds
        ScalarField::raw(self.num.conj(), self.den.conj())
    }

    /// True when the function equals its conjugate.
    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZeroFunction);
        }
        Ok(Self::canonical((*self.den).clone(), (*self.num).clone()))
    }

    pub fn div(&self, other: &ScalarField) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZeroFunction);
        }
        if let Some(c) = other.constant_value() {
            return Ok(self.scale(&c.inv().expect("nonzero")));
        }
        Ok(Self::canonical(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn scale(&self, c: &Gaussian) -> Self {
        if c.is_zero() {
            return ScalarField::zero();
        }
        ScalarField::with_den(self.num.scale(c), &self.den)
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        Ok(ScalarField::raw(self.num.pow(e as u32), self.den.pow(e as u32)))
    }

    /// Partial derivative in coordinate `k`, by the quotient rule.
    pub fn partial(&self, k: usize) -> Self {
        if self.den.is_one() {
            return ScalarField::from_poly(self.num.derivative(k));
        }
        let dn = self.num.derivative(k);
        let dd = self.den.derivative(k);
        if dd.is_zero() {
            return ScalarField::canonical(dn, (*self.den).clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        ScalarField::canonical(num, self.den.mul(&self.den))
    }

    pub fn fmt_with(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.den.is_one() {
            return self.num.fmt_with(names);
        }
        let n = self.num.fmt_with(names);
        let n = if self.num.num_terms() > 1 || n.starts_with('-') {
            format!("({})", n)
        } else {
            n
        };
        format!("{}/({})", n, self.den.fmt_with(names))
    }

    fn add_impl(&self, other: &ScalarField) -> ScalarField {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_one() {
                return ScalarField::from_poly(num);
            }
            return Self::canonical(num, (*self.den).clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::canonical(num, self.den.mul(&other.den))
    }

    fn mul_impl(&self, other: &ScalarField) -> ScalarField {
        if self.is_zero() || other.is_zero() {
            return ScalarField::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return ScalarField::from_poly(self.num.mul(&other.num));
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        Self::canonical(self.num.mul(&other.num), self.den.mul(&other.den))
    }
}

impl From<i64> for ScalarField {
    fn from(n: i64) -> Self {
        ScalarField::from_int(n)
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&|k| format!("x{}", k + 1)))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $m(self, rhs: &ScalarField) -> ScalarField {
                let f: fn(&ScalarField, &ScalarField) -> ScalarField = $body;
                f(self, rhs)
            }
        }
        impl $tr<ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $m(self, rhs: ScalarField) -> ScalarField {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $m(self, rhs: &ScalarField) -> ScalarField {
                (&self).$m(rhs)
            }
        }
        impl $tr<ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $m(self, rhs: ScalarField) -> ScalarField {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_impl(b));
binop!(Sub, sub, |a, b| a.add_impl(&-b));
binop!(Mul, mul, |a, b| a.mul_impl(b));

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        ScalarField::with_den(self.num.neg(), &self.den)
    }
}

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        -&self
    }
}

impl AddAssign<&ScalarField> for ScalarField {
    fn add_assign(&mut self, rhs: &ScalarField) {
        *self = self.add_impl(rhs);
    }
}

impl AddAssign<ScalarField> for ScalarField {
    fn add_assign(&mut self, rhs: ScalarField) {
        *self = self.add_impl(&rhs);
    }
}

impl SubAssign<&ScalarField> for ScalarField {
    fn sub_assign(&mut self, rhs: &ScalarField) {
        *self = self.add_impl(&-rhs);
    }
}

impl SubAssign<ScalarField> for ScalarField {
    fn sub_assign(&mut self, rhs: ScalarField) {
        *self = self.add_impl(&-rhs);
    }
}

impl std::iter::Sum for ScalarField {
    fn sum<I: Iterator<Item = ScalarField>>(iter: I) -> Self {
        iter.fold(ScalarField::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(k: usize) -> ScalarField {
        ScalarField::var(k)
    }

    #[test]
    fn add_doubles() {
        assert_eq!(&x(0) + &x(0), &ScalarField::from_int(2) * &x(0));
    }

    #[test]
    fn division_reduces_by_gcd() {
        let a = &x(0) * &x(0) - ScalarField::one();
        let b = &x(0) - ScalarField::one();
        assert_eq!(a.div(&b).unwrap(), &x(0) + ScalarField::one());
    }

    #[test]
    fn i_times_ix() {
        let a = &ScalarField::i() * &x(0);
        assert_eq!(&a * &ScalarField::i(), -x(0));
    }

    #[test]
    fn division_by_zero_function() {
        let z = &x(0) - &x(0);
        assert!(matches!(x(1).div(&z), Err(Error::DivisionByZeroFunction)));
        assert!(matches!(z.inv(), Err(Error::DivisionByZeroFunction)));
    }

    #[test]
    fn partials() {
        assert_eq!((&x(0) * &x(1)).partial(0), x(1));
        let inv = x(0).inv().unwrap();
        assert_eq!(inv.partial(0), -(&inv * &inv));
        let f = &(&x(0) * &x(0)) + &(&ScalarField::i() * &x(1));
        assert_eq!(f.partial(1), ScalarField::i());
    }

    #[test]
    fn canonical_denominator_is_monic() {
        let f = ScalarField::one().div(&(&ScalarField::from_int(2) * &x(0))).unwrap();
        assert!(f.denom().leading_coeff().is_one());
        assert_eq!(f.numer().constant_value().unwrap(), Gaussian::from_ratio(1, 2));
    }

    #[test]
    fn conjugation_is_involutive() {
        let f = (&x(0) + &ScalarField::i())
            .div(&(&x(1) - &ScalarField::i()))
            .unwrap();
        assert_eq!(f.conj().conj(), f);
        assert_ne!(f.conj(), f);
        assert!((&f * &f.conj()).is_real());
    }
}
