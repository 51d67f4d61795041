//! Text syntax: `f * e[i1^i2^...^ik]` terms joined by `+`, indices 1-based.

use std::sync::Arc;

use super::{blade_degree, blade_indices, Frame, GradedElement};
use crate::error::{Error, Result};
use crate::scalars::{parse_expr, Chart, Expr, ScalarField};

fn eval(e: &Expr, frame: &Arc<Frame>) -> Result<GradedElement> {
    let scalar = |f: ScalarField| GradedElement::scalar(frame, f);
    Ok(match e {
        Expr::Int(n) => scalar(ScalarField::from_int(*n)),
        Expr::I => scalar(ScalarField::i()),
        Expr::Var(k) => scalar(ScalarField::var(*k)),
        Expr::Basis(idx) => GradedElement::basis(frame, idx).map_err(|_| Error::Parse {
            pos: 0,
            msg: format!("basis index out of range for rank {}", frame.rank()),
        })?,
        Expr::Neg(a) => -eval(a, frame)?,
        Expr::Add(a, b) => eval(a, frame)? + eval(b, frame)?,
        Expr::Sub(a, b) => eval(a, frame)? - eval(b, frame)?,
        Expr::Mul(a, b) => eval(a, frame)?.wedge(&eval(b, frame)?)?,
        Expr::Div(a, b, at) => {
            let den = eval(b, frame)?;
            if den.max_degree().unwrap_or(0) > 0 {
                return Err(Error::Parse {
                    pos: *at,
                    msg: "division by a non-scalar".into(),
                });
            }
            let inv = den.coeff(0).inv().map_err(|_| Error::Parse {
                pos: *at,
                msg: "division by the zero function".into(),
            })?;
            eval(a, frame)?.scale(&inv)
        }
        Expr::Pow(a, k, at) => {
            let base = eval(a, frame)?;
            if base.max_degree().unwrap_or(0) > 0 {
                return Err(Error::Parse {
                    pos: *at,
                    msg: "power of a non-scalar".into(),
                });
            }
            let p = base.coeff(0).pow(*k).map_err(|_| Error::Parse {
                pos: *at,
                msg: "negative power of the zero function".into(),
            })?;
            scalar(p)
        }
    })
}

impl GradedElement {
    /// Parses the text syntax over `frame`, with coefficients in `chart`'s coordinates.
    pub fn parse(src: &str, chart: &Chart, frame: &Arc<Frame>) -> Result<GradedElement> {
        eval(&parse_expr(src, chart)?, frame)
    }

    /// Canonical text form; [`GradedElement::parse`] reads it back.
    pub fn to_expr_string(&self, chart: &Chart) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut blades: Vec<_> = self.terms().map(|(b, _)| b).collect();
        blades.sort_by_key(|b| (blade_degree(*b), blade_indices(*b)));
        blades
            .iter()
            .map(|b| {
                let c = self.coeff(*b).to_expr_string(chart);
                if *b == 0 {
                    format!("({})", c)
                } else {
                    let idx: Vec<String> =
                        blade_indices(*b).iter().map(|k| (k + 1).to_string()).collect();
                    format!("({}) * e[{}]", c, idx.join("^"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        let chart = Chart::standard(3);
        let c = Frame::cotangent(&chart);
        let e = GradedElement::parse("1 + i*e[1^2] - x1*e[3^1]", &chart, &c).unwrap();
        assert_eq!(e.coeff(0), ScalarField::one());
        assert_eq!(e.coeff(0b011), ScalarField::i());
        assert_eq!(e.coeff(0b101), ScalarField::var(0));
        let back = GradedElement::parse(&e.to_expr_string(&chart), &chart, &c).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn rejects_bad_input() {
        let chart = Chart::standard(2);
        let c = Frame::cotangent(&chart);
        assert!(GradedElement::parse("e[3]", &chart, &c).is_err());
        assert!(GradedElement::parse("e[1]/e[2]", &chart, &c).is_err());
        assert!(GradedElement::parse("e[1", &chart, &c).is_err());
        assert!(GradedElement::parse("e[0]", &chart, &c).is_err());
    }
}
