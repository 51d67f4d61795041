//! Cartan calculus on the coordinate frames of a chart.

use super::{blade_indices, wedge_sign, FrameKind, GradedElement};
use crate::error::{Error, Result};
use crate::scalars::ScalarField;

fn require(e: &GradedElement, kind: FrameKind) -> Result<()> {
    if *e.frame().kind() != kind {
        return Err(Error::NotChartFrame);
    }
    Ok(())
}

/// Directional derivative `x(f)` of a function along a vector field.
pub(crate) fn apply_vector(x: &GradedElement, f: &ScalarField) -> ScalarField {
    let mut acc = ScalarField::zero();
    for k in 0..x.rank() {
        let c = x.coeff(1 << k);
        if !c.is_zero() {
            let df = f.partial(k);
            if !df.is_zero() {
                acc += &c * &df;
            }
        }
    }
    acc
}

/// Exterior derivative of a form over the cotangent frame.
pub fn de_rham_d(phi: &GradedElement) -> Result<GradedElement> {
    require(phi, FrameKind::Cotangent)?;
    let mut out = GradedElement::zero(phi.frame());
    for (blade, f) in phi.terms() {
        for k in 0..phi.rank() {
            if blade & (1 << k) != 0 {
                continue;
            }
            let df = f.partial(k);
            if df.is_zero() {
                continue;
            }
            let s = wedge_sign(1 << k, blade).expect("disjoint");
            out.add_term(blade | (1 << k), if s < 0 { -df } else { df });
        }
    }
    Ok(out)
}

/// `ι_x φ` for a vector field `x` and a form `φ`.
pub fn interior(x: &GradedElement, phi: &GradedElement) -> Result<GradedElement> {
    require(x, FrameKind::Tangent)?;
    require(phi, FrameKind::Cotangent)?;
    x.contract(phi)
}

/// Lie bracket of vector fields.
pub fn vector_field_bracket(x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
    require(x, FrameKind::Tangent)?;
    require(y, FrameKind::Tangent)?;
    let mut out = GradedElement::zero(x.frame());
    for k in 0..x.rank() {
        let c = &apply_vector(x, &y.coeff(1 << k)) - &apply_vector(y, &x.coeff(1 << k));
        out.add_term(1 << k, c);
    }
    Ok(out)
}

/// Lie derivative along a vector field, on forms (Cartan formula) or on
/// polyvector fields (derivation extending the vector-field bracket).
pub fn lie_derivative(x: &GradedElement, phi: &GradedElement) -> Result<GradedElement> {
    require(x, FrameKind::Tangent)?;
    match phi.frame().kind() {
        FrameKind::Cotangent => {
            let a = interior(x, &de_rham_d(phi)?)?;
            let b = de_rham_d(&interior(x, phi)?)?;
            Ok(&a + &b)
        }
        FrameKind::Tangent => {
            let m = x.rank();
            // [x, ∂_k] = -Σ_μ (∂_k x^μ) ∂_μ
            let brackets: Vec<GradedElement> = (0..m)
                .map(|k| {
                    let mut w = GradedElement::zero(x.frame());
                    for mu in 0..m {
                        w.add_term(1 << mu, -x.coeff(1 << mu).partial(k));
                    }
                    w
                })
                .collect();
            let mut out = GradedElement::zero(phi.frame());
            for (blade, f) in phi.terms() {
                out.add_term(blade, apply_vector(x, f));
                for k in blade_indices(blade) {
                    let rest = blade & !(1 << k);
                    let s = wedge_sign(1 << k, rest).expect("disjoint");
                    let tail = GradedElement::from_blade(phi.frame(), rest, f.clone());
                    let t = brackets[k].wedge(&tail)?;
                    for (b, c) in t.terms() {
                        out.add_term(b, if s < 0 { -c } else { c.clone() });
                    }
                }
            }
            Ok(out)
        }
        FrameKind::Abstract { .. } => Err(Error::NotChartFrame),
    }
}

/// Coefficient of `L_v(s dx_1∧…∧dx_m)`, i.e. `Σ_μ ∂_μ(s v^μ)`.
pub fn volume_divergence(v: &GradedElement, s: &ScalarField) -> Result<ScalarField> {
    require(v, FrameKind::Tangent)?;
    let mut acc = ScalarField::zero();
    for mu in 0..v.rank() {
        let c = v.coeff(1 << mu);
        if !c.is_zero() {
            acc += (s * &c).partial(mu);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multivector::Frame;
    use crate::scalars::Chart;

    fn x(k: usize) -> ScalarField {
        ScalarField::var(k)
    }

    #[test]
    fn d_examples() {
        let chart = Chart::standard(3);
        let t = Frame::cotangent(&chart);
        let x1 = GradedElement::scalar(&t, x(0));
        assert_eq!(de_rham_d(&x1).unwrap(), GradedElement::basis(&t, &[0]).unwrap());
        let f = GradedElement::basis(&t, &[1]).unwrap().scale(&x(0));
        assert_eq!(de_rham_d(&f).unwrap(), GradedElement::basis(&t, &[0, 1]).unwrap());
        let g = GradedElement::basis(&t, &[0, 1]).unwrap();
        assert!(de_rham_d(&g).unwrap().is_zero());
        let v = GradedElement::basis(&Frame::tangent(&chart), &[0]).unwrap();
        assert!(matches!(de_rham_d(&v), Err(Error::NotChartFrame)));
    }

    #[test]
    fn lie_derivative_examples() {
        let chart = Chart::standard(2);
        let t = Frame::tangent(&chart);
        let c = Frame::cotangent(&chart);
        let d1 = GradedElement::basis(&t, &[0]).unwrap();
        let dx1 = GradedElement::basis(&c, &[0]).unwrap();
        let dx2 = GradedElement::basis(&c, &[1]).unwrap();
        assert_eq!(lie_derivative(&d1, &dx2.scale(&x(0))).unwrap(), dx2);
        assert!(lie_derivative(&d1, &dx1).unwrap().is_zero());
        let euler = d1.scale(&x(0));
        assert_eq!(lie_derivative(&euler, &dx1).unwrap(), dx1);
    }

    #[test]
    fn polyvector_lie_derivative_matches_bracket() {
        let chart = Chart::standard(2);
        let t = Frame::tangent(&chart);
        let a = GradedElement::basis(&t, &[0]).unwrap().scale(&(&x(0) * &x(1)));
        let b = GradedElement::basis(&t, &[1]).unwrap().scale(&x(0));
        assert_eq!(lie_derivative(&a, &b).unwrap(), vector_field_bracket(&a, &b).unwrap());
    }
}
