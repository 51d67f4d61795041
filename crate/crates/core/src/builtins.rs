//! Built-in example structures.

use crate::error::{Error, Result};
use crate::gcs::GCStructure;
use crate::multivector::{de_rham_d, Frame, GradedElement};
use crate::scalars::Chart;
use crate::spinor::Spinor;

/// One catalog entry.
#[derive(Clone, Debug)]
pub struct Builtin {
    pub name: &'static str,
    pub description: &'static str,
    /// Expected to fail at least one check.
    pub negative_control: bool,
}

pub const CATALOG: [Builtin; 5] = [
    Builtin {
        name: "symplectic-r2",
        description: "u = exp(i dx1^dx2) on R^2, H = 0",
        negative_control: false,
    },
    Builtin {
        name: "complex-r2",
        description: "u = dx1 + i dx2 on R^2, H = 0",
        negative_control: false,
    },
    Builtin {
        name: "rescaled-symplectic-r2",
        description: "u = (1 + x1^2) exp(i dx1^dx2) on R^2, H = 0",
        negative_control: false,
    },
    Builtin {
        name: "twisted-b-field-r4",
        description: "u = exp(B + i omega), B = x1 dx2^dx3, omega = dx1^dx4 + dx2^dx3 on R^4, H = -dB",
        negative_control: false,
    },
    Builtin {
        name: "broken-jacobi",
        description: "negative control: symplectic R^4 with the non-closed H = x4 dx1^dx2^dx3",
        negative_control: true,
    },
];

fn form(src: &str, chart: &Chart) -> Result<Spinor> {
    GradedElement::parse(src, chart, &Frame::cotangent(chart))
}

/// `exp` of an even form (terminating series).
pub fn exp_form(b: &Spinor) -> Result<Spinor> {
    let mut term = GradedElement::scalar(b.frame(), crate::scalars::ScalarField::one());
    let mut acc = term.clone();
    for k in 1..=b.rank() {
        term = term.wedge(b)?.scale(&crate::scalars::ScalarField::from_ratio(1, k as i64));
        if term.is_zero() {
            break;
        }
        acc = &acc + &term;
    }
    Ok(acc)
}

/// `H` for `u = e^{B+iω}`: the oracle `d(e^{B+iω}) = dB ∧ e^{B+iω}` fixes
/// `d_H u = 0` exactly when `H = −dB`.
pub fn twisted_h(b: &Spinor, u: &Spinor) -> Result<Spinor> {
    let db = de_rham_d(b)?;
    if de_rham_d(u)? != db.wedge(u)? {
        return Err(Error::InvalidStructure("d(exp(B + i omega)) != dB ^ exp(B + i omega)".into()));
    }
    Ok(-db)
}

/// Chart, pure spinor and `H` of a positive builtin, or `None` for unknown names.
pub fn pure_spinor_data(name: &str) -> Result<Option<(Chart, Spinor, Spinor)>> {
    Ok(Some(match name {
        "symplectic-r2" => {
            let c = Chart::standard(2);
            let u = exp_form(&form("i*e[1^2]", &c)?)?;
            (c.clone(), u, form("0", &c)?)
        }
        "complex-r2" => {
            let c = Chart::standard(2);
            let u = form("e[1] + i*e[2]", &c)?;
            (c.clone(), u, form("0", &c)?)
        }
        "rescaled-symplectic-r2" => {
            let c = Chart::standard(2);
            let u = form("1 + x1^2", &c)?.wedge(&exp_form(&form("i*e[1^2]", &c)?)?)?;
            (c.clone(), u, form("0", &c)?)
        }
        "twisted-b-field-r4" => {
            let c = Chart::standard(4);
            let b = form("x1*e[2^3]", &c)?;
            let w = form("e[1^4] + e[2^3]", &c)?;
            let u = exp_form(&(&b + &w.scale(&crate::scalars::ScalarField::i())))?;
            let h = twisted_h(&b, &u)?;
            (c, u, h)
        }
        "broken-jacobi" => {
            let c = Chart::standard(4);
            let u = exp_form(&form("i*e[1^2] + i*e[3^4]", &c)?)?;
            let h = form("x4*e[1^2^3]", &c)?;
            (c, u, h)
        }
        _ => return Ok(None),
    }))
}

/// The structure of a catalog entry.
pub fn builtin(name: &str) -> Result<Option<GCStructure>> {
    let Some((_, u, h)) = pure_spinor_data(name)? else {
        return Ok(None);
    };
    if name == "broken-jacobi" {
        let c = Chart::standard(4);
        let sym = GCStructure::from_pure_spinor(&u, &form("0", &c)?)?;
        return GCStructure::new_unchecked_h(&c, sym.j().clone(), h).map(Some);
    }
    GCStructure::from_pure_spinor(&u, &h).map(Some)
}
