use std::time::Instant;

use gcs_core::courant::{check_courant_axioms, CourantData, TwistedCourant, AXIOMS};
use gcs_core::multivector::{Frame, GradedElement};
use gcs_core::scalars::Chart;

fn form(src: &str, chart: &Chart) -> GradedElement {
    GradedElement::parse(src, chart, &Frame::cotangent(chart)).unwrap()
}

#[test]
fn standard_structure_on_r4_passes_degree_two() {
    let c = Chart::standard(4);
    let t = Instant::now();
    let r = check_courant_axioms(&TwistedCourant::standard(&c), None, 2);
    eprintln!("standard r4: {:?}", t.elapsed());
    assert!(r.passed(), "{}", r);
}

#[test]
fn twisted_structure_on_r4_passes_degree_two() {
    let c = Chart::standard(4);
    let s = TwistedCourant::new(&c, form("e[1^2^3]", &c)).unwrap();
    let t = Instant::now();
    let r = check_courant_axioms(&s, None, 2);
    eprintln!("twisted r4: {:?}", t.elapsed());
    assert!(r.passed(), "{}", r);
}

#[test]
fn non_closed_twist_breaks_jacobi() {
    let c = Chart::standard(4);
    let s = TwistedCourant::new_unchecked(&c, form("x1*e[2^3^4]", &c));
    let t = Instant::now();
    let r = check_courant_axioms(&s, None, 2);
    eprintln!("broken r4: {:?}", t.elapsed());
    let jac = r.check(AXIOMS[0]).unwrap();
    assert!(!jac.passed);
    assert!(jac.witness.as_ref().unwrap().contains("residual"));
}

#[test]
fn tabulated_structure_agrees_with_direct_one() {
    let c = Chart::standard(4);
    let s = TwistedCourant::new(&c, form("x1*e[1^2^3]", &c)).unwrap();
    let data = CourantData::tabulate(&s).unwrap();
    let r = check_courant_axioms(&data, None, 1);
    assert!(r.passed(), "{}", r);
}
