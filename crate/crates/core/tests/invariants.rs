use gcs_core::courant::{natural_pairing, GenSection};
use gcs_core::multivector::{blades_of_degree, de_rham_d, Blade, Frame, GradedElement};
use gcs_core::scalars::{Chart, ScalarField};
use gcs_core::spinor::{clifford_act, d_h, mukai, mukai_expanded, transpose};
use proptest::prelude::*;

/// Polynomial of total degree ≤ 2 in `x1, x2` with small Gaussian-integer coefficients.
fn scalar() -> impl Strategy<Value = ScalarField> {
    prop::collection::vec((-3i64..=3, -2i64..=2), 6).prop_map(|c| {
        let x = ScalarField::var(0);
        let y = ScalarField::var(1);
        let monos = [ScalarField::one(), x.clone(), y.clone(), &x * &x, &x * &y, &y * &y];
        monos
            .iter()
            .zip(c)
            .map(|(m, (re, im))| m * &(ScalarField::from_int(re) + ScalarField::i() * ScalarField::from_int(im)))
            .sum()
    })
}

fn nonzero_scalar() -> impl Strategy<Value = ScalarField> {
    scalar().prop_filter("nonzero", |f| !f.is_zero())
}

fn form_on(chart: Chart) -> impl Strategy<Value = GradedElement> {
    let m = chart.dim();
    prop::collection::vec(prop::option::weighted(0.4, scalar()), 1 << m).prop_map(move |cs| {
        let frame = Frame::cotangent(&chart);
        let mut rho = GradedElement::zero(&frame);
        for (b, c) in cs.into_iter().enumerate() {
            if let Some(c) = c {
                rho.add_term(b as Blade, c);
            }
        }
        rho
    })
}

fn section_on(chart: Chart) -> impl Strategy<Value = GenSection> {
    let m = chart.dim();
    prop::collection::vec(scalar(), 2 * m).prop_map(move |v| GenSection::from_coords(&chart, &v))
}

fn r2() -> Chart {
    Chart::standard(2)
}

fn r4() -> Chart {
    Chart::standard(4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_ring_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn division_inverts_multiplication(a in scalar(), b in nonzero_scalar()) {
        let q = a.div(&b).unwrap();
        prop_assert_eq!(&q * &b, a);
    }

    #[test]
    fn conjugation_is_an_involutive_ring_map(a in scalar(), b in scalar()) {
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn wedge_is_associative_and_graded_commutative(
        a in form_on(r4()), b in form_on(r4()), c in form_on(r4())
    ) {
        let ab_c = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let a_bc = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        for p in 0..=4 {
            for q in 0..=4 {
                let (ap, bq) = (a.part(p), b.part(q));
                let sign = if p * q % 2 == 0 { 1 } else { -1 };
                let lhs = ap.wedge(&bq).unwrap();
                let rhs = bq.wedge(&ap).unwrap().map_degrees(|_| sign);
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn de_rham_squares_to_zero(a in form_on(r4())) {
        prop_assert!(de_rham_d(&de_rham_d(&a).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn twisted_differential_squares_to_zero(a in form_on(r4()), k in 0usize..4) {
        let c = r4();
        let blade = blades_of_degree(4, 3)[k];
        let h = GradedElement::from_blade(&Frame::cotangent(&c), blade, ScalarField::one());
        let once = d_h(&a, &h).unwrap();
        prop_assert!(d_h(&once, &h).unwrap().is_zero());
    }

    #[test]
    fn clifford_relation(z1 in section_on(r4()), z2 in section_on(r4()), rho in form_on(r4())) {
        let a = clifford_act(&z1, &clifford_act(&z2, &rho).unwrap()).unwrap();
        let b = clifford_act(&z2, &clifford_act(&z1, &rho).unwrap()).unwrap();
        let two = ScalarField::from_int(2);
        let rhs = rho.scale(&(&two * &natural_pairing(&z1, &z2).unwrap()));
        prop_assert_eq!(&a + &b, rhs);
    }

    #[test]
    fn transpose_is_an_involution(rho in form_on(r4())) {
        prop_assert_eq!(transpose(&transpose(&rho)), rho);
    }

    #[test]
    fn mukai_forms_agree_and_have_parity_symmetry(a in form_on(r2()), b in form_on(r2())) {
        // n = 1: antisymmetric
        let ab = mukai(&a, &b).unwrap();
        prop_assert_eq!(&ab, &mukai_expanded(&a, &b).unwrap());
        prop_assert_eq!(ab, -mukai(&b, &a).unwrap());
    }

    #[test]
    fn mukai_symmetric_in_dimension_four(a in form_on(r4()), b in form_on(r4())) {
        prop_assert_eq!(mukai(&a, &b).unwrap(), mukai(&b, &a).unwrap());
    }

    #[test]
    fn mukai_is_clifford_invariant(z in section_on(r4()), a in form_on(r4()), b in form_on(r4())) {
        let a = &(&a.part(0) + &a.part(2)) + &a.part(4);
        let lhs = mukai(&clifford_act(&z, &a).unwrap(), &b).unwrap();
        let rhs = mukai(&a, &clifford_act(&z, &b).unwrap()).unwrap();
        let sum = &lhs + &rhs;
        let diff = &lhs - &rhs;
        prop_assert!(sum.is_zero() || diff.is_zero(), "lhs = {}, rhs = {}", lhs, rhs);
    }

    #[test]
    fn two_forms_act_skew_on_mukai(
        phi in form_on(r4()).prop_map(|f| f.part(2)), a in form_on(r4()), b in form_on(r4())
    ) {
        let s = &mukai(&phi.wedge(&a).unwrap(), &b).unwrap() + &mukai(&a, &phi.wedge(&b).unwrap()).unwrap();
        prop_assert!(s.is_zero());
    }
}
