use gcs_core::algebroid::double_of_bialgebroid;
use gcs_core::builtins::{builtin, exp_form, pure_spinor_data, CATALOG};
use gcs_core::courant::{check_courant_axioms, GenSection};
use gcs_core::gcs::{bialgebroid_of, GCStructure, GcsPipeline};
use gcs_core::linalg::{vector, Matrix};
use gcs_core::multivector::{Frame, GradedElement};
use gcs_core::scalars::{Chart, ScalarField};
use gcs_core::spinor::{annihilator, SpinorDecomposition};

const POSITIVE: [&str; 4] = ["symplectic-r2", "complex-r2", "rescaled-symplectic-r2", "twisted-b-field-r4"];

fn pipeline(name: &str) -> GcsPipeline {
    builtin(name).unwrap().unwrap().pipeline().unwrap()
}

fn span_rank(secs: &[GenSection]) -> usize {
    let n = secs[0].coords().len();
    Matrix::from_cols(&secs.iter().map(|z| z.coords()).collect::<Vec<_>>(), n).rank()
}

#[test]
fn catalog_has_one_negative_control() {
    assert!(CATALOG.len() >= 5);
    assert_eq!(CATALOG.iter().filter(|b| b.negative_control).count(), 1);
}

#[test]
fn plus_i_eigenbundle_is_the_annihilator() {
    for name in POSITIVE {
        let g = builtin(name).unwrap().unwrap();
        let (_, u, _) = pure_spinor_data(name).unwrap().unwrap();
        let eig = g.eigenbundle(true).unwrap().sections;
        let ann = annihilator(&u).unwrap();
        let both: Vec<GenSection> = eig.iter().chain(&ann).cloned().collect();
        assert_eq!(span_rank(&eig), span_rank(&both), "{name}");
        assert_eq!(span_rank(&ann), span_rank(&both), "{name}");
    }
}

#[test]
fn positive_builtins_are_integrable_at_degree_two() {
    for name in POSITIVE {
        let r = builtin(name).unwrap().unwrap().check(2);
        assert!(r.passed(), "{name}\n{r}");
    }
}

#[test]
fn broken_jacobi_has_nonvanishing_nijenhuis_tensor() {
    let g = builtin("broken-jacobi").unwrap().unwrap();
    let r = g.check(1);
    let c = r.check("Nijenhuis tensor vanishes").unwrap();
    assert!(!c.passed);
    assert!(c.witness.is_some());
    assert!(g.pipeline().is_err());
}

#[test]
fn double_of_eigenbundle_pair_satisfies_courant_axioms() {
    for name in ["symplectic-r2", "rescaled-symplectic-r2"] {
        let p = pipeline(name);
        let (a, astar) = bialgebroid_of(&p.dec, p.gcs.h()).unwrap();
        let double = double_of_bialgebroid(&a, &astar, 1).unwrap();
        let r = check_courant_axioms(&double, None, 1);
        assert!(r.passed(), "{name}\n{r}");
    }
}

#[test]
fn main_theorem_and_modular_cocycles_hold_on_builtins() {
    for name in POSITIVE {
        let p = pipeline(name);
        let main = p.verify_main_theorem(2);
        assert!(main.passed(), "{name}\n{main}");
        let modular = p.verify_modular_prop();
        assert!(modular.passed(), "{name}\n{modular}");
    }
}

#[test]
fn poisson_constant_is_shared_across_examples() {
    let mut constants = Vec::new();
    for name in POSITIVE {
        match pipeline(name).poisson_constant() {
            Some(Some(c)) => constants.push(c),
            Some(None) => {}
            None => panic!("{name}: -i pi is not a constant multiple of P"),
        }
    }
    assert!(constants.len() >= 2);
    assert!(constants.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(constants[0], ScalarField::from_int(-1));
}

#[test]
fn twisted_example_has_h_equal_to_minus_db() {
    let (c, _, h) = pure_spinor_data("twisted-b-field-r4").unwrap().unwrap();
    let want = GradedElement::parse("-e[1^2^3]", &c, &Frame::cotangent(&c)).unwrap();
    assert_eq!(h, want);
}

/// `u = (1 + i x1) e^{i dx1^dx2}` has `pr_T(e + ē) ≠ 0`, which separates the
/// Laplacian on functions from half of it.
#[test]
fn laplacian_on_functions_under_complex_rescaling() {
    let c = Chart::standard(2);
    let f = |s: &str| GradedElement::parse(s, &c, &Frame::cotangent(&c)).unwrap();
    let u = f("1 + i*x1").wedge(&exp_form(&f("i*e[1^2]")).unwrap()).unwrap();
    let p = GCStructure::from_pure_spinor(&u, &f("0")).unwrap().pipeline().unwrap();
    let re = vector::add(&p.e_section().vector_part().to_vector(), &p.ebar_section().vector_part().to_vector());
    assert!(re.iter().any(|x| !x.is_zero()));
    for g in c.monomials(2) {
        let lap = p.data.laplacian(&GradedElement::scalar(p.dec.l_frame(), g.clone())).unwrap();
        let want = GradedElement::scalar(lap.frame(), vector::derive(&re, &g));
        assert_eq!(lap, want, "f = {g}");
    }
    let cor = p.verify_corollaries(1);
    assert!(!cor.check("Delta f = Delta_* f = 1/2 pr_T(e + ebar)(f)").unwrap().passed);
    let failing = cor.failures().map(|c| c.name.clone()).collect::<Vec<_>>();
    assert!(failing.iter().all(|n| !n.starts_with("Delta = 1/2")), "{failing:?}");
}

#[test]
fn decomposition_frames_are_dual() {
    for name in POSITIVE {
        let (_, u, _) = pure_spinor_data(name).unwrap().unwrap();
        let dec = SpinorDecomposition::from_pure_spinor(&u).unwrap();
        for (i, l) in dec.l_sections().iter().enumerate() {
            for (j, t) in dec.lbar_sections().iter().enumerate() {
                let two = ScalarField::from_int(2);
                let p = &two * &gcs_core::courant::natural_pairing(l, t).unwrap();
                let want = if i == j { ScalarField::one() } else { ScalarField::zero() };
                assert_eq!(p, want, "{name}: ({i}, {j})");
            }
        }
    }
}
