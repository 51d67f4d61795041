//! Acceptance battery: one line per criterion, nonzero exit if any fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use gcs_core::algebroid::{check_bv_identities, check_sharp_sign_laws, LieAlgebroid};
use gcs_core::builtins::builtin;
use gcs_core::courant::{check_courant_axioms, TwistedCourant};
use gcs_core::gcs::GcsPipeline;
use gcs_core::multivector::{Frame, GradedElement};
use gcs_core::report::Report;
use gcs_core::scalars::{Chart, ScalarField};
use gcs_core::spinor::{check_mukai_identities, check_spinor_identities};

const POSITIVE: [&str; 4] = ["symplectic-r2", "complex-r2", "rescaled-symplectic-r2", "twisted-b-field-r4"];

struct Outcome {
    failures: Vec<String>,
    elapsed: Duration,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    fn require(&mut self, what: &str, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(format!("{}: {}", what, detail()));
        }
    }

    fn report(&mut self, what: &str, r: &Report) {
        for c in r.failures() {
            self.failures.push(format!(
                "{} / {} / {}: {}",
                what,
                r.title,
                c.name,
                c.witness.as_deref().unwrap_or("")
            ));
        }
    }

    fn check(&mut self, what: &str, r: &Report, name: &str) {
        match r.check(name) {
            None => self.failures.push(format!("{}: check '{}' missing", what, name)),
            Some(c) if !c.passed => self.failures.push(format!(
                "{} / {}: {}",
                what,
                name,
                c.witness.as_deref().unwrap_or("")
            )),
            Some(_) => {}
        }
    }
}

fn form(src: &str, chart: &Chart) -> GradedElement {
    GradedElement::parse(src, chart, &Frame::cotangent(chart)).unwrap()
}

fn pipeline(name: &str) -> GcsPipeline {
    builtin(name).unwrap().unwrap().pipeline().unwrap()
}

fn timed(f: impl FnOnce(&mut Outcome)) -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    f(&mut o);
    o.elapsed = t.elapsed();
    o
}

fn courant_axioms() -> Outcome {
    let mut o = timed(|o| {
        let c = Chart::standard(4);
        let r = check_courant_axioms(&TwistedCourant::standard(&c), None, 2);
        o.report("standard R^4", &r);
        let h = form("e[1^2^3]", &c);
        let r = check_courant_axioms(&TwistedCourant::new(&c, h).unwrap(), None, 2);
        o.report("H = dx1^dx2^dx3", &r);
        let bad = TwistedCourant::new_unchecked(&c, form("x1*e[2^3^4]", &c));
        let r = check_courant_axioms(&bad, None, 2);
        let j = r.check("(1) Jacobi/Leibniz identity");
        o.require("non-closed H breaks axiom (1)", j.is_some_and(|c| !c.passed && c.witness.is_some()), || {
            format!("{:?}", j)
        });
    });
    let e = o.elapsed;
    o.require("runtime under 10 s", e < Duration::from_secs(10), || format!("{:?}", e));
    o
}

fn mukai_identities() -> Outcome {
    let mut o = timed(|o| {
        for m in [2, 4] {
            o.report(&format!("R^{}", m), &check_mukai_identities(&Chart::standard(m)));
        }
        for name in ["symplectic-r2", "complex-r2", "twisted-b-field-r4"] {
            let p = pipeline(name);
            let r = check_spinor_identities(&p.dec, p.gcs.h());
            o.check(name, &r, "Mukai vanishes on N_i x N_k unless i + k = 2n");
            o.check(name, &r, "Mukai is nondegenerate on N_i x N_(2n-i)");
        }
    });
    let e = o.elapsed;
    o.require("runtime under 5 s", e < Duration::from_secs(5), || format!("{:?}", e));
    o
}

fn xwu_sign_law() -> Outcome {
    timed(|o| {
        for name in ["symplectic-r2", "complex-r2", "rescaled-symplectic-r2", "twisted-b-field-r4"] {
            let p = pipeline(name);
            let r = check_spinor_identities(&p.dec, p.gcs.h());
            o.check(name, &r, "X.W.u = (-1)^(i(i-1)/2) (i_X W).u");
        }
    })
}

fn main_theorem() -> Outcome {
    timed(|o| {
        for name in POSITIVE {
            o.report(name, &pipeline(name).verify_main_theorem(2));
        }
    })
}

fn modular_cocycles() -> Outcome {
    timed(|o| {
        for name in POSITIVE {
            let p = pipeline(name);
            let r = p.verify_modular_prop();
            o.check(name, &r, "cocycle of L w.r.t. V and s equals 2e");
            o.check(name, &r, "cocycle of L-bar w.r.t. Omega and s equals 2 ebar");
        }
        let p = pipeline("rescaled-symplectic-r2");
        o.require("rescaled example has nonconstant e", !p.e.is_zero(), || "e = 0".into());
    })
}

fn corollaries() -> Outcome {
    timed(|o| {
        let mut constants = Vec::new();
        for name in POSITIVE {
            let p = pipeline(name);
            o.report(name, &p.verify_corollaries(2));
            match p.poisson_constant() {
                Some(Some(c)) => constants.push((name, c)),
                Some(None) => {}
                None => o.require(name, false, || "-i pi is not a constant multiple of P".into()),
            }
        }
        let same = constants.windows(2).all(|w| w[0].1 == w[1].1);
        o.require("one constant across examples", same, || {
            constants.iter().map(|(n, c)| format!("{} -> {}", n, c)).collect::<Vec<_>>().join(", ")
        });
    })
}

fn sign_laws() -> Outcome {
    timed(|o| {
        for r in 1..=4 {
            let f = Frame::abstract_frame("e", r);
            let omega = GradedElement::top(&f.dual(), ScalarField::one());
            let v = GradedElement::top(&f, ScalarField::one());
            o.report(&format!("rank {}", r), &check_sharp_sign_laws(&omega, &v));
            let c = Chart::standard(r);
            let tf = Frame::tangent(&c);
            let omega = GradedElement::top(&tf.dual(), ScalarField::one());
            let v = GradedElement::top(&tf, ScalarField::one());
            o.report(&format!("T R^{}", r), &check_bv_identities(&LieAlgebroid::tangent(&c), &omega, &v, 1));
        }
        for name in POSITIVE {
            let p = pipeline(name);
            let m = &p.data.module;
            o.report(name, &check_sharp_sign_laws(&m.omega, &m.v));
            o.report(name, &check_bv_identities(&p.data.a, &m.omega, &m.v, 1));
        }
    })
}

fn gcsv(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_gcsv"))
        .args(args)
        .env_remove("GCSV_COLOR")
        .output()
        .ok()
        .and_then(|o| o.status.code())
}

fn cli() -> Outcome {
    let mut o = timed(|o| {
        for name in POSITIVE {
            let code = gcsv(&["run", name, "--suite", "all"]);
            o.require(&format!("{} exits 0", name), code == Some(0), || format!("exit {:?}", code));
        }
        let code = gcsv(&["run", "broken-jacobi", "--suite", "all"]);
        o.require("broken-jacobi exits 1", code == Some(1), || format!("exit {:?}", code));
        let malformed = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/malformed.json");
        let code = gcsv(&["run", malformed.to_str().unwrap()]);
        o.require("malformed scenario exits 2", code == Some(2), || format!("exit {:?}", code));
    });
    let e = o.elapsed;
    o.require("wall-clock under 2 minutes", e < Duration::from_secs(120), || format!("{:?}", e));
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Courant axioms, standard and twisted; non-closed H fails axiom (1)", courant_axioms),
        ("Mukai identities and N_i x N_k vanishing, n = 1, 2", mukai_identities),
        ("X.W.u sign law over all frame monomials", xwu_sign_law),
        ("main theorem: both diagrams commute on all positive builtins", main_theorem),
        ("modular cocycles equal 2e and 2 ebar", modular_cocycles),
        ("Laplacian, Poisson and modular-field corollaries", corollaries),
        ("sharp sign laws and BV conjugation identities, r <= 4", sign_laws),
        ("end-to-end CLI exit codes", cli),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let o = run();
        let status = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {} | {} ({:.2} s)", i + 1, status, title, o.elapsed.as_secs_f64());
        for f in &o.failures {
            println!("    {}", f);
        }
        if !o.failures.is_empty() {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
