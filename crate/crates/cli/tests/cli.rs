use std::path::PathBuf;
use std::process::{Command, Output};

use gcs_cli::{Scenario, Suite};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn gcsv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcsv"))
        .args(args)
        .env_remove("GCSV_COLOR")
        .output()
        .expect("gcsv runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn fixture_exit_codes() {
    let cases = [
        ("symplectic_r2_builtin.json", 0),
        ("symplectic_r2_jmatrix.json", 0),
        ("complex_r2_spinor.json", 0),
        ("twisted_r4_spinor.json", 0),
        ("non_integrable_spinor.json", 1),
        ("not_closed_h.json", 2),
        ("malformed.json", 2),
        ("bad_expression.json", 2),
    ];
    for (f, want) in cases {
        let o = gcsv(&["run", &fixture(f)]);
        assert_eq!(code(&o), want, "{f}\n{}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn not_closed_diagnostic_names_the_field() {
    let o = gcsv(&["run", &fixture("not_closed_h.json")]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("h: 3-form is not closed"), "{err}");
}

#[test]
fn malformed_json_reports_position() {
    let o = gcsv(&["validate", &fixture("malformed.json")]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4, column 3"));
}

#[test]
fn unknown_scenario_and_suite_are_invalid_input() {
    assert_eq!(code(&gcsv(&["run", "no-such-example"])), 2);
    assert_eq!(code(&gcsv(&["run", "symplectic-r2", "--suite", "bogus"])), 2);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for format in ["text", "json"] {
        let a = gcsv(&["run", "rescaled-symplectic-r2", "--format", format]);
        let b = gcsv(&["run", "rescaled-symplectic-r2", "--format", format]);
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
}

#[test]
fn text_and_json_agree_on_status() {
    for name in ["complex-r2", "rescaled-symplectic-r2", "broken-jacobi"] {
        let t = gcsv(&["run", name, "--degree", "1"]);
        let j = gcsv(&["run", name, "--degree", "1", "--format", "json"]);
        assert_eq!(code(&t), code(&j));
        let doc: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
        let text = String::from_utf8(t.stdout.clone()).unwrap();
        let mut json_status = Vec::new();
        for s in doc["suites"].as_array().unwrap() {
            for r in s["reports"].as_array().unwrap() {
                for c in r["checks"].as_array().unwrap() {
                    let tag = if c["passed"].as_bool().unwrap() { "PASS" } else { "FAIL" };
                    json_status.push(format!("[{}] {} (", tag, c["name"].as_str().unwrap()));
                }
            }
        }
        let text_status: Vec<&str> = text.lines().filter(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]")).collect();
        assert_eq!(json_status.len(), text_status.len(), "{name}");
        for (a, b) in json_status.iter().zip(&text_status) {
            assert!(b.starts_with(a.as_str()), "{name}: {a} vs {b}");
        }
        assert_eq!(doc["passed"].as_bool().unwrap(), code(&t) == 0);
    }
}

#[test]
fn timing_only_when_requested() {
    let plain = gcsv(&["run", "complex-r2", "--suite", "modular-prop", "--format", "json"]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("seconds"));
    let timed = gcsv(&["run", "complex-r2", "--suite", "modular-prop", "--format", "json", "--timing"]);
    assert!(String::from_utf8_lossy(&timed.stdout).contains("seconds"));
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = gcsv(&["run", "symplectic-r2", "--suite", "main-theorem", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(doc["schema"], "gcsv-report/1");
    assert_eq!(doc["suites"][0]["name"], "main-theorem");
}

#[test]
fn color_only_via_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_gcsv"))
        .args(["run", "complex-r2", "--suite", "modular-prop"])
        .env("GCSV_COLOR", "always")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&o.stdout).contains("\x1b[32mPASS"));
    let plain = gcsv(&["run", "complex-r2", "--suite", "modular-prop"]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains('\x1b'));
}

#[test]
fn list_shows_the_catalog() {
    let o = gcsv(&["list", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let items: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(items.len() >= 5);
    assert_eq!(items.iter().filter(|i| i["negative_control"] == true).count(), 1);
}

#[test]
fn validate_prints_the_canonical_scenario() {
    let o = gcsv(&["validate", &fixture("symplectic_r2_builtin.json")]);
    assert_eq!(code(&o), 0);
    let s = Scenario::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(s.suites, Suite::CONCRETE.to_vec());
    assert_eq!(s, s.canonical());
}

#[test]
fn every_fixture_round_trips() {
    for entry in std::fs::read_dir(fixture("")).unwrap() {
        let path = entry.unwrap().path();
        let Ok(s) = Scenario::load(&path) else { continue };
        let c = s.canonical();
        assert_eq!(Scenario::from_json(&c.to_json()).unwrap(), c, "{}", path.display());
    }
}
