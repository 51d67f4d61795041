//! Text and JSON renderings of a run.

use std::fmt::Write as _;

use gcs_core::report::Check;
use serde::Serialize;

use crate::runner::RunReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Style {
    pub color: bool,
    pub timing: bool,
}

impl Style {
    /// `GCSV_COLOR=always` enables ANSI colors; `auto` enables them on a terminal.
    pub fn color_from_env(is_terminal: bool) -> bool {
        match std::env::var("GCSV_COLOR").as_deref() {
            Ok("always") => true,
            Ok("auto") => is_terminal,
            _ => false,
        }
    }
}

fn status(passed: bool, color: bool) -> String {
    match (passed, color) {
        (true, false) => "PASS".into(),
        (false, false) => "FAIL".into(),
        (true, true) => "\x1b[32mPASS\x1b[0m".into(),
        (false, true) => "\x1b[31mFAIL\x1b[0m".into(),
    }
}

pub fn text(run: &RunReport, style: Style) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", run.scenario);
    let _ = writeln!(out, "max degree: {}", run.degree);
    for s in &run.suites {
        let _ = write!(out, "\n### suite {} [{}]", s.suite, status(s.passed(), style.color));
        if style.timing {
            let _ = write!(out, " ({:.3} s)", s.elapsed.as_secs_f64());
        }
        out.push('\n');
        for r in &s.reports {
            let _ = writeln!(out, "== {} ==", r.title);
            for b in &r.banner {
                let _ = writeln!(out, "   # {}", b);
            }
            for c in &r.checks {
                let _ = writeln!(out, "[{}] {} ({} cases)", status(c.passed, style.color), c.name, c.cases);
                if let Some(n) = &c.note {
                    let _ = writeln!(out, "       note: {}", n);
                }
                if let Some(w) = &c.witness {
                    let _ = writeln!(out, "       witness: {}", w);
                }
            }
        }
    }
    let total = run.checks().count();
    let failed = run.checks().filter(|c| !c.passed).count();
    let _ = writeln!(
        out,
        "\nresult: {} ({} checks, {} failed)",
        status(run.passed(), style.color),
        total,
        failed
    );
    out
}

#[derive(Serialize)]
struct JsonRun<'a> {
    schema: &'static str,
    scenario: &'a str,
    max_degree: u32,
    passed: bool,
    checks_total: usize,
    checks_failed: usize,
    suites: Vec<JsonSuite<'a>>,
}

#[derive(Serialize)]
struct JsonSuite<'a> {
    name: &'static str,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
    reports: Vec<JsonReport<'a>>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    title: &'a str,
    banner: &'a [String],
    checks: Vec<JsonCheck<'a>>,
}

#[derive(Serialize)]
struct JsonCheck<'a> {
    name: &'a str,
    passed: bool,
    cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

impl<'a> From<&'a Check> for JsonCheck<'a> {
    fn from(c: &'a Check) -> Self {
        JsonCheck {
            name: &c.name,
            passed: c.passed,
            cases: c.cases,
            witness: c.witness.as_deref(),
            note: c.note.as_deref(),
        }
    }
}

pub const REPORT_SCHEMA: &str = "gcsv-report/1";

pub fn json(run: &RunReport, style: Style) -> String {
    let doc = JsonRun {
        schema: REPORT_SCHEMA,
        scenario: &run.scenario,
        max_degree: run.degree,
        passed: run.passed(),
        checks_total: run.checks().count(),
        checks_failed: run.checks().filter(|c| !c.passed).count(),
        suites: run
            .suites
            .iter()
            .map(|s| JsonSuite {
                name: s.suite.name(),
                passed: s.passed(),
                seconds: style.timing.then_some(s.elapsed.as_secs_f64()),
                reports: s
                    .reports
                    .iter()
                    .map(|r| JsonReport {
                        title: &r.title,
                        banner: &r.banner,
                        checks: r.checks.iter().map(JsonCheck::from).collect(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}
