//! Executes the selected suites of a resolved scenario.

use std::time::{Duration, Instant};

use gcs_core::courant::{check_courant_axioms, TwistedCourant};
use gcs_core::gcs::GcsPipeline;
use gcs_core::report::{Check, Report};

use crate::scenario::{Resolved, Suite};

/// Reports of one suite; checks are sorted by name.
#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub suite: Suite,
    pub reports: Vec<Report>,
    pub elapsed: Duration,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(Report::passed)
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub scenario: String,
    pub degree: u32,
    pub suites: Vec<SuiteResult>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.suites.iter().flat_map(|s| s.reports.iter()).flat_map(|r| r.checks.iter())
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

fn failed(title: &str, check: &str, witness: impl Into<String>) -> Report {
    let mut r = Report::new(title);
    r.push(Check::fail(check, 1, witness));
    r
}

pub fn run(res: &Resolved) -> RunReport {
    let mut pipeline: Option<Result<GcsPipeline, String>> = None;
    let mut suites = Vec::new();
    for &suite in &res.suites {
        let t = Instant::now();
        let mut reports = match suite {
            Suite::CourantAxioms => courant_suite(res),
            _ => {
                let p = pipeline.get_or_insert_with(|| build_pipeline(res));
                match p {
                    Ok(p) => vec![structure_suite(p, suite, res.degree)],
                    Err(e) => vec![failed(suite.name(), "pipeline construction", e.clone())],
                }
            }
        };
        for r in &mut reports {
            r.checks.sort_by(|a, b| a.name.cmp(&b.name));
        }
        suites.push(SuiteResult {
            suite,
            reports,
            elapsed: t.elapsed(),
        });
    }
    RunReport {
        scenario: res.name.clone(),
        degree: res.degree,
        suites,
    }
}

fn build_pipeline(res: &Resolved) -> Result<GcsPipeline, String> {
    match &res.structure {
        None => Err("no structure given".into()),
        Some(Err(e)) => Err(e.clone()),
        Some(Ok(g)) => g.pipeline().map_err(|e| e.to_string()),
    }
}

fn courant_suite(res: &Resolved) -> Vec<Report> {
    let c = TwistedCourant::new_unchecked(&res.chart, res.h.clone());
    let mut out = vec![check_courant_axioms(&c, None, res.degree)];
    match &res.structure {
        Some(Ok(g)) => out.push(g.check(res.degree)),
        Some(Err(e)) => out.push(failed("gcs", "structure is integrable", e.clone())),
        None => {}
    }
    out
}

fn structure_suite(p: &GcsPipeline, suite: Suite, degree: u32) -> Report {
    match suite {
        Suite::Bialgebroid => p.verify_bialgebroid(degree),
        Suite::MainTheorem => p.verify_main_theorem(degree),
        Suite::ModularProp => p.verify_modular_prop(),
        Suite::ModuleStructures => p.verify_module_structures(degree),
        Suite::Corollaries => p.verify_corollaries(degree),
        Suite::SpinorIdentities => p.verify_spinor_identities(),
        Suite::CourantAxioms | Suite::All => unreachable!("expanded before running"),
    }
}
