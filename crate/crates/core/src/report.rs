//! Check results shared by every verification routine.

use std::fmt;

/// Outcome of one named identity check over a battery of cases.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Number of instances evaluated.
    pub cases: usize,
    /// First failing instance with its exact residual.
    pub witness: Option<String>,
    /// Extra information recorded on success (e.g. a computed constant).
    pub note: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>, cases: usize) -> Self {
        Check {
            name: name.into(),
            passed: true,
            cases,
            witness: None,
            note: None,
        }
    }

    pub fn fail(name: impl Into<String>, cases: usize, witness: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: false,
            cases,
            witness: Some(witness.into()),
            note: None,
        }
    }

    /// Passes iff `witness` is `None`.
    pub fn from_witness(name: impl Into<String>, cases: usize, witness: Option<String>) -> Self {
        match witness {
            None => Check::pass(name, cases),
            Some(w) => Check::fail(name, cases, w),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A group of checks plus the conventions they were evaluated under.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Report {
    pub title: String,
    pub banner: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn banner(&mut self, line: impl Into<String>) {
        self.banner.push(line.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, other: Report) {
        self.banner.extend(other.banner);
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} ==", self.title)?;
        for b in &self.banner {
            writeln!(f, "   # {}", b)?;
        }
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {} ({} cases)",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.cases
            )?;
            if let Some(n) = &c.note {
                writeln!(f, "       note: {}", n)?;
            }
            if let Some(w) = &c.witness {
                writeln!(f, "       witness: {}", w)?;
            }
        }
        Ok(())
    }
}

/// First failing item in order, evaluating in parallel.
pub(crate) fn first_failure<T, F>(items: &[T], f: F) -> Option<String>
where
    T: Sync,
    F: Fn(&T) -> Option<String> + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).find_map_first(|w| w)
}
