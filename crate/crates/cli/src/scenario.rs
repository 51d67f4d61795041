//! Scenario documents and their validation into kernel objects.

use std::fmt;
use std::path::Path;

use gcs_core::builtins::{builtin, exp_form, pure_spinor_data, CATALOG};
use gcs_core::courant::validate_closed_3form;
use gcs_core::gcs::GCStructure;
use gcs_core::linalg::Matrix;
use gcs_core::multivector::{Frame, GradedElement};
use gcs_core::scalars::{Chart, ScalarField};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_DEGREE: u32 = 2;

/// Invalid input: the scenario cannot be run at all.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("malformed scenario at line {line}, column {column}: {msg}")]
    Json { line: usize, column: usize, msg: String },
    #[error("{field}: {msg}")]
    Invalid { field: String, msg: String },
    #[error("unknown scenario or builtin '{0}'")]
    Unknown(String),
}

fn invalid(field: &str, msg: impl fmt::Display) -> InputError {
    InputError::Invalid {
        field: field.to_string(),
        msg: msg.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    CourantAxioms,
    Bialgebroid,
    MainTheorem,
    ModularProp,
    ModuleStructures,
    Corollaries,
    SpinorIdentities,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 7] = [
        Suite::CourantAxioms,
        Suite::Bialgebroid,
        Suite::MainTheorem,
        Suite::ModularProp,
        Suite::ModuleStructures,
        Suite::Corollaries,
        Suite::SpinorIdentities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CourantAxioms => "courant-axioms",
            Suite::Bialgebroid => "bialgebroid",
            Suite::MainTheorem => "main-theorem",
            Suite::ModularProp => "modular-prop",
            Suite::ModuleStructures => "module-structures",
            Suite::Corollaries => "corollaries",
            Suite::SpinorIdentities => "spinor-identities",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::CONCRETE
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
    }

    /// Suites that need a generalized complex structure.
    pub fn needs_structure(self) -> bool {
        self != Suite::CourantAxioms
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sorted, deduplicated, with `all` expanded.
pub fn expand_suites(suites: &[Suite]) -> Vec<Suite> {
    let mut out: Vec<Suite> = if suites.contains(&Suite::All) {
        Suite::CONCRETE.to_vec()
    } else {
        suites.to_vec()
    };
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<String>>,
}

/// `u = form ∧ exp(exp)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PureSpinorSpec {
    #[serde(default = "one")]
    pub form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp: Option<String>,
}

fn one() -> String {
    "1".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureSource {
    Builtin(String),
    /// Rows of `J` in the frame `(∂_1, …, ∂_m, dx_1, …, dx_m)`.
    JMatrix(Vec<Vec<String>>),
    PureSpinor(PureSpinorSpec),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    #[serde(default = "all_suites")]
    pub suites: Vec<Suite>,
    #[serde(default = "default_degree")]
    pub max_degree: u32,
}

fn all_suites() -> Vec<Suite> {
    vec![Suite::All]
}

fn default_degree() -> u32 {
    DEFAULT_DEGREE
}

impl Scenario {
    pub fn from_json(src: &str) -> Result<Scenario, InputError> {
        serde_json::from_str(src).map_err(|e| InputError::Json {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Scenario, InputError> {
        let src = std::fs::read_to_string(path).map_err(|e| InputError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        Scenario::from_json(&src)
    }

    /// A file path if one exists, otherwise a catalog name.
    pub fn locate(arg: &str) -> Result<Scenario, InputError> {
        let path = Path::new(arg);
        if path.is_file() {
            return Scenario::load(path);
        }
        if CATALOG.iter().any(|b| b.name == arg) {
            return Ok(Scenario::builtin(arg));
        }
        Err(InputError::Unknown(arg.to_string()))
    }

    pub fn builtin(name: &str) -> Scenario {
        Scenario {
            version: SCHEMA_VERSION,
            name: Some(name.to_string()),
            chart: None,
            structure: Some(StructureSource::Builtin(name.to_string())),
            h: None,
            suites: all_suites(),
            max_degree: DEFAULT_DEGREE,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Defaults made explicit and `all` expanded; `canonical` is idempotent.
    pub fn canonical(&self) -> Scenario {
        let mut s = self.clone();
        s.suites = expand_suites(&s.suites);
        if let Some(StructureSource::PureSpinor(p)) = &mut s.structure {
            p.form = p.form.trim().to_string();
        }
        if s.h.as_deref().map(str::trim) == Some("0") {
            s.h = None;
        }
        s
    }

    pub fn display_name(&self) -> String {
        match (&self.name, &self.structure) {
            (Some(n), _) => n.clone(),
            (None, Some(StructureSource::Builtin(b))) => b.clone(),
            _ => "scenario".into(),
        }
    }

    /// Parses every expression and builds the kernel objects.
    pub fn resolve(&self) -> Result<Resolved, InputError> {
        if self.version != SCHEMA_VERSION {
            return Err(invalid(
                "version",
                format!("unsupported version {}, expected {}", self.version, SCHEMA_VERSION),
            ));
        }
        let suites = expand_suites(&self.suites);
        if suites.is_empty() {
            return Err(invalid("suites", "no suites selected"));
        }
        let name = self.display_name();
        if let Some(StructureSource::Builtin(b)) = &self.structure {
            return self.resolve_builtin(b, name, suites);
        }
        let chart = match &self.chart {
            Some(c) => chart_of(c)?,
            None => return Err(invalid("chart", "required unless the structure is a builtin")),
        };
        let h = match &self.h {
            Some(src) => form(src, &chart, "h")?,
            None => GradedElement::zero(&Frame::cotangent(&chart)),
        };
        validate_closed_3form(&chart, &h).map_err(|e| invalid("h", e))?;
        let needs = suites.iter().any(|s| s.needs_structure());
        if needs && chart.dim() % 2 != 0 {
            return Err(invalid("chart.dim", "structure suites need an even dimension"));
        }
        let structure = match &self.structure {
            None if needs => return Err(invalid("structure", "required by the selected suites")),
            None => None,
            Some(StructureSource::JMatrix(rows)) => {
                let j = j_matrix(rows, &chart)?;
                Some(Ok(GCStructure::new(&chart, j, h.clone()).map_err(|e| invalid("structure.j_matrix", e))?))
            }
            Some(StructureSource::PureSpinor(p)) => {
                let u = pure_spinor(p, &chart)?;
                Some(from_spinor(&u, &h, "structure.pure_spinor")?.map_err(|e| e.to_string()))
            }
            Some(StructureSource::Builtin(_)) => unreachable!(),
        };
        Ok(Resolved {
            name,
            chart,
            h,
            structure,
            suites,
            degree: self.max_degree,
        })
    }

    fn resolve_builtin(&self, b: &str, name: String, suites: Vec<Suite>) -> Result<Resolved, InputError> {
        let g = builtin(b)
            .map_err(|e| invalid("structure.builtin", e))?
            .ok_or_else(|| invalid("structure.builtin", format!("unknown builtin '{}'", b)))?;
        if self.h.is_some() {
            return Err(invalid("h", "a builtin carries its own H"));
        }
        if let Some(c) = &self.chart {
            if chart_of(c)? != *g.chart() {
                return Err(invalid("chart", "does not match the builtin's chart"));
            }
        }
        let chart = match pure_spinor_data(b).map_err(|e| invalid("structure.builtin", e))? {
            Some((c, _, _)) => c,
            None => g.chart().clone(),
        };
        Ok(Resolved {
            name,
            chart,
            h: g.h().clone(),
            structure: Some(Ok(g)),
            suites,
            degree: self.max_degree,
        })
    }
}

/// Integrability failures are check results; anything else is invalid input.
fn from_spinor(
    u: &GradedElement,
    h: &GradedElement,
    field: &str,
) -> Result<Result<GCStructure, gcs_core::Error>, InputError> {
    match GCStructure::from_pure_spinor(u, h) {
        Ok(g) => Ok(Ok(g)),
        Err(e @ gcs_core::Error::NotIntegrable(_)) => Ok(Err(e)),
        Err(e) => Err(invalid(field, e)),
    }
}

fn chart_of(c: &ChartSpec) -> Result<Chart, InputError> {
    let chart = match &c.coordinates {
        Some(names) => {
            if names.len() != c.dim {
                return Err(invalid(
                    "chart.coordinates",
                    format!("{} names for dimension {}", names.len(), c.dim),
                ));
            }
            Chart::new(names.clone()).map_err(|e| invalid("chart.coordinates", e))?
        }
        None => Chart::standard(c.dim),
    };
    if c.dim == 0 {
        return Err(invalid("chart.dim", "must be positive"));
    }
    Ok(chart)
}

fn form(src: &str, chart: &Chart, field: &str) -> Result<GradedElement, InputError> {
    GradedElement::parse(src, chart, &Frame::cotangent(chart)).map_err(|e| invalid(field, e))
}

fn pure_spinor(p: &PureSpinorSpec, chart: &Chart) -> Result<GradedElement, InputError> {
    let base = form(&p.form, chart, "structure.pure_spinor.form")?;
    match &p.exp {
        None => Ok(base),
        Some(src) => {
            let b = form(src, chart, "structure.pure_spinor.exp")?;
            if (0..=chart.dim()).any(|k| k % 2 == 1 && !b.part(k).is_zero()) {
                return Err(invalid("structure.pure_spinor.exp", "exponent must be an even form"));
            }
            let e = exp_form(&b).map_err(|e| invalid("structure.pure_spinor.exp", e))?;
            base.wedge(&e).map_err(|e| invalid("structure.pure_spinor", e))
        }
    }
}

fn j_matrix(rows: &[Vec<String>], chart: &Chart) -> Result<Matrix, InputError> {
    let n = 2 * chart.dim();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(invalid("structure.j_matrix", format!("expected {0}x{0} entries", n)));
    }
    let mut out = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let mut r = Vec::with_capacity(n);
        for (j, src) in row.iter().enumerate() {
            let f = ScalarField::parse(src, chart)
                .map_err(|e| invalid(&format!("structure.j_matrix[{}][{}]", i, j), e))?;
            r.push(f);
        }
        out.push(r);
    }
    Ok(Matrix::from_rows(out))
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub name: String,
    pub chart: Chart,
    pub h: GradedElement,
    /// `Err` holds the reason a pure spinor fails integrability.
    pub structure: Option<Result<GCStructure, String>>,
    pub suites: Vec<Suite>,
    pub degree: u32,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::CONCRETE.into_iter().chain([Suite::All]) {
            assert_eq!(Suite::parse(s.name()), Some(s));
            let j = serde_json::to_string(&s).unwrap();
            assert_eq!(j, format!("\"{}\"", s.name()));
        }
    }

    #[test]
    fn defaults_fill_in() {
        let s = Scenario::from_json(r#"{"version": 1, "structure": {"builtin": "complex-r2"}}"#).unwrap();
        assert_eq!(s.max_degree, DEFAULT_DEGREE);
        assert_eq!(s.canonical().suites, Suite::CONCRETE.to_vec());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let e = Scenario::from_json(r#"{"version": 1, "colour": 3}"#).unwrap_err();
        assert!(matches!(e, InputError::Json { line: 1, .. }));
    }

    #[test]
    fn non_closed_h_is_invalid() {
        let s = Scenario::from_json(
            r#"{"version": 1, "chart": {"dim": 4}, "h": "x4*e[1^2^3]", "suites": ["courant-axioms"]}"#,
        )
        .unwrap();
        let e = s.resolve().unwrap_err();
        assert!(e.to_string().contains("not closed"), "{e}");
    }

    #[test]
    fn odd_dimension_rejected_for_structure_suites() {
        let s = Scenario::from_json(r#"{"version": 1, "chart": {"dim": 3}, "suites": ["main-theorem"]}"#).unwrap();
        assert!(matches!(s.resolve(), Err(InputError::Invalid { .. })));
    }

    #[test]
    fn pure_spinor_with_exponent() {
        let s = Scenario::from_json(
            r#"{"version": 1, "chart": {"dim": 2}, "structure": {"pure_spinor": {"form": "1 + x1^2", "exp": "i*e[1^2]"}}}"#,
        )
        .unwrap();
        let r = s.resolve().unwrap();
        assert!(matches!(r.structure, Some(Ok(_))));
    }
}
