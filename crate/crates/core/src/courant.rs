//! Courant algebroids.
//!
//! [`TwistedCourant`] is the standard structure on `T_ℂ ⊕ T*_ℂ` with the
//! Dorfman bracket twisted by a closed 3-form. [`CourantData`] is a split
//! structure given by a frame, a pseudo-metric, an anchor and the brackets of
//! frame sections; brackets of arbitrary sections follow from the Leibniz
//! rules. Both implement [`CourantStructure`], which is what the axiom checker
//! and the Dirac-structure test consume.
//!
//! Sections of a structure of fiber rank `N` are coordinate vectors of length
//! `N`. For `T ⊕ T*` the coordinates are `(x^1, …, x^m, η_1, …, η_m)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{vector, Matrix};
use crate::multivector::{
    de_rham_d, interior, lie_derivative, vector_field_bracket, Frame, FrameKind, GradedElement,
};
use crate::report::{first_failure, Check, Report};
use crate::scalars::{Chart, ScalarField};

/// A section `x + η` of `T_ℂ ⊕ T*_ℂ` over a chart.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GenSection {
    vector: GradedElement,
    form: GradedElement,
}

impl GenSection {
    pub fn new(vector: GradedElement, form: GradedElement) -> Result<Self> {
        if *vector.frame().kind() != FrameKind::Tangent
            || *form.frame().kind() != FrameKind::Cotangent
            || !vector.frame().is_dual_of(form.frame())
        {
            return Err(Error::ChartMismatch);
        }
        for (e, what) in [(&vector, "vector part"), (&form, "form part")] {
            if !e.is_zero() && e.degree() != Some(1) {
                return Err(Error::DegreeMismatch(format!("{} must have degree 1", what)));
            }
        }
        Ok(GenSection { vector, form })
    }

    pub fn zero(chart: &Chart) -> Self {
        let t = Frame::tangent(chart);
        GenSection {
            form: GradedElement::zero(&t.dual()),
            vector: GradedElement::zero(&t),
        }
    }

    /// From coordinates `(x^1, …, x^m, η_1, …, η_m)`.
    pub fn from_coords(chart: &Chart, v: &[ScalarField]) -> Self {
        let m = chart.dim();
        assert_eq!(v.len(), 2 * m, "generalized section needs 2m coordinates");
        let t = Frame::tangent(chart);
        GenSection {
            form: GradedElement::from_vector(&t.dual(), &v[m..]),
            vector: GradedElement::from_vector(&t, &v[..m]),
        }
    }

    pub fn coords(&self) -> Vec<ScalarField> {
        let mut v = self.vector.to_vector();
        v.extend(self.form.to_vector());
        v
    }

    /// Parses the vector and form parts in the graded-element syntax.
    pub fn parse(vector: &str, form: &str, chart: &Chart) -> Result<Self> {
        let t = Frame::tangent(chart);
        GenSection::new(
            GradedElement::parse(vector, chart, &t)?,
            GradedElement::parse(form, chart, &t.dual())?,
        )
    }

    pub fn vector_part(&self) -> &GradedElement {
        &self.vector
    }

    pub fn form_part(&self) -> &GradedElement {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.vector.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.vector.is_zero() && self.form.is_zero()
    }

    pub fn conj(&self) -> Self {
        GenSection {
            vector: self.vector.conj(),
            form: self.form.conj(),
        }
    }

    pub fn scale(&self, f: &ScalarField) -> Self {
        GenSection {
            vector: self.vector.scale(f),
            form: self.form.scale(f),
        }
    }

    fn same_chart(&self, other: &GenSection) -> Result<()> {
        if self.vector.frame() != other.vector.frame() {
            return Err(Error::ChartMismatch);
        }
        Ok(())
    }
}

impl Add for &GenSection {
    type Output = GenSection;
    fn add(self, o: &GenSection) -> GenSection {
        GenSection {
            vector: &self.vector + &o.vector,
            form: &self.form + &o.form,
        }
    }
}

impl Sub for &GenSection {
    type Output = GenSection;
    fn sub(self, o: &GenSection) -> GenSection {
        GenSection {
            vector: &self.vector - &o.vector,
            form: &self.form - &o.form,
        }
    }
}

impl Neg for &GenSection {
    type Output = GenSection;
    fn neg(self) -> GenSection {
        GenSection {
            vector: -&self.vector,
            form: -&self.form,
        }
    }
}

impl fmt::Display for GenSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.vector.is_zero(), self.form.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.vector),
            (true, false) => write!(f, "{}", self.form),
            (false, false) => write!(f, "{} + {}", self.vector, self.form),
        }
    }
}

/// `⟨x1 + η1, x2 + η2⟩ = ½(η2(x1) + η1(x2))`.
pub fn natural_pairing(z1: &GenSection, z2: &GenSection) -> Result<ScalarField> {
    z1.same_chart(z2)?;
    let a = z2.form.det_pair(&z1.vector)?;
    let b = z1.form.det_pair(&z2.vector)?;
    Ok((&a + &b).scale(&crate::scalars::Gaussian::from_ratio(1, 2)))
}

fn half() -> ScalarField {
    ScalarField::from_ratio(1, 2)
}

/// Checks that `h` is a closed 3-form over the cotangent frame of `chart`.
pub fn validate_closed_3form(chart: &Chart, h: &GradedElement) -> Result<()> {
    if **h.frame() != *Frame::cotangent(chart) {
        return Err(Error::ChartMismatch);
    }
    if !h.is_zero() && h.degree() != Some(3) {
        return Err(Error::DegreeMismatch("twisting form must be a 3-form".into()));
    }
    let dh = de_rham_d(h)?;
    if !dh.is_zero() {
        return Err(Error::NotClosed(dh.to_string()));
    }
    Ok(())
}

/// `T_ℂ ⊕ T*_ℂ` with the natural pairing, the tangent projection as anchor
/// and the Dorfman bracket twisted by `H`.
#[derive(Clone, Debug)]
pub struct TwistedCourant {
    chart: Chart,
    h: GradedElement,
}

impl TwistedCourant {
    pub fn new(chart: &Chart, h: GradedElement) -> Result<Self> {
        validate_closed_3form(chart, &h)?;
        Ok(TwistedCourant {
            chart: chart.clone(),
            h,
        })
    }

    pub fn standard(chart: &Chart) -> Self {
        TwistedCourant {
            chart: chart.clone(),
            h: GradedElement::zero(&Frame::cotangent(chart)),
        }
    }

    /// Skips the closedness check; for negative controls only.
    pub fn new_unchecked(chart: &Chart, h: GradedElement) -> Self {
        TwistedCourant {
            chart: chart.clone(),
            h,
        }
    }

    pub fn h(&self) -> &GradedElement {
        &self.h
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Dense antisymmetric components `H_{abc}`.
    fn h_tensor(&self) -> Vec<ScalarField> {
        let m = self.chart.dim();
        let mut t = vec![ScalarField::zero(); m * m * m];
        for (blade, c) in self.h.terms() {
            let idx = crate::multivector::blade_indices(blade);
            let (a, b, d) = (idx[0], idx[1], idx[2]);
            for (p, sign) in [
                ([a, b, d], 1),
                ([b, d, a], 1),
                ([d, a, b], 1),
                ([b, a, d], -1),
                ([a, d, b], -1),
                ([d, b, a], -1),
            ] {
                t[(p[0] * m + p[1]) * m + p[2]] = if sign > 0 { c.clone() } else { -c };
            }
        }
        t
    }

    /// The Dorfman bracket on coordinate vectors, expanded in components.
    fn dorfman_coords(&self, a: &[ScalarField], b: &[ScalarField]) -> Vec<ScalarField> {
        let m = self.chart.dim();
        let (x1, e1) = a.split_at(m);
        let (x2, e2) = b.split_at(m);
        let mut out = vector::bracket(x1, x2);
        let h = if self.h.is_zero() { None } else { Some(self.h_tensor()) };
        for nu in 0..m {
            let mut c = vector::derive(x1, &e2[nu]);
            for mu in 0..m {
                if !e2[mu].is_zero() {
                    let dx = x1[mu].partial(nu);
                    if !dx.is_zero() {
                        c += &e2[mu] * &dx;
                    }
                }
                if !x2[mu].is_zero() {
                    let curl = &e1[nu].partial(mu) - &e1[mu].partial(nu);
                    if !curl.is_zero() {
                        c -= &x2[mu] * &curl;
                    }
                }
            }
            if let Some(h) = &h {
                for p in 0..m {
                    if x1[p].is_zero() {
                        continue;
                    }
                    for q in 0..m {
                        let t = &h[(p * m + q) * m + nu];
                        if !t.is_zero() && !x2[q].is_zero() {
                            c += &(&x1[p] * &x2[q]) * t;
                        }
                    }
                }
            }
            out.push(c);
        }
        out
    }

    fn twist(&self, z1: &GenSection, z2: &GenSection) -> Result<GradedElement> {
        if self.h.is_zero() {
            return Ok(GradedElement::zero(z1.form.frame()));
        }
        interior(&z2.vector, &interior(&z1.vector, &self.h)?)
    }

    /// `[x1,x2] + L_{x1}η2 − ι_{x2}dη1 + ι_{x2}ι_{x1}H`, that is
    /// `[x1,x2] + L_{x1}η2 − L_{x2}η1 + d(η1(x2)) + ι_{x2}ι_{x1}H`.
    pub fn dorfman(&self, z1: &GenSection, z2: &GenSection) -> Result<GenSection> {
        z1.same_chart(z2)?;
        let v = vector_field_bracket(&z1.vector, &z2.vector)?;
        let mut form = lie_derivative(&z1.vector, &z2.form)?;
        form = &form - &interior(&z2.vector, &de_rham_d(&z1.form)?)?;
        form = &form + &self.twist(z1, z2)?;
        GenSection::new(v, form)
    }

    /// `[x1,x2] + L_{x1}η2 − L_{x2}η1 + ½d(η1(x2) − η2(x1)) + ι_{x2}ι_{x1}H`.
    pub fn courant(&self, z1: &GenSection, z2: &GenSection) -> Result<GenSection> {
        z1.same_chart(z2)?;
        let v = vector_field_bracket(&z1.vector, &z2.vector)?;
        let mut form = lie_derivative(&z1.vector, &z2.form)?;
        form = &form - &lie_derivative(&z2.vector, &z1.form)?;
        let p = &z1.form.det_pair(&z2.vector)? - &z2.form.det_pair(&z1.vector)?;
        let dp = de_rham_d(&GradedElement::scalar(z1.form.frame(), &p * &half()))?;
        form = &form + &dp;
        form = &form + &self.twist(z1, z2)?;
        GenSection::new(v, form)
    }

    /// `D f = df`.
    pub fn d_op(&self, f: &ScalarField) -> GenSection {
        let c = Frame::cotangent(&self.chart);
        let df = de_rham_d(&GradedElement::scalar(&c, f.clone())).expect("cotangent frame");
        GenSection {
            vector: GradedElement::zero(&c.dual()),
            form: df,
        }
    }
}

/// Twisted Dorfman bracket; validates that `H` is closed.
pub fn dorfman_twisted(z1: &GenSection, z2: &GenSection, h: &GradedElement) -> Result<GenSection> {
    let chart = chart_of(z1);
    TwistedCourant::new(&chart, h.clone())?.dorfman(z1, z2)
}

/// Twisted Courant bracket; validates that `H` is closed.
pub fn courant_twisted(z1: &GenSection, z2: &GenSection, h: &GradedElement) -> Result<GenSection> {
    let chart = chart_of(z1);
    TwistedCourant::new(&chart, h.clone())?.courant(z1, z2)
}

fn chart_of(z: &GenSection) -> Chart {
    let names = z
        .vector
        .frame()
        .labels()
        .iter()
        .map(|l| l.trim_start_matches("d/d").to_string())
        .collect();
    Chart::new(names).expect("tangent frame labels come from a chart")
}

/// The data a Courant structure exposes on coordinate vectors of its sections.
pub trait CourantStructure: Sync {
    fn chart(&self) -> &Chart;
    /// Fiber rank.
    fn rank(&self) -> usize;
    fn labels(&self) -> Vec<String>;
    fn pairing(&self, a: &[ScalarField], b: &[ScalarField]) -> ScalarField;
    /// Coordinate components of `ρ(a)`.
    fn anchor(&self, a: &[ScalarField]) -> Vec<ScalarField>;
    fn dorfman(&self, a: &[ScalarField], b: &[ScalarField]) -> Vec<ScalarField>;
    /// The section with `⟨Df, z⟩ = ½ρ(z)f` for all `z`.
    fn d_op(&self, f: &ScalarField) -> Vec<ScalarField>;

    fn courant(&self, a: &[ScalarField], b: &[ScalarField]) -> Vec<ScalarField> {
        vector::scale(&half(), &vector::sub(&self.dorfman(a, b), &self.dorfman(b, a)))
    }

    fn frame_sections(&self) -> Vec<Vec<ScalarField>> {
        (0..self.rank()).map(|k| vector::unit(self.rank(), k)).collect()
    }

    fn format_section(&self, v: &[ScalarField]) -> String {
        format_vector(&self.labels(), v)
    }
}

pub(crate) fn format_vector(labels: &[String], v: &[ScalarField]) -> String {
    let parts: Vec<String> = v
        .iter()
        .zip(labels)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, l)| format!("({})*{}", c, l))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

impl CourantStructure for TwistedCourant {
    fn chart(&self) -> &Chart {
        &self.chart
    }

    fn rank(&self) -> usize {
        2 * self.chart.dim()
    }

    fn labels(&self) -> Vec<String> {
        let t = Frame::tangent(&self.chart);
        let mut l = t.labels().to_vec();
        l.extend(t.dual().labels().iter().cloned());
        l
    }

    fn pairing(&self, a: &[ScalarField], b: &[ScalarField]) -> ScalarField {
        let m = self.chart.dim();
        let s = &vector::dot(&a[..m], &b[m..]) + &vector::dot(&b[..m], &a[m..]);
        &s * &half()
    }

    fn anchor(&self, a: &[ScalarField]) -> Vec<ScalarField> {
        a[..self.chart.dim()].to_vec()
    }

    fn dorfman(&self, a: &[ScalarField], b: &[ScalarField]) -> Vec<ScalarField> {
        self.dorfman_coords(a, b)
    }

    fn courant(&self, a: &[ScalarField], b: &[ScalarField]) -> Vec<ScalarField> {
        let z1 = GenSection::from_coords(&self.chart, a);
        let z2 = GenSection::from_coords(&self.chart, b);
        TwistedCourant::courant(self, &z1, &z2)
            .expect("sections share the chart")
            .coords()
    }

    fn d_op(&self, f: &ScalarField) -> Vec<ScalarField> {
        TwistedCourant::d_op(self, f).coords()
    }
}

/// A split Courant structure on a trivialized bundle: Gram matrix of the
/// pseudo-metric, anchor matrix (`m × N`, column `a` is `ρ(e_a)`) and the
/// table of frame brackets `⟦e_a, e_b⟧`.
#[derive(Clone, Debug)]
pub struct CourantData {
    chart: Chart,
    labels: Vec<String>,
    metric: Matrix,
    metric_inv: Matrix,
    anchor: Matrix,
    table: Vec<Vec<Vec<ScalarField>>>,
}

impl CourantData {
    pub fn new(
        chart: &Chart,
        labels: Vec<String>,
        metric: Matrix,
        anchor: Matrix,
        table: Vec<Vec<Vec<ScalarField>>>,
    ) -> Result<Self> {
        let n = labels.len();
        let shape_ok = metric.rows() == n
            && metric.cols() == n
            && anchor.rows() == chart.dim()
            && anchor.cols() == n
            && table.len() == n
            && table.iter().all(|r| r.len() == n && r.iter().all(|v| v.len() == n));
        if !shape_ok {
            return Err(Error::InvalidStructure("inconsistent Courant data dimensions".into()));
        }
        if metric != metric.transpose() {
            return Err(Error::InvalidStructure("pseudo-metric is not symmetric".into()));
        }
        let metric_inv = metric.inverse().map_err(|_| Error::SingularMetric)?;
        Ok(CourantData {
            chart: chart.clone(),
            labels,
            metric,
            metric_inv,
            anchor,
            table,
        })
    }

    /// Tabulates any structure on its own frame.
    pub fn tabulate<S: CourantStructure + ?Sized>(s: &S) -> Result<Self> {
        let frame = s.frame_sections();
        let metric = Matrix::from_rows(
            frame
                .iter()
                .map(|a| frame.iter().map(|b| s.pairing(a, b)).collect())
                .collect(),
        );
        let anchor = Matrix::from_cols(
            &frame.iter().map(|a| s.anchor(a)).collect::<Vec<_>>(),
            s.chart().dim(),
        );
        let table = frame
            .iter()
            .map(|a| frame.iter().map(|b| s.dorfman(a, b)).collect())
            .collect();
        CourantData::new(s.chart(), s.labels(), metric, anchor, table)
    }

    pub fn metric(&self) -> &Matrix {
        &self.metric
    }

    pub fn anchor_matrix(&self) -> &Matrix {
        &self.anchor
    }

    pub fn table(&self) -> &[Vec<Vec<ScalarField>>] {
        &self.table
    }
}

impl CourantStructure for CourantData {
    fn chart(&self) -> &Chart {
        &self.chart
    }

    fn rank(&self) -> usize {
        self.labels.len()
    }

    fn labels(&self) -> Vec<String> {
        self.labels.clone()
    }

    fn pairing(&self, a: &[ScalarField], b: &[ScalarField]) -> ScalarField {
        vector::dot(a, &self.metric.apply(b))
    }

    fn anchor(&self, a: &[ScalarField]) -> Vec<ScalarField> {
        self.anchor.apply(a)
    }

    /// `Σ f_a g_b ⟦e_a,e_b⟧ + Σ ρ(z1)(g_b) e_b − Σ ρ(z2)(f_a) e_a + 2Σ ⟨e_a,z2⟩ D f_a`.
    fn dorfman(&self, a: &[ScalarField], b: &[ScalarField]) -> Vec<ScalarField> {
        let n = self.rank();
        let mut out = vec![ScalarField::zero(); n];
        for (i, f) in a.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (j, g) in b.iter().enumerate() {
                if g.is_zero() {
                    continue;
                }
                let fg = f * g;
                for (k, t) in self.table[i][j].iter().enumerate() {
                    if !t.is_zero() {
                        out[k] += &fg * t;
                    }
                }
            }
        }
        let r1 = self.anchor(a);
        let r2 = self.anchor(b);
        let gb = self.metric.apply(b);
        for k in 0..n {
            out[k] += vector::derive(&r1, &b[k]);
            out[k] -= vector::derive(&r2, &a[k]);
        }
        for (i, f) in a.iter().enumerate() {
            if f.is_constant() || gb[i].is_zero() {
                continue;
            }
            let df = self.d_op(f);
            let c = &gb[i] * &ScalarField::from_int(2);
            for k in 0..n {
                if !df[k].is_zero() {
                    out[k] += &c * &df[k];
                }
            }
        }
        out
    }

    fn d_op(&self, f: &ScalarField) -> Vec<ScalarField> {
        let n = self.rank();
        let rhs: Vec<ScalarField> = (0..n)
            .map(|a| {
                let col = self.anchor.col(a);
                &vector::derive(&col, f) * &half()
            })
            .collect();
        self.metric_inv.apply(&rhs)
    }
}

/// Names of the six axioms in the order they are checked.
pub const AXIOMS: [&str; 6] = [
    "(1) Jacobi/Leibniz identity",
    "(2) anchor preserves brackets",
    "(3) Leibniz rule in the second slot",
    "(4) symmetric part equals 2D<z1,z2>",
    "(5) [[Df, z]] = 0",
    "(6) invariance of the pseudo-metric",
];

type Sec = Vec<ScalarField>;

/// Tuples of generators, plain and with one monomial multiplier in one slot.
fn slotted(gens: &[Sec], multipliers: &[ScalarField], arity: usize) -> Vec<Vec<Sec>> {
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..arity {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..gens.len()).map(move |g| {
                    let mut t = t.clone();
                    t.push(g);
                    t
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for t in &tuples {
        let base: Vec<Sec> = t.iter().map(|&g| gens[g].clone()).collect();
        out.push(base.clone());
        for slot in 0..arity {
            for f in multipliers {
                let mut v = base.clone();
                v[slot] = vector::scale(f, &v[slot]);
                out.push(v);
            }
        }
    }
    out
}

/// Evaluates the six axioms on the frame sections (or `generators`) combined
/// with monomial multipliers of degree `1..=degree`.
pub fn check_courant_axioms<S: CourantStructure + ?Sized>(
    s: &S,
    generators: Option<&[Sec]>,
    degree: u32,
) -> Report {
    let gens: Vec<Sec> = match generators {
        Some(g) => g.to_vec(),
        None => s.frame_sections(),
    };
    let monos = s.chart().monomials(degree);
    let fmt = |v: &Sec| s.format_section(v);
    let singles = slotted(&gens, &monos, 1);
    let pairs = slotted(&gens, &monos, 2);
    let triples = slotted(&gens, &monos, 3);
    let mut report = Report::new("courant-axioms");
    report.banner("axiom (6) is read with the unbound z taken to be z3");
    report.banner(format!(
        "battery: {} generators, monomial multipliers up to degree {}",
        gens.len(),
        degree
    ));

    let w1 = first_failure(&triples, |t| {
        let (z1, z2, z3) = (&t[0], &t[1], &t[2]);
        let lhs = s.dorfman(z1, &s.dorfman(z2, z3));
        let rhs = vector::add(&s.dorfman(&s.dorfman(z1, z2), z3), &s.dorfman(z2, &s.dorfman(z1, z3)));
        let r = vector::sub(&lhs, &rhs);
        (!vector::is_zero(&r)).then(|| {
            format!(
                "z1 = {}, z2 = {}, z3 = {}: residual {}",
                fmt(z1),
                fmt(z2),
                fmt(z3),
                fmt(&r)
            )
        })
    });
    report.push(Check::from_witness(AXIOMS[0], triples.len(), w1));

    let w2 = first_failure(&pairs, |t| {
        let lhs = s.anchor(&s.dorfman(&t[0], &t[1]));
        let rhs = vector::bracket(&s.anchor(&t[0]), &s.anchor(&t[1]));
        let r = vector::sub(&lhs, &rhs);
        (!vector::is_zero(&r)).then(|| {
            let labels = Frame::tangent(s.chart()).labels().to_vec();
            format!(
                "z1 = {}, z2 = {}: residual {}",
                fmt(&t[0]),
                fmt(&t[1]),
                format_vector(&labels, &r)
            )
        })
    });
    report.push(Check::from_witness(AXIOMS[1], pairs.len(), w2));

    let mut fs = vec![ScalarField::one()];
    fs.extend(monos.iter().cloned());
    let w3 = first_failure(&pairs, |t| {
        for f in &fs {
            let lhs = s.dorfman(&t[0], &vector::scale(f, &t[1]));
            let rf = vector::derive(&s.anchor(&t[0]), f);
            let rhs = vector::add(&vector::scale(&rf, &t[1]), &vector::scale(f, &s.dorfman(&t[0], &t[1])));
            let r = vector::sub(&lhs, &rhs);
            if !vector::is_zero(&r) {
                return Some(format!(
                    "z1 = {}, z2 = {}, f = {}: residual {}",
                    fmt(&t[0]),
                    fmt(&t[1]),
                    f,
                    fmt(&r)
                ));
            }
        }
        None
    });
    report.push(Check::from_witness(AXIOMS[2], pairs.len() * fs.len(), w3));

    let w4 = first_failure(&pairs, |t| {
        let lhs = vector::add(&s.dorfman(&t[0], &t[1]), &s.dorfman(&t[1], &t[0]));
        let rhs = vector::scale(&ScalarField::from_int(2), &s.d_op(&s.pairing(&t[0], &t[1])));
        let r = vector::sub(&lhs, &rhs);
        (!vector::is_zero(&r))
            .then(|| format!("z1 = {}, z2 = {}: residual {}", fmt(&t[0]), fmt(&t[1]), fmt(&r)))
    });
    report.push(Check::from_witness(AXIOMS[3], pairs.len(), w4));

    let test_fns = s.chart().monomials(degree + 1);
    let w5 = first_failure(&singles, |t| {
        for f in &test_fns {
            let r = s.dorfman(&s.d_op(f), &t[0]);
            if !vector::is_zero(&r) {
                return Some(format!("f = {}, z = {}: residual {}", f, fmt(&t[0]), fmt(&r)));
            }
        }
        None
    });
    report.push(Check::from_witness(AXIOMS[4], singles.len() * test_fns.len(), w5));

    let w6 = first_failure(&triples, |t| {
        let (z1, z2, z3) = (&t[0], &t[1], &t[2]);
        let lhs = vector::derive(&s.anchor(z1), &s.pairing(z2, z3));
        let rhs = &s.pairing(&s.dorfman(z1, z2), z3) + &s.pairing(z2, &s.dorfman(z1, z3));
        let r = &lhs - &rhs;
        (!r.is_zero()).then(|| {
            format!("z1 = {}, z2 = {}, z3 = {}: residual {}", fmt(z1), fmt(z2), fmt(z3), r)
        })
    });
    report.push(Check::from_witness(AXIOMS[5], triples.len(), w6));
    report
}

/// Whether the span of `sections` is a Dirac structure of `s`: half rank,
/// isotropic, and closed under the Dorfman bracket.
pub fn is_dirac<S: CourantStructure + ?Sized>(sections: &[Sec], s: &S) -> Result<Check> {
    let n = s.rank();
    let k = sections.len();
    let span = Matrix::from_cols(sections, n);
    if span.rank() < k {
        return Err(Error::DependentFrame);
    }
    let name = "Dirac structure";
    if 2 * k != n {
        return Ok(Check::fail(name, 0, format!("rank {} is not half of {}", k, n)));
    }
    let mut cases = 0;
    for (i, a) in sections.iter().enumerate() {
        for (j, b) in sections.iter().enumerate() {
            cases += 1;
            let p = s.pairing(a, b);
            if !p.is_zero() {
                return Ok(Check::fail(
                    name,
                    cases,
                    format!("not isotropic: <s{}, s{}> = {}", i + 1, j + 1, p),
                ));
            }
        }
    }
    for (i, a) in sections.iter().enumerate() {
        for (j, b) in sections.iter().enumerate() {
            cases += 1;
            let br = s.dorfman(a, b);
            if span.solve(&br).is_none() {
                return Ok(Check::fail(
                    name,
                    cases,
                    format!(
                        "not closed: [[s{}, s{}]] = {} leaves the span",
                        i + 1,
                        j + 1,
                        s.format_section(&br)
                    ),
                ));
            }
        }
    }
    Ok(Check::pass(name, cases))
}

/// Convenience: frame sections of a tangent or cotangent frame as generalized sections.
pub fn coordinate_sections(chart: &Chart, kind: FrameKind) -> Vec<Sec> {
    let m = chart.dim();
    let off = if kind == FrameKind::Cotangent { m } else { 0 };
    (0..m).map(|k| vector::unit(2 * m, off + k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(k: usize) -> ScalarField {
        ScalarField::var(k)
    }

    fn sec(chart: &Chart, v: &str, f: &str) -> GenSection {
        GenSection::parse(v, f, chart).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let c = Chart::standard(2);
        let d1 = sec(&c, "e[1]", "0");
        let dx1 = sec(&c, "0", "e[1]");
        assert_eq!(natural_pairing(&d1, &dx1).unwrap(), half());
        assert!(natural_pairing(&d1, &sec(&c, "e[2]", "0")).unwrap().is_zero());
        let z = sec(&c, "e[1]", "e[1]");
        assert_eq!(natural_pairing(&z, &z).unwrap(), ScalarField::one());
        let other = sec(&Chart::standard(3), "e[1]", "0");
        assert_eq!(natural_pairing(&d1, &other), Err(Error::ChartMismatch));
    }

    #[test]
    fn dorfman_examples() {
        let c = Chart::standard(3);
        let zero = GradedElement::zero(&Frame::cotangent(&c));
        let d1 = sec(&c, "e[1]", "0");
        let z2 = sec(&c, "x1*e[2]", "0");
        assert_eq!(dorfman_twisted(&d1, &z2, &zero).unwrap(), sec(&c, "e[2]", "0"));
        let h = GradedElement::parse("e[1^2^3]", &c, &Frame::cotangent(&c)).unwrap();
        let d2 = sec(&c, "e[2]", "0");
        assert_eq!(dorfman_twisted(&d1, &d2, &h).unwrap(), sec(&c, "0", "e[3]"));
        assert_eq!(courant_twisted(&d1, &d2, &h).unwrap(), sec(&c, "0", "e[3]"));
        assert!(dorfman_twisted(&d1, &sec(&c, "0", "e[1]"), &zero).unwrap().is_zero());
        let bad = GradedElement::parse("x1*e[2^3^4]", &Chart::standard(4), &Frame::cotangent(&Chart::standard(4))).unwrap();
        let c4 = Chart::standard(4);
        assert!(matches!(
            dorfman_twisted(&sec(&c4, "e[1]", "0"), &sec(&c4, "e[2]", "0"), &bad),
            Err(Error::NotClosed(_))
        ));
    }

    #[test]
    fn courant_example_expands_printed_formula() {
        let c = Chart::standard(2);
        let s = TwistedCourant::standard(&c);
        let z1 = sec(&c, "e[1]", "x2*e[1]");
        let z2 = sec(&c, "e[2]", "0");
        // [∂1,∂2] = 0, L_{∂1}0 = 0, −L_{∂2}(x2 dx1) = −dx1, ½d(0 − 0) = 0
        assert_eq!(s.courant(&z1, &z2).unwrap(), sec(&c, "0", "-e[1]"));
        assert!(s.courant(&z1, &z1).unwrap().is_zero());
    }

    #[test]
    fn dorfman_is_courant_plus_d_pairing() {
        let c = Chart::standard(3);
        let h = GradedElement::parse("e[1^2^3]", &c, &Frame::cotangent(&c)).unwrap();
        let s = TwistedCourant::new(&c, h).unwrap();
        let zs = [
            sec(&c, "x1*e[2] + e[3]", "x2*e[1]"),
            sec(&c, "x3^2*e[1]", "x1*x2*e[3] + e[2]"),
            sec(&c, "0", "x3*e[3]"),
        ];
        for a in &zs {
            for b in &zs {
                let p = natural_pairing(a, b).unwrap();
                let rhs = &s.courant(a, b).unwrap() + &s.d_op(&p);
                assert_eq!(s.dorfman(a, b).unwrap(), rhs);
            }
        }
    }

    #[test]
    fn d_op_solves_defining_equation() {
        let c = Chart::standard(2);
        let s = TwistedCourant::standard(&c);
        assert_eq!(CourantStructure::d_op(&s, &x(0)), sec(&c, "0", "e[1]").coords());
        let data = CourantData::tabulate(&s).unwrap();
        let f = &x(0) * &x(1);
        assert_eq!(data.d_op(&f), CourantStructure::d_op(&s, &f));
        assert!(vector::is_zero(&data.d_op(&ScalarField::from_int(3))));
    }

    #[test]
    fn table_matches_direct_formula() {
        let c = Chart::standard(3);
        let h = GradedElement::parse("e[1^2^3]", &c, &Frame::cotangent(&c)).unwrap();
        let s = TwistedCourant::new(&c, h).unwrap();
        let data = CourantData::tabulate(&s).unwrap();
        let a = sec(&c, "x1*e[2] + x3*e[3]", "x2^2*e[1]").coords();
        let b = sec(&c, "x2*e[1]", "x1*x3*e[3] + e[2]").coords();
        assert_eq!(data.dorfman(&a, &b), CourantStructure::dorfman(&s, &a, &b));
        assert_eq!(data.dorfman(&b, &a), CourantStructure::dorfman(&s, &b, &a));
        let (za, zb) = (GenSection::from_coords(&c, &a), GenSection::from_coords(&c, &b));
        assert_eq!(CourantStructure::dorfman(&s, &a, &b), s.dorfman(&za, &zb).unwrap().coords());
        assert_eq!(CourantStructure::dorfman(&s, &b, &a), s.dorfman(&zb, &za).unwrap().coords());
    }

    #[test]
    fn axioms_hold_for_standard_structure() {
        let c = Chart::standard(2);
        let r = check_courant_axioms(&TwistedCourant::standard(&c), None, 1);
        assert!(r.passed(), "{}", r);
    }

    #[test]
    fn dirac_examples() {
        let c = Chart::standard(2);
        let s = TwistedCourant::standard(&c);
        assert!(is_dirac(&coordinate_sections(&c, FrameKind::Tangent), &s).unwrap().passed);
        assert!(is_dirac(&coordinate_sections(&c, FrameKind::Cotangent), &s).unwrap().passed);
        let bad = vec![sec(&c, "e[1]", "e[1]").coords(), sec(&c, "e[2]", "0").coords()];
        assert!(!is_dirac(&bad, &s).unwrap().passed);
        let dep = vec![sec(&c, "e[1]", "0").coords(), sec(&c, "x1*e[1]", "0").coords()];
        assert_eq!(is_dirac(&dep, &s), Err(Error::DependentFrame));
    }
}
