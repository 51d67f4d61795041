//! Lie algebroids on trivialized bundles and the operators built from a pair
//! of them: differential, Schouten bracket, bialgebroid compatibility, the
//! Batalin–Vilkovisky operator, modular cocycles, the modified operators
//! `d̃_*`, `∂̃`, `D̃`, Laplacians and the induced Poisson bivector.
//!
//! Conventions (reported by the verification suites):
//! * `d_A e^k = −Σ_{i<j} c^k_{ij} e^i ∧ e^j`, `d_A f = Σ_i a(e_i)(f) e^i`.
//! * Schouten bracket: `[X, f] = a(X)f` for degree-1 `X`,
//!   `[P, Q∧R] = [P,Q]∧R + (−1)^{(p−1)q} Q∧[P,R]` and
//!   `[P, Q] = −(−1)^{(p−1)(q−1)} [Q, P]`. Hence `[X∧Y, f] = X·Y(f) − X(f)·Y`.
//! * `∂β = (Ω♯)^{-1}((−1)^l d_A Ω♯ β)` for `β` of degree `l`.

use std::sync::Arc;

use crate::courant::CourantData;
use crate::error::{Error, Result};
use crate::linalg::{vector, Matrix};
use crate::multivector::{
    blade_degree, blade_indices, blades_of_degree, volume_divergence, Blade, Frame,
    FrameKind, GradedElement,
};
use crate::report::{first_failure, Check, Report};
use crate::scalars::{Chart, ScalarField};

fn sign(k: i64) -> ScalarField {
    if k.rem_euclid(2) == 0 {
        ScalarField::one()
    } else {
        ScalarField::from_int(-1)
    }
}

/// `ι_x φ` for a degree-1 `x`, zero on the degree-0 part of `φ`.
pub(crate) fn iota(x: &GradedElement, phi: &GradedElement) -> Result<GradedElement> {
    let mut p = phi.clone();
    let s = phi.part(0);
    if !s.is_zero() {
        p = &p - &s;
    }
    x.contract(&p)
}

fn half() -> ScalarField {
    ScalarField::from_ratio(1, 2)
}

/// A Lie algebroid structure on the trivial bundle with frame `e_1, …, e_r`:
/// anchor columns `a(e_i)` and structure functions `[e_i, e_j] = Σ_k c^k_{ij} e_k`.
#[derive(Clone, Debug)]
pub struct LieAlgebroid {
    chart: Chart,
    frame: Arc<Frame>,
    anchor: Matrix,
    /// `c[i][j][k]`
    structure: Vec<Vec<Vec<ScalarField>>>,
    d_basis: Vec<GradedElement>,
}

impl LieAlgebroid {
    pub fn new(
        chart: &Chart,
        frame: &Arc<Frame>,
        anchor: Matrix,
        structure: Vec<Vec<Vec<ScalarField>>>,
    ) -> Result<Self> {
        let r = frame.rank();
        if anchor.rows() != chart.dim() || anchor.cols() != r {
            return Err(Error::InvalidAlgebroid(format!(
                "anchor must be {}x{}, got {}x{}",
                chart.dim(),
                r,
                anchor.rows(),
                anchor.cols()
            )));
        }
        if structure.len() != r
            || structure.iter().any(|row| row.len() != r || row.iter().any(|v| v.len() != r))
        {
            return Err(Error::InvalidAlgebroid("structure functions must be r x r x r".into()));
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    if structure[i][j][k] != -&structure[j][i][k] {
                        return Err(Error::InvalidAlgebroid(format!(
                            "c^{}_({},{}) is not antisymmetric",
                            k + 1,
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        let mut a = LieAlgebroid {
            chart: chart.clone(),
            frame: frame.clone(),
            anchor,
            structure,
            d_basis: Vec::new(),
        };
        a.d_basis = a.compute_d_basis();
        Ok(a)
    }

    /// The tangent bundle of the chart.
    pub fn tangent(chart: &Chart) -> Self {
        let m = chart.dim();
        let zero = vec![vec![vec![ScalarField::zero(); m]; m]; m];
        LieAlgebroid::new(chart, &Frame::tangent(chart), Matrix::identity(m), zero)
            .expect("tangent algebroid")
    }

    /// Zero anchor and zero bracket on the given frame.
    pub fn trivial(chart: &Chart, frame: &Arc<Frame>) -> Self {
        let r = frame.rank();
        let zero = vec![vec![vec![ScalarField::zero(); r]; r]; r];
        LieAlgebroid::new(chart, frame, Matrix::zeros(chart.dim(), r), zero)
            .expect("trivial algebroid")
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn rank(&self) -> usize {
        self.frame.rank()
    }

    pub fn anchor_matrix(&self) -> &Matrix {
        &self.anchor
    }

    pub fn structure(&self) -> &[Vec<Vec<ScalarField>>] {
        &self.structure
    }

    /// Same data with one structure function replaced (and its antisymmetric
    /// partner); used to build failing controls.
    pub fn perturbed(&self, i: usize, j: usize, k: usize, c: ScalarField) -> Result<Self> {
        let mut s = self.structure.clone();
        s[j][i][k] = -&c;
        s[i][j][k] = c;
        LieAlgebroid::new(&self.chart, &self.frame, self.anchor.clone(), s)
    }

    /// Coordinate components of `a(X)` for a degree-1 `X`.
    pub fn anchor_of(&self, x: &GradedElement) -> Vec<ScalarField> {
        let xs: Vec<ScalarField> = (0..self.rank()).map(|i| x.coeff(1 << i)).collect();
        self.anchor.apply(&xs)
    }

    /// `a(X)(f)` for a degree-1 `X`.
    pub fn apply_anchor(&self, x: &GradedElement, f: &ScalarField) -> ScalarField {
        vector::derive(&self.anchor_of(x), f)
    }

    fn anchor_col(&self, i: usize) -> Vec<ScalarField> {
        self.anchor.col(i)
    }

    fn require_frame(&self, e: &GradedElement) -> Result<()> {
        if e.frame() != &self.frame {
            return Err(Error::FrameMismatch(format!(
                "expected an element over {:?}",
                self.frame.kind()
            )));
        }
        Ok(())
    }

    fn require_dual(&self, e: &GradedElement) -> Result<()> {
        if !e.frame().is_dual_of(&self.frame) {
            return Err(Error::FrameMismatch(format!(
                "expected an element over the dual of {:?}",
                self.frame.kind()
            )));
        }
        Ok(())
    }

    fn compute_d_basis(&self) -> Vec<GradedElement> {
        let r = self.rank();
        let dual = self.frame.dual();
        let mut de = Vec::with_capacity(r);
        for k in 0..r {
            let mut e = GradedElement::zero(&dual);
            for i in 0..r {
                for j in i + 1..r {
                    let c = &self.structure[i][j][k];
                    if !c.is_zero() {
                        e.add_term((1 << i) | (1 << j), -c);
                    }
                }
            }
            de.push(e);
        }
        let mut out = vec![GradedElement::zero(&dual); 1usize << r];
        for blade in 1..(1u32 << r) {
            let first = blade.trailing_zeros() as usize;
            let rest = blade & !(1 << first);
            // d(e^i ∧ R) = d e^i ∧ R − e^i ∧ dR
            let r_el = GradedElement::from_blade(&dual, rest, ScalarField::one());
            let head = GradedElement::from_blade(&dual, 1 << first, ScalarField::one());
            let a = de[first].wedge(&r_el).expect("same frame");
            let b = head.wedge(&out[rest as usize]).expect("same frame");
            out[blade as usize] = &a - &b;
        }
        out
    }

    /// `d_A f = Σ_i a(e_i)(f) e^i`.
    pub fn d_function(&self, f: &ScalarField) -> GradedElement {
        let dual = self.frame.dual();
        let mut out = GradedElement::zero(&dual);
        if f.is_constant() {
            return out;
        }
        for i in 0..self.rank() {
            out.add_term(1 << i, vector::derive(&self.anchor_col(i), f));
        }
        out
    }

    /// The algebroid differential on `Γ(Λ•A*)`.
    pub fn d(&self, xi: &GradedElement) -> Result<GradedElement> {
        self.require_dual(xi)?;
        let mut out = GradedElement::zero(xi.frame());
        for (blade, f) in xi.terms() {
            let df = self.d_function(f);
            let eb = GradedElement::from_blade(xi.frame(), blade, ScalarField::one());
            out = &out + &df.wedge(&eb)?;
            let db = &self.d_basis[blade as usize];
            if !db.is_zero() {
                out = &out + &db.scale(f);
            }
        }
        Ok(out)
    }

    /// `[X, e_i]` for a degree-1 `X`.
    fn bracket_vector_frame(&self, x: &GradedElement, i: usize) -> GradedElement {
        let r = self.rank();
        let mut out = GradedElement::zero(&self.frame);
        let ai = self.anchor_col(i);
        for k in 0..r {
            let h = x.coeff(1 << k);
            if h.is_zero() {
                continue;
            }
            // [h e_k, e_i] = h c^l_{ki} e_l − a(e_i)(h) e_k
            for l in 0..r {
                let c = &self.structure[k][i][l];
                if !c.is_zero() {
                    out.add_term(1 << l, &h * c);
                }
            }
            let ah = vector::derive(&ai, &h);
            if !ah.is_zero() {
                out.add_term(1 << k, -ah);
            }
        }
        out
    }

    /// `L_X P = [X, P]` for a degree-1 `X`.
    fn lie_vector(&self, x: &GradedElement, p: &GradedElement) -> Result<GradedElement> {
        let mut out = GradedElement::zero(&self.frame);
        let ax = self.anchor_of(x);
        let brackets: Vec<GradedElement> =
            (0..self.rank()).map(|i| self.bracket_vector_frame(x, i)).collect();
        for (blade, f) in p.terms() {
            let af = vector::derive(&ax, f);
            if !af.is_zero() {
                out.add_term(blade, af);
            }
            let idx = blade_indices(blade);
            for (pos, &i) in idx.iter().enumerate() {
                if brackets[i].is_zero() {
                    continue;
                }
                let before = blade_from(&idx[..pos]);
                let after = blade_from(&idx[pos + 1..]);
                let b = GradedElement::from_blade(&self.frame, before, f.clone());
                let a = GradedElement::from_blade(&self.frame, after, ScalarField::one());
                out = &out + &b.wedge(&brackets[i])?.wedge(&a)?;
            }
        }
        Ok(out)
    }

    /// `[g, f e_I] = f Σ_k (−1)^k (−a(e_{i_k})g) e_{I∖i_k}` (0-based `k`).
    fn bracket_function_left(&self, g: &ScalarField, p: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(&self.frame);
        if g.is_constant() {
            return out;
        }
        let ag: Vec<ScalarField> =
            (0..self.rank()).map(|i| vector::derive(&self.anchor_col(i), g)).collect();
        for (blade, f) in p.terms() {
            for (k, &i) in blade_indices(blade).iter().enumerate() {
                if ag[i].is_zero() {
                    continue;
                }
                let c = f * &ag[i];
                let c = if k % 2 == 0 { -c } else { c };
                out.add_term(blade & !(1 << i), c);
            }
        }
        out
    }

    fn schouten_homogeneous(&self, p: &GradedElement, pdeg: usize, q: &GradedElement) -> Result<GradedElement> {
        let mut out = GradedElement::zero(&self.frame);
        for (qb, g) in q.terms() {
            let qdeg = blade_degree(qb);
            let term = if qdeg == 0 {
                if pdeg == 0 {
                    continue;
                }
                // [P, g] = −(−1)^{p−1} [g, P]
                let t = self.bracket_function_left(g, p);
                if pdeg % 2 == 1 {
                    -t
                } else {
                    t
                }
            } else {
                // [P, g e_J] = [P, g] ∧ e_J + g [P, e_J]
                let ej = GradedElement::from_blade(&self.frame, qb, ScalarField::one());
                let mut t = GradedElement::zero(&self.frame);
                if pdeg > 0 && !g.is_constant() {
                    let pg = self.schouten_homogeneous(p, pdeg, &GradedElement::scalar(&self.frame, g.clone()))?;
                    t = &t + &pg.wedge(&ej)?;
                }
                t = &t + &self.bracket_with_blade(p, pdeg, qb)?.scale(g);
                t
            };
            out = &out + &term;
        }
        Ok(out)
    }

    /// `[P, e_J]` by the derivation rule in the second slot.
    fn bracket_with_blade(&self, p: &GradedElement, pdeg: usize, qb: Blade) -> Result<GradedElement> {
        let idx = blade_indices(qb);
        let j = idx[0];
        let rest = qb & !(1 << j);
        // [P, e_j] = −[e_j, P]
        let ej = GradedElement::from_blade(&self.frame, 1 << j, ScalarField::one());
        let pj = -self.lie_vector(&ej, p)?;
        let rest_el = GradedElement::from_blade(&self.frame, rest, ScalarField::one());
        let mut out = pj.wedge(&rest_el)?;
        if rest != 0 {
            let inner = self.bracket_with_blade(p, pdeg, rest)?;
            let t = ej.wedge(&inner)?;
            out = if pdeg.is_multiple_of(2) { &out - &t } else { &out + &t };
        }
        Ok(out)
    }

    /// Schouten bracket on `Γ(Λ•A)`, extended bilinearly over mixed degrees.
    pub fn schouten(&self, p: &GradedElement, q: &GradedElement) -> Result<GradedElement> {
        self.require_frame(p)?;
        self.require_frame(q)?;
        let mut out = GradedElement::zero(&self.frame);
        let pmax = p.max_degree().unwrap_or(0);
        for k in 0..=pmax {
            let pk = p.part(k);
            if pk.is_zero() {
                continue;
            }
            out = &out + &self.schouten_homogeneous(&pk, k, q)?;
        }
        Ok(out)
    }

    /// `L_x φ = ι_x d φ + d ι_x φ` on `Γ(Λ•A*)` for a degree-1 `x`.
    pub fn lie_on_forms(&self, x: &GradedElement, phi: &GradedElement) -> Result<GradedElement> {
        self.require_frame(x)?;
        let a = iota(x, &self.d(phi)?)?;
        let b = self.d(&iota(x, phi)?)?;
        Ok(&a + &b)
    }

    /// Checks the Lie algebroid axioms: `d_A² = 0` on functions and frame
    /// forms (anchor morphism and Jacobi identity), and the anchor identity
    /// `a([e_i,e_j]) = [a(e_i), a(e_j)]`.
    pub fn check(&self, degree: u32) -> Report {
        let mut report = Report::new("lie-algebroid");
        let r = self.rank();
        let dual = self.frame.dual();
        let pairs: Vec<(usize, usize)> =
            (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
        let w = first_failure(&pairs, |&(i, j)| {
            let lhs = self.anchor.apply(&self.structure[i][j]);
            let rhs = vector::bracket(&self.anchor_col(i), &self.anchor_col(j));
            let res = vector::sub(&lhs, &rhs);
            (!vector::is_zero(&res)).then(|| {
                format!(
                    "a([e{0},e{1}]) - [a(e{0}),a(e{1})] = {2:?}",
                    i + 1,
                    j + 1,
                    res.iter().map(|c| c.to_string()).collect::<Vec<_>>()
                )
            })
        });
        report.push(Check::from_witness("anchor is a bracket morphism", pairs.len(), w));

        let mut forms: Vec<GradedElement> = self.chart.monomials(degree + 1)
            .into_iter()
            .map(|f| GradedElement::scalar(&dual, f))
            .collect();
        let mut mults = vec![ScalarField::one()];
        mults.extend(self.chart.monomials(degree));
        for k in 0..r {
            for f in &mults {
                forms.push(GradedElement::from_blade(&dual, 1 << k, f.clone()));
            }
        }
        let w = first_failure(&forms, |xi| {
            let dd = self.d(&self.d(xi).ok()?).ok()?;
            (!dd.is_zero()).then(|| format!("d(d({})) = {}", xi, dd))
        });
        report.push(Check::from_witness("d_A squares to zero", forms.len(), w));
        report
    }
}

fn blade_from(idx: &[usize]) -> Blade {
    idx.iter().fold(0, |b, &i| b | (1 << i))
}

/// Generators for derivation-type checks: monomial functions and frame
/// sections times `1` and monomials.
fn generators(frame: &Arc<Frame>, chart: &Chart, degree: u32) -> Vec<GradedElement> {
    let monos = chart.monomials(degree);
    let mut out: Vec<GradedElement> =
        monos.iter().map(|f| GradedElement::scalar(frame, f.clone())).collect();
    let mut mults = vec![ScalarField::one()];
    mults.extend(monos);
    for k in 0..frame.rank() {
        for f in &mults {
            out.push(GradedElement::from_blade(frame, 1 << k, f.clone()));
        }
    }
    out
}

fn check_pair_frames(a: &LieAlgebroid, astar: &LieAlgebroid) -> Result<()> {
    if !astar.frame.is_dual_of(&a.frame) || a.chart != astar.chart {
        return Err(Error::FrameMismatch("the pair must live on dual frames of one chart".into()));
    }
    Ok(())
}

/// Checks that `d_*` is a derivation of the Schouten bracket of `A`:
/// `d_*[X,Y] = [d_*X, Y] + (−1)^{|X|−1}[X, d_*Y]` on the generator battery.
pub fn check_bialgebroid(a: &LieAlgebroid, astar: &LieAlgebroid, degree: u32) -> Report {
    let mut report = Report::new("bialgebroid");
    report.banner("Schouten convention: [X,f] = a(X)f, [X^Y,f] = X Y(f) - X(f) Y");
    if let Err(e) = check_pair_frames(a, astar) {
        report.push(Check::fail("dual frames", 0, e.to_string()));
        return report;
    }
    report.extend(a.check(degree));
    report.extend(astar.check(degree));
    let gens = generators(&a.frame, &a.chart, degree);
    let pairs: Vec<(usize, usize)> =
        (0..gens.len()).flat_map(|i| (0..gens.len()).map(move |j| (i, j))).collect();
    let w = first_failure(&pairs, |&(i, j)| {
        let (x, y) = (&gens[i], &gens[j]);
        let res = derivation_defect(a, astar, x, y).ok()?;
        (!res.is_zero()).then(|| format!("X = {}, Y = {}: residual {}", x, y, res))
    });
    report.push(Check::from_witness("d_* is a derivation of the Schouten bracket", pairs.len(), w));
    report
}

fn derivation_defect(
    a: &LieAlgebroid,
    astar: &LieAlgebroid,
    x: &GradedElement,
    y: &GradedElement,
) -> Result<GradedElement> {
    let xd = x.degree().unwrap_or(0);
    let lhs = astar.d(&a.schouten(x, y)?)?;
    let t1 = a.schouten(&astar.d(x)?, y)?;
    let t2 = a.schouten(x, &astar.d(y)?)?;
    let rhs = if xd % 2 == 1 { &t1 + &t2 } else { &t1 - &t2 };
    Ok(&lhs - &rhs)
}

/// The double `A ⊕ A*`: pairing `½(ξ1(X2) + ξ2(X1))`, anchor `a + a*` and the
/// Dorfman bracket
/// `([X1,X2] + L_{ξ1}X2 − ι_{ξ2}d_*X1) + ([ξ1,ξ2]_* + L_{X1}ξ2 − ι_{X2}dξ1)`.
pub fn double_of_bialgebroid(a: &LieAlgebroid, astar: &LieAlgebroid, degree: u32) -> Result<CourantData> {
    check_pair_frames(a, astar)?;
    let rep = check_bialgebroid(a, astar, degree);
    if let Some(c) = rep.failures().next() {
        return Err(Error::NotBialgebroid(format!(
            "{}: {}",
            c.name,
            c.witness.clone().unwrap_or_default()
        )));
    }
    let r = a.rank();
    let n = 2 * r;
    let fa = a.frame.clone();
    let fs = astar.frame.clone();
    let mut labels = fa.labels().to_vec();
    labels.extend(fs.labels().iter().cloned());
    let mut metric = Matrix::zeros(n, n);
    for i in 0..r {
        metric[(i, r + i)] = half();
        metric[(r + i, i)] = half();
    }
    let mut anchor = Matrix::zeros(a.chart.dim(), n);
    for mu in 0..a.chart.dim() {
        for i in 0..r {
            anchor[(mu, i)] = a.anchor[(mu, i)].clone();
            anchor[(mu, r + i)] = astar.anchor[(mu, i)].clone();
        }
    }
    let coords = |x: &GradedElement, xi: &GradedElement| -> Vec<ScalarField> {
        let mut v: Vec<ScalarField> = (0..r).map(|i| x.coeff(1 << i)).collect();
        v.extend((0..r).map(|i| xi.coeff(1 << i)));
        v
    };
    let e = |i: usize| GradedElement::from_blade(&fa, 1 << i, ScalarField::one());
    let th = |i: usize| GradedElement::from_blade(&fs, 1 << i, ScalarField::one());
    let zero_a = GradedElement::zero(&fa);
    let zero_s = GradedElement::zero(&fs);
    let mut table = vec![vec![vec![ScalarField::zero(); n]; n]; n];
    for i in 0..r {
        for j in 0..r {
            table[i][j] = coords(&a.schouten(&e(i), &e(j))?, &zero_s);
            table[r + i][r + j] = coords(&zero_a, &astar.schouten(&th(i), &th(j))?);
            // ⟦e_i, e^j⟧ = −ι_{e^j} d_* e_i + L_{e_i} e^j
            let xa = -th(j).contract(&astar.d(&e(i))?)?;
            let xs = a.lie_on_forms(&e(i), &th(j))?;
            table[i][r + j] = coords(&xa, &xs);
            // ⟦e^i, e_j⟧ = L_{e^i} e_j − ι_{e_j} d e^i
            let ya = astar.lie_on_forms(&th(i), &e(j))?;
            let ys = -e(j).contract(&a.d(&th(i))?)?;
            table[r + i][j] = coords(&ya, &ys);
        }
    }
    CourantData::new(&a.chart, labels, metric, anchor, table)
}

/// `⟨Ω, V⟩ = 1` check shared by the operators below.
fn check_normalization(omega: &GradedElement, v: &GradedElement) -> Result<()> {
    let p = omega.det_pair(v)?;
    if !p.is_one() {
        return Err(Error::BadNormalization(format!("<Omega, V> = {}", p)));
    }
    Ok(())
}

/// `(Ω♯)^{-1} φ = (−1)^{k(r−1)} V♯ φ`, `k = r − deg φ`.
fn omega_sharp_inverse(phi: &GradedElement, v: &GradedElement) -> Result<GradedElement> {
    let r = v.rank();
    let mut out = GradedElement::zero(v.frame());
    for j in 0..=r {
        let part = phi.part(j);
        if part.is_zero() {
            continue;
        }
        let k = r - j;
        let t = part.v_sharp(v)?;
        out = &out + &t.scale(&sign((k * (r - 1)) as i64));
    }
    Ok(out)
}

/// `(V♯)^{-1} ψ = (−1)^{k(r−1)} Ω♯ ψ`, `k = r − deg ψ`.
fn v_sharp_inverse(psi: &GradedElement, omega: &GradedElement) -> Result<GradedElement> {
    omega_sharp_inverse(psi, omega)
}

/// The BV operator of `A`: `Ω♯ ∂β = (−1)^l d_A Ω♯ β`.
pub fn bv_del(
    a: &LieAlgebroid,
    x: &GradedElement,
    omega: &GradedElement,
    v: &GradedElement,
) -> Result<GradedElement> {
    a.require_frame(x)?;
    check_normalization(omega, v)?;
    let mut out = GradedElement::zero(&a.frame);
    for l in 0..=a.rank() {
        let part = x.part(l);
        if part.is_zero() {
            continue;
        }
        let d = a.d(&part.omega_sharp(omega)?)?;
        let t = omega_sharp_inverse(&d, v)?;
        out = &out + &t.scale(&sign(l as i64));
    }
    Ok(out)
}

/// The dual operator `∂_*` on `Γ(Λ•A*)`: `d_* V♯ α = (−1)^k V♯ ∂_* α`.
pub fn bv_del_star(
    astar: &LieAlgebroid,
    alpha: &GradedElement,
    omega: &GradedElement,
    v: &GradedElement,
) -> Result<GradedElement> {
    astar.require_frame(alpha)?;
    check_normalization(omega, v)?;
    let mut out = GradedElement::zero(alpha.frame());
    for k in 0..=astar.rank() {
        let part = alpha.part(k);
        if part.is_zero() {
            continue;
        }
        let d = astar.d(&part.v_sharp(v)?)?;
        let t = v_sharp_inverse(&d, omega)?;
        out = &out + &t.scale(&sign(k as i64));
    }
    Ok(out)
}

fn blade_items(frame: &Arc<Frame>, chart: &Chart, degree: u32) -> Vec<GradedElement> {
    let mut mults = vec![ScalarField::one()];
    mults.extend(chart.monomials(degree));
    let mut out = Vec::new();
    for k in 0..=frame.rank() {
        for b in blades_of_degree(frame.rank(), k) {
            for g in &mults {
                out.push(GradedElement::from_blade(frame, b, g.clone()));
            }
        }
    }
    out
}

/// `V♯∘Ω♯ = (−1)^{k(r−1)}` on `Λ^k A` and `Ω♯∘V♯ = (−1)^{k(r−1)}` on
/// `Λ^k A*`, over every basis element.
pub fn check_sharp_sign_laws(omega: &GradedElement, v: &GradedElement) -> Report {
    let mut report = Report::new("sharp-sign-laws");
    if let Err(e) = check_normalization(omega, v) {
        report.push(Check::fail("normalization <Omega, V> = 1", 1, e.to_string()));
        return report;
    }
    let r = v.rank();
    for (name, frame, first, second) in [
        ("V# o Omega# = (-1)^(k(r-1)) on A", v.frame(), omega, v),
        ("Omega# o V# = (-1)^(k(r-1)) on A*", omega.frame(), v, omega),
    ] {
        let mut items = Vec::new();
        for k in 0..=r {
            items.extend(blades_of_degree(r, k));
        }
        let w = first_failure(&items, |&b| {
            let x = GradedElement::from_blade(frame, b, ScalarField::one());
            let k = blade_degree(b);
            let back = x.contract(first).and_then(|y| y.contract(second));
            match back {
                Err(e) => Some(e.to_string()),
                Ok(y) => {
                    let res = &y - &x.scale(&sign((k * (r - 1)) as i64));
                    (!res.is_zero()).then(|| format!("{}: residual {}", x, res))
                }
            }
        });
        report.push(Check::from_witness(name, items.len(), w));
    }
    report
}

/// `−V♯dα = (−1)^k ∂V♯α` on `Λ^k A*` and `Ω♯∂β = (−1)^l d Ω♯β` on
/// `Λ^l A`, over basis elements with monomial multipliers.
pub fn check_bv_identities(a: &LieAlgebroid, omega: &GradedElement, v: &GradedElement, degree: u32) -> Report {
    let mut report = Report::new("bv-identities");
    if let Err(e) = check_normalization(omega, v) {
        report.push(Check::fail("normalization <Omega, V> = 1", 1, e.to_string()));
        return report;
    }
    let forms = blade_items(&a.frame.dual(), &a.chart, degree);
    let w = first_failure(&forms, |alpha| {
        let k = alpha.degree().unwrap_or(0);
        let run = || -> Result<GradedElement> {
            let lhs = -a.d(alpha)?.v_sharp(v)?;
            let rhs = bv_del(a, &alpha.v_sharp(v)?, omega, v)?.scale(&sign(k as i64));
            Ok(&lhs - &rhs)
        };
        match run() {
            Err(e) => Some(e.to_string()),
            Ok(res) => (!res.is_zero()).then(|| format!("alpha = {}: residual {}", alpha, res)),
        }
    });
    report.push(Check::from_witness("-V# d alpha = (-1)^k del V# alpha", forms.len(), w));
    let vecs = blade_items(&a.frame, &a.chart, degree);
    let w = first_failure(&vecs, |beta| {
        let l = beta.degree().unwrap_or(0);
        let run = || -> Result<GradedElement> {
            let lhs = bv_del(a, beta, omega, v)?.omega_sharp(omega)?;
            let rhs = a.d(&beta.omega_sharp(omega)?)?.scale(&sign(l as i64));
            Ok(&lhs - &rhs)
        };
        match run() {
            Err(e) => Some(e.to_string()),
            Ok(res) => (!res.is_zero()).then(|| format!("beta = {}: residual {}", beta, res)),
        }
    });
    report.push(Check::from_witness("Omega# del beta = (-1)^l d Omega# beta", vecs.len(), w));
    report
}

/// Trivialization data of `(Λ^r A* ⊗ Λ^m T*)^{1/2}`: `Ω`, its dual `V`, and
/// the coefficient `s` of the chart volume form `dx_1 ∧ … ∧ dx_m`.
#[derive(Clone, Debug)]
pub struct HalfDensityModule {
    pub omega: GradedElement,
    pub v: GradedElement,
    pub s: ScalarField,
}

impl HalfDensityModule {
    pub fn new(omega: GradedElement, v: GradedElement, s: ScalarField) -> Result<Self> {
        check_normalization(&omega, &v)?;
        if s.is_zero() {
            return Err(Error::ZeroTopSection);
        }
        Ok(HalfDensityModule { omega, v, s })
    }

    /// Same `Ω`, `V` with `s` multiplied by `g`.
    pub fn rescaled(&self, g: &ScalarField) -> Result<Self> {
        HalfDensityModule::new(self.omega.clone(), self.v.clone(), &self.s * g)
    }
}

/// Modular cocycles `(X0, ξ0)` of the pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularCocycles {
    /// `X0 ∈ Γ(A)`: `L_θ(Ω⊗s) = ⟨X0,θ⟩ Ω⊗s`.
    pub x0: GradedElement,
    /// `ξ0 ∈ Γ(A*)`: `L_X(s⊗V) = ⟨ξ0,X⟩ s⊗V`.
    pub xi0: GradedElement,
}

fn divergence_coeff(anchor: &[ScalarField], s: &ScalarField, chart: &Chart) -> Result<ScalarField> {
    let t = Frame::tangent(chart);
    let v = GradedElement::from_vector(&t, anchor);
    volume_divergence(&v, s)?.div(s)
}

/// `⟨X0, θ⟩ = ⟨[θ, Ω]_*, V⟩ + (L_{a*(θ)} s)/s`.
fn x0_pairing(astar: &LieAlgebroid, m: &HalfDensityModule, theta: &GradedElement) -> Result<ScalarField> {
    let l = astar.schouten(theta, &m.omega)?;
    let c = l.det_pair(&m.v)?;
    let d = divergence_coeff(&astar.anchor_of(theta), &m.s, &astar.chart)?;
    Ok(&c + &d)
}

/// `⟨ξ0, X⟩ = ⟨Ω, [X, V]⟩ + (L_{a(X)} s)/s`.
fn xi0_pairing(a: &LieAlgebroid, m: &HalfDensityModule, x: &GradedElement) -> Result<ScalarField> {
    let l = a.schouten(x, &m.v)?;
    let c = m.omega.det_pair(&l)?;
    let d = divergence_coeff(&a.anchor_of(x), &m.s, &a.chart)?;
    Ok(&c + &d)
}

/// Solves for the modular cocycles frame element by frame element, then
/// checks that the defining left-hand sides are function-linear.
pub fn modular_cocycle(a: &LieAlgebroid, astar: &LieAlgebroid, m: &HalfDensityModule) -> Result<ModularCocycles> {
    check_pair_frames(a, astar)?;
    let r = a.rank();
    let mut x0 = GradedElement::zero(&a.frame);
    let mut xi0 = GradedElement::zero(&astar.frame);
    for i in 0..r {
        let th = GradedElement::from_blade(&astar.frame, 1 << i, ScalarField::one());
        x0.add_term(1 << i, x0_pairing(astar, m, &th)?);
        let e = GradedElement::from_blade(&a.frame, 1 << i, ScalarField::one());
        xi0.add_term(1 << i, xi0_pairing(a, m, &e)?);
    }
    for g in a.chart.monomials(1) {
        for i in 0..r {
            let th = GradedElement::from_blade(&astar.frame, 1 << i, g.clone());
            if x0_pairing(astar, m, &th)? != &g * &x0.coeff(1 << i) {
                return Err(Error::NotBialgebroid(format!(
                    "L_theta(Omega x s) is not function-linear at theta = {}",
                    th
                )));
            }
            let e = GradedElement::from_blade(&a.frame, 1 << i, g.clone());
            if xi0_pairing(a, m, &e)? != &g * &xi0.coeff(1 << i) {
                return Err(Error::NotBialgebroid(format!(
                    "L_X(s x V) is not function-linear at X = {}",
                    e
                )));
            }
        }
    }
    Ok(ModularCocycles { x0, xi0 })
}

/// Action of `θ ∈ Γ(A*)` on `g·(Ω⊗s)^{1/2}`: coefficient
/// `a*(θ)g + ½ g ⟨X0, θ⟩`.
pub fn module_action(
    astar: &LieAlgebroid,
    cocycles: &ModularCocycles,
    theta: &GradedElement,
    g: &ScalarField,
) -> Result<ScalarField> {
    let ag = astar.apply_anchor(theta, g);
    let p = theta.det_pair(&cocycles.x0)?;
    Ok(&ag + &(&(g * &p) * &half()))
}

/// The pair `(A, A*)` with its trivialized module and modular cocycles:
/// everything the modified operators need.
#[derive(Clone, Debug)]
pub struct BialgebroidData {
    pub a: LieAlgebroid,
    pub astar: LieAlgebroid,
    pub module: HalfDensityModule,
    pub cocycles: ModularCocycles,
}

impl BialgebroidData {
    pub fn new(a: LieAlgebroid, astar: LieAlgebroid, module: HalfDensityModule) -> Result<Self> {
        let cocycles = modular_cocycle(&a, &astar, &module)?;
        Ok(BialgebroidData {
            a,
            astar,
            module,
            cocycles,
        })
    }

    /// `d_*` on `Γ(Λ•A)`.
    pub fn d_star(&self, x: &GradedElement) -> Result<GradedElement> {
        self.astar.d(x)
    }

    /// `∂` on `Γ(Λ•A)`.
    pub fn del(&self, x: &GradedElement) -> Result<GradedElement> {
        bv_del(&self.a, x, &self.module.omega, &self.module.v)
    }

    /// `∂_*` on `Γ(Λ•A*)`.
    pub fn del_star(&self, alpha: &GradedElement) -> Result<GradedElement> {
        bv_del_star(&self.astar, alpha, &self.module.omega, &self.module.v)
    }

    /// `d̃_*(X⊗l) = (d_*X + ½X0∧X)⊗l`.
    pub fn tilde_dstar(&self, x: &GradedElement) -> Result<GradedElement> {
        let t = self.cocycles.x0.wedge(x)?.scale(&half());
        Ok(&self.d_star(x)? + &t)
    }

    /// `∂̃(X⊗l) = (−∂X + ½ι_{ξ0}X)⊗l`.
    pub fn tilde_del(&self, x: &GradedElement) -> Result<GradedElement> {
        let t = iota(&self.cocycles.xi0, x)?.scale(&half());
        Ok(&t - &self.del(x)?)
    }

    /// `D̃ = d̃_* + ∂̃`.
    pub fn tilde_d(&self, x: &GradedElement) -> Result<GradedElement> {
        Ok(&self.tilde_dstar(x)? + &self.tilde_del(x)?)
    }

    /// Applies `D̃²` to frame monomials (times `1` and monomials of degree
    /// `≤ degree`) and decides whether it is multiplication by one function.
    pub fn tilde_d_square(&self, degree: u32) -> Result<TildeSquare> {
        let one = GradedElement::scalar(&self.a.frame, ScalarField::one());
        let d2 = self.tilde_d(&self.tilde_d(&one)?)?;
        if d2.terms().any(|(b, _)| b != 0) {
            return Ok(TildeSquare::NotScalar(format!("D~^2(1) = {}", d2)));
        }
        let f = d2.coeff(0);
        let mut mults = vec![ScalarField::one()];
        mults.extend(self.a.chart.monomials(degree));
        let mut items = Vec::new();
        for k in 0..=self.a.rank() {
            for b in blades_of_degree(self.a.rank(), k) {
                for g in &mults {
                    items.push(GradedElement::from_blade(&self.a.frame, b, g.clone()));
                }
            }
        }
        let w = first_failure(&items, |x| {
            let d2 = match self.tilde_d(x).and_then(|y| self.tilde_d(&y)) {
                Ok(v) => v,
                Err(e) => return Some(e.to_string()),
            };
            let res = &d2 - &x.scale(&f);
            (!res.is_zero()).then(|| format!("D~^2({}) - f.X = {}", x, res))
        });
        Ok(match w {
            None => TildeSquare::Scalar(f),
            Some(w) => TildeSquare::NotScalar(w),
        })
    }

    /// `Δ = d_*∂ + ∂d_*` on `Γ(Λ•A)`.
    pub fn laplacian(&self, x: &GradedElement) -> Result<GradedElement> {
        let a = self.d_star(&self.del(x)?)?;
        let b = self.del(&self.d_star(x)?)?;
        Ok(&a + &b)
    }

    /// `Δ_* = d∂_* + ∂_*d` on `Γ(Λ•A*)`.
    pub fn laplacian_star(&self, alpha: &GradedElement) -> Result<GradedElement> {
        let a = self.a.d(&self.del_star(alpha)?)?;
        let b = self.del_star(&self.a.d(alpha)?)?;
        Ok(&a + &b)
    }

    /// `½(L_{X0} + L_{ξ0})` on `Γ(Λ•A)`.
    pub fn laplacian_formula(&self, x: &GradedElement) -> Result<GradedElement> {
        let l1 = self.a.schouten(&self.cocycles.x0, x)?;
        let l2 = self.astar.lie_on_forms(&self.cocycles.xi0, x)?;
        Ok((&l1 + &l2).scale(&half()))
    }

    /// `½(L_{X0} + L_{ξ0})` on `Γ(Λ•A*)`.
    pub fn laplacian_star_formula(&self, alpha: &GradedElement) -> Result<GradedElement> {
        let l1 = self.a.lie_on_forms(&self.cocycles.x0, alpha)?;
        let l2 = self.astar.schouten(&self.cocycles.xi0, alpha)?;
        Ok((&l1 + &l2).scale(&half()))
    }

    /// `π^{μν} = Σ_i a*(e^i)^μ a(e_i)^ν`, i.e. `π♯ = a ∘ (a_*)^*`.
    pub fn poisson(&self) -> Matrix {
        poisson_matrix(&self.a, &self.astar)
    }

    /// `½(a_*(ξ0) − a(X0))`.
    pub fn modular_field_from_cocycles(&self) -> Vec<ScalarField> {
        let a1 = self.astar.anchor_of(&self.cocycles.xi0);
        let a2 = self.a.anchor_of(&self.cocycles.x0);
        vector::scale(&half(), &vector::sub(&a1, &a2))
    }
}

/// Outcome of the `D̃²` test.
#[derive(Clone, Debug, PartialEq)]
pub enum TildeSquare {
    /// `D̃²` is multiplication by this function.
    Scalar(ScalarField),
    NotScalar(String),
}

/// `π^{μν} = Σ_i a*(e^i)^μ a(e_i)^ν`.
pub fn poisson_matrix(a: &LieAlgebroid, astar: &LieAlgebroid) -> Matrix {
    let m = a.chart.dim();
    let mut p = Matrix::zeros(m, m);
    for mu in 0..m {
        for nu in 0..m {
            let mut acc = ScalarField::zero();
            for i in 0..a.rank() {
                let x = &astar.anchor[(mu, i)];
                let y = &a.anchor[(nu, i)];
                if !x.is_zero() && !y.is_zero() {
                    acc += x * y;
                }
            }
            p[(mu, nu)] = acc;
        }
    }
    p
}

/// Bivector `Σ_{μ<ν} π^{μν} ∂_μ∧∂_ν` from an antisymmetric matrix.
pub fn bivector(chart: &Chart, p: &Matrix) -> Result<GradedElement> {
    if *p != p.transpose().scale(&ScalarField::from_int(-1)) {
        return Err(Error::InvalidStructure("Poisson matrix is not antisymmetric".into()));
    }
    let t = Frame::tangent(chart);
    let mut out = GradedElement::zero(&t);
    for mu in 0..chart.dim() {
        for nu in mu + 1..chart.dim() {
            out.add_term((1 << mu) | (1 << nu), p[(mu, nu)].clone());
        }
    }
    Ok(out)
}

/// Modular vector field of a bivector with respect to `s dx_1∧…∧dx_m`:
/// `X_s(x_μ) s = L_{π♯(dx_μ)} s`, with `π♯(dx_μ)^ν = π^{μν}`.
pub fn modular_vector_field(pi: &GradedElement, s: &ScalarField) -> Result<Vec<ScalarField>> {
    if *pi.frame().kind() != FrameKind::Tangent {
        return Err(Error::NotChartFrame);
    }
    let m = pi.rank();
    let t = pi.frame().clone();
    let mut out = Vec::with_capacity(m);
    for mu in 0..m {
        let mut comps = vec![ScalarField::zero(); m];
        for (nu, c) in comps.iter_mut().enumerate() {
            if mu == nu {
                continue;
            }
            let b = (1u32 << mu) | (1u32 << nu);
            let v = pi.coeff(b);
            *c = if mu < nu { v } else { -v };
        }
        let field = GradedElement::from_vector(&t, &comps);
        out.push(volume_divergence(&field, s)?.div(s)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(k: usize) -> ScalarField {
        ScalarField::var(k)
    }

    fn basis(f: &Arc<Frame>, idx: &[usize]) -> GradedElement {
        GradedElement::basis(f, idx).unwrap()
    }

    #[test]
    fn tangent_differential_is_de_rham() {
        let c = Chart::standard(3);
        let t = LieAlgebroid::tangent(&c);
        let cot = Frame::cotangent(&c);
        let xi = GradedElement::parse("x1*e[2] + x2*x3*e[1^3]", &c, &cot).unwrap();
        assert_eq!(t.d(&xi).unwrap(), crate::multivector::de_rham_d(&xi).unwrap());
        let triv = LieAlgebroid::trivial(&c, &cot);
        let v = GradedElement::parse("x1*e[2]", &c, &Frame::tangent(&c)).unwrap();
        assert!(triv.d(&v).unwrap().is_zero());
    }

    #[test]
    fn schouten_examples() {
        let c = Chart::standard(2);
        let t = LieAlgebroid::tangent(&c);
        let tf = Frame::tangent(&c);
        let d1 = basis(&tf, &[0]);
        let d2 = basis(&tf, &[1]);
        let x1 = GradedElement::scalar(&tf, x(0));
        assert_eq!(t.schouten(&d1, &x1).unwrap(), GradedElement::scalar(&tf, ScalarField::one()));
        assert_eq!(t.schouten(&d1.wedge(&d2).unwrap(), &x1).unwrap(), -&d2);
        let v = d2.scale(&x(0));
        assert_eq!(t.schouten(&d1, &v).unwrap(), d2);
    }

    #[test]
    fn schouten_matches_duality_with_d() {
        // ⟨d_A f, X⟩ = [X, f] for degree-1 X; ⟨d_A f ∧ ·⟩ pins the bivector case:
        // [P, f] = −ι_{d_A f} P for the adjoint contraction.
        let c = Chart::standard(3);
        let t = LieAlgebroid::tangent(&c);
        let tf = Frame::tangent(&c);
        let f = &(&x(0) * &x(1)) + &x(2);
        let fe = GradedElement::scalar(&tf, f.clone());
        for p in [basis(&tf, &[0, 1]), basis(&tf, &[1, 2]).scale(&x(0)), basis(&tf, &[0, 2])] {
            let lhs = t.schouten(&p, &fe).unwrap();
            let rhs = -t.d_function(&f).contract(&p).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn bialgebroid_and_double_of_tangent() {
        let c = Chart::standard(2);
        let a = LieAlgebroid::tangent(&c);
        let s = LieAlgebroid::trivial(&c, &Frame::cotangent(&c));
        assert!(check_bialgebroid(&a, &s, 1).passed());
        let dbl = double_of_bialgebroid(&a, &s, 1).unwrap();
        let std = CourantData::tabulate(&crate::courant::TwistedCourant::standard(&c)).unwrap();
        assert_eq!(dbl.table(), std.table());
        assert_eq!(dbl.metric(), std.metric());
    }

    #[test]
    fn perturbed_structure_fails() {
        let c = Chart::standard(2);
        let f = Frame::abstract_frame("e", 3);
        let zero = vec![vec![vec![ScalarField::zero(); 3]; 3]; 3];
        let a = LieAlgebroid::new(&c, &f, Matrix::zeros(2, 3), zero).unwrap();
        let a = a.perturbed(0, 1, 2, ScalarField::one()).unwrap();
        let a = a.perturbed(1, 2, 0, ScalarField::one()).unwrap();
        let a = a.perturbed(2, 0, 1, ScalarField::one()).unwrap();
        assert!(a.check(1).passed());
        let bad = a.perturbed(0, 1, 0, ScalarField::one()).unwrap();
        assert!(!bad.check(1).passed());
    }

    #[test]
    fn sharp_sign_laws() {
        for r in 1..=4 {
            let f = Frame::abstract_frame("e", r);
            let omega = GradedElement::top(&f.dual(), ScalarField::one());
            let v = GradedElement::top(&f, ScalarField::one());
            for k in 0..=r {
                let s = sign((k * (r - 1)) as i64);
                for b in blades_of_degree(r, k) {
                    let xb = GradedElement::from_blade(&f, b, ScalarField::one());
                    let back = xb.omega_sharp(&omega).unwrap().v_sharp(&v).unwrap();
                    assert_eq!(back, xb.scale(&s));
                    let pb = GradedElement::from_blade(&f.dual(), b, ScalarField::one());
                    let back = pb.v_sharp(&v).unwrap().omega_sharp(&omega).unwrap();
                    assert_eq!(back, pb.scale(&s));
                }
            }
        }
    }

    #[test]
    fn bv_operator_on_tangent() {
        let c = Chart::standard(2);
        let a = LieAlgebroid::tangent(&c);
        let tf = Frame::tangent(&c);
        let omega = GradedElement::top(&tf.dual(), ScalarField::one());
        let v = GradedElement::top(&tf, ScalarField::one());
        let f = &x(0) * &x(1);
        let xv = basis(&tf, &[0]).scale(&f);
        // Ω♯(f∂1) = f dx2, d_A = f_1 dx1∧dx2, times (−1)^1, then (Ω♯)^{-1}
        let del = bv_del(&a, &xv, &omega, &v).unwrap();
        assert_eq!(del, GradedElement::scalar(&tf, -f.partial(0)));
        let sc = GradedElement::scalar(&tf, f.clone());
        assert!(bv_del(&a, &sc, &omega, &v).unwrap().is_zero());
        let bad = v.scale(&ScalarField::from_int(2));
        assert!(matches!(bv_del(&a, &xv, &omega, &bad), Err(Error::BadNormalization(_))));
    }
}
