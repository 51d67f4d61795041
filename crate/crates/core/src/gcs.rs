//! Generalized complex structures: integrability, eigenbundles, the induced
//! Lie bialgebroid `(L, L̄)` and end-to-end verification of its operators
//! against the spinor picture.
//!
//! `L̄` is identified with `L*` through `⟨X, θ⟩ = 2⟨X, θ⟩_nat`; every
//! algebroid-side pairing uses this duality and nothing else rescales.

use crate::algebroid::{
    bivector, check_bialgebroid, modular_vector_field, poisson_matrix, BialgebroidData, HalfDensityModule,
    LieAlgebroid, TildeSquare,
};
use crate::courant::{validate_closed_3form, CourantStructure, GenSection, TwistedCourant};
use crate::error::{Error, Result};
use crate::linalg::{kernel_from_rref, vector, Matrix};
use crate::multivector::{blades_of_degree, Blade, Frame, GradedElement};
use crate::report::{first_failure, Check, Report};
use crate::scalars::{Chart, ScalarField};
use crate::spinor::{
    annihilator, check_spinor_identities, clifford_act, d_h_unchecked, Spinor, SpinorDecomposition,
};

fn half() -> ScalarField {
    ScalarField::from_ratio(1, 2)
}

fn two() -> ScalarField {
    ScalarField::from_int(2)
}

/// `{1}` followed by the monomials of degree `1..=degree`.
pub(crate) fn multipliers(chart: &Chart, degree: u32) -> Vec<ScalarField> {
    let mut v = vec![ScalarField::one()];
    v.extend(chart.monomials(degree));
    v
}

/// A frame of an eigenbundle with the non-constant pivots met during
/// elimination (the frame may degenerate where they vanish).
#[derive(Clone, Debug)]
pub struct Eigenframe {
    pub sections: Vec<GenSection>,
    pub pivots: Vec<ScalarField>,
}

/// An endomorphism `J` of `T ⊕ T*` in the coordinate frame
/// `(∂_1, …, ∂_m, dx_1, …, dx_m)` with a closed 3-form `H`.
#[derive(Clone, Debug)]
pub struct GCStructure {
    chart: Chart,
    j: Matrix,
    h: GradedElement,
    seed: Option<Spinor>,
}

impl GCStructure {
    pub fn new(chart: &Chart, j: Matrix, h: GradedElement) -> Result<Self> {
        validate_closed_3form(chart, &h)?;
        GCStructure::new_unchecked_h(chart, j, h)
    }

    /// Skips the `dH = 0` validation (negative controls only).
    pub fn new_unchecked_h(chart: &Chart, j: Matrix, h: GradedElement) -> Result<Self> {
        let m = chart.dim();
        if !m.is_multiple_of(2) {
            return Err(Error::OddDimension);
        }
        if j.rows() != 2 * m || j.cols() != 2 * m {
            return Err(Error::InvalidStructure(format!(
                "J must be {0}x{0}, got {1}x{2}",
                2 * m,
                j.rows(),
                j.cols()
            )));
        }
        Ok(GCStructure {
            chart: chart.clone(),
            j,
            h,
            seed: None,
        })
    }

    /// `J = +i` on `Ann(u)`, `−i` on its conjugate; `d_H u = e·u` is
    /// required.
    pub fn from_pure_spinor(u: &Spinor, h: &GradedElement) -> Result<Self> {
        let chart = crate::spinor::chart_of_frame(u.frame());
        validate_closed_3form(&chart, h)?;
        GCStructure::from_pure_spinor_unchecked(u, h)
    }

    pub(crate) fn from_pure_spinor_unchecked(u: &Spinor, h: &GradedElement) -> Result<Self> {
        let chart = crate::spinor::chart_of_frame(u.frame());
        let dec = SpinorDecomposition::from_pure_spinor(u)?;
        dec.find_e(h)?;
        let m = chart.dim();
        let mut cols: Vec<Vec<ScalarField>> = dec.l_sections().iter().map(|z| z.coords()).collect();
        cols.extend(dec.l_sections().iter().map(|z| z.conj().coords()));
        let p = Matrix::from_cols(&cols, 2 * m);
        let mut d = Matrix::zeros(2 * m, 2 * m);
        for k in 0..2 * m {
            d[(k, k)] = if k < m { ScalarField::i() } else { -ScalarField::i() };
        }
        let j = p.mul(&d).mul(&p.inverse()?);
        let mut g = GCStructure::new_unchecked_h(&chart, j, h.clone())?;
        g.seed = Some(u.clone());
        Ok(g)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn j(&self) -> &Matrix {
        &self.j
    }

    pub fn h(&self) -> &GradedElement {
        &self.h
    }

    pub fn seed(&self) -> Option<&Spinor> {
        self.seed.as_ref()
    }

    pub fn apply(&self, z: &GenSection) -> GenSection {
        GenSection::from_coords(&self.chart, &self.j.apply(&z.coords()))
    }

    fn courant(&self) -> TwistedCourant {
        spinor_courant(&self.chart, &self.h)
    }

    /// `J² = −1`, orthogonality, and vanishing of
    /// `N(z1,z2) = [Jz1,Jz2] − J[Jz1,z2] − J[z1,Jz2] − [z1,z2]` (Courant
    /// bracket) on frame sections with one monomial multiplier.
    pub fn check(&self, degree: u32) -> Report {
        let mut report = Report::new("gcs");
        let m = self.chart.dim();
        let n2 = 2 * m;
        let sq = self.j.mul(&self.j).add(&Matrix::identity(n2));
        report.push(matrix_check("J squares to -1", &sq));
        let mut g = Matrix::zeros(n2, n2);
        for k in 0..m {
            g[(k, m + k)] = half();
            g[(m + k, k)] = half();
        }
        let orth = self.j.transpose().mul(&g).mul(&self.j).sub(&g);
        report.push(matrix_check("J is orthogonal", &orth));
        let c = self.courant();
        let gens: Vec<Vec<ScalarField>> = (0..n2).map(|k| vector::unit(n2, k)).collect();
        let monos = self.chart.monomials(degree);
        let mut pairs = Vec::new();
        for a in &gens {
            for b in &gens {
                pairs.push((a.clone(), b.clone()));
                for f in &monos {
                    pairs.push((vector::scale(f, a), b.clone()));
                    pairs.push((a.clone(), vector::scale(f, b)));
                }
            }
        }
        let j = |v: &[ScalarField]| self.j.apply(v);
        let br = |a: &[ScalarField], b: &[ScalarField]| {
            let d1 = <TwistedCourant as CourantStructure>::dorfman(&c, a, b);
            let d2 = <TwistedCourant as CourantStructure>::dorfman(&c, b, a);
            vector::scale(&half(), &vector::sub(&d1, &d2))
        };
        let w = first_failure(&pairs, |(a, b)| {
            let (ja, jb) = (j(a), j(b));
            let t1 = br(&ja, &jb);
            let t2 = j(&br(&ja, b));
            let t3 = j(&br(a, &jb));
            let t4 = br(a, b);
            let r = vector::sub(&vector::sub(&t1, &t2), &vector::add(&t3, &t4));
            (!vector::is_zero(&r)).then(|| {
                format!(
                    "z1 = {}, z2 = {}: N = {}",
                    c.format_section(a),
                    c.format_section(b),
                    c.format_section(&r)
                )
            })
        });
        report.push(Check::from_witness("Nijenhuis tensor vanishes", pairs.len(), w));
        report
    }

    /// Kernel frame of `J ∓ i` (`plus` selects `+i`).
    pub fn eigenbundle(&self, plus: bool) -> Result<Eigenframe> {
        let m = self.chart.dim();
        let n2 = 2 * m;
        let shift = if plus { -ScalarField::i() } else { ScalarField::i() };
        let a = self.j.add(&Matrix::identity(n2).scale(&shift));
        let rr = a.rref();
        let ker = kernel_from_rref(&rr, n2);
        if ker.len() != m {
            return Err(Error::RankDeficient {
                found: ker.len(),
                expected: m,
            });
        }
        Ok(Eigenframe {
            sections: ker.iter().map(|v| GenSection::from_coords(&self.chart, v)).collect(),
            pivots: rr.pivot_functions,
        })
    }

    /// Builds every derived object needed by the verification suites.
    pub fn pipeline(&self) -> Result<GcsPipeline> {
        GcsPipeline::new(self)
    }
}

fn matrix_check(name: &str, m: &Matrix) -> Check {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if !m[(i, j)].is_zero() {
                return Check::fail(name, m.rows() * m.cols(), format!("entry ({}, {}) = {}", i + 1, j + 1, m[(i, j)]));
            }
        }
    }
    Check::pass(name, m.rows() * m.cols())
}

/// The pure spinor line annihilated by a frame of `L`.
pub fn pure_spinor_of(chart: &Chart, l: &[GenSection]) -> Result<Spinor> {
    let m = chart.dim();
    let dim = 1usize << m;
    let cot = Frame::cotangent(chart);
    let mut rows = Vec::new();
    for z in l {
        let cols: Vec<Vec<ScalarField>> = (0..dim)
            .map(|b| {
                let e = GradedElement::from_blade(&cot, b as Blade, ScalarField::one());
                clifford_act(z, &e).map(|r| (0..dim).map(|c| r.coeff(c as Blade)).collect())
            })
            .collect::<Result<_>>()?;
        let a = Matrix::from_cols(&cols, dim);
        for i in 0..dim {
            rows.push(a.row(i));
        }
    }
    let ker = Matrix::from_rows(rows).kernel();
    if ker.len() != 1 {
        return Err(Error::NotPure(format!("annihilated line has dimension {}", ker.len())));
    }
    let mut u = GradedElement::zero(&cot);
    for (b, c) in ker[0].iter().enumerate() {
        u.add_term(b as Blade, c.clone());
    }
    Ok(u)
}

/// The Courant algebroid whose Dorfman bracket is the derived bracket of
/// `d_H = d + H∧` under the Clifford action: `⟦a, b⟧·ρ = [[d_H, a·], b·]ρ`.
/// That bracket carries `−ι_{x2}ι_{x1}H`, so it is `TwistedCourant` with `−H`.
pub fn spinor_courant(chart: &Chart, h: &GradedElement) -> TwistedCourant {
    TwistedCourant::new_unchecked(chart, -h.clone())
}

/// `(L, L̄)` as Lie algebroids on the frames of `dec`: anchors are tangent
/// projections and `c^k_{ij} = 2⟨⟦l_i, l_j⟧_H, θ_k⟩_nat`.
pub fn bialgebroid_of(dec: &SpinorDecomposition, h: &GradedElement) -> Result<(LieAlgebroid, LieAlgebroid)> {
    let chart = dec.chart();
    let c = spinor_courant(chart, h);
    let build = |secs: &[GenSection], frame: &std::sync::Arc<Frame>, is_l: bool| -> Result<LieAlgebroid> {
        let r = secs.len();
        let anchor = Matrix::from_cols(
            &secs.iter().map(|z| z.vector_part().to_vector()).collect::<Vec<_>>(),
            chart.dim(),
        );
        let mut s = vec![vec![vec![ScalarField::zero(); r]; r]; r];
        for i in 0..r {
            for j in 0..r {
                let br = c.dorfman(&secs[i], &secs[j])?;
                let coords = if is_l { dec.l_coords(&br)? } else { dec.lbar_coords(&br)? };
                let x = coords.ok_or_else(|| {
                    Error::NotIntegrable(format!("[[s{}, s{}]] = {} leaves the eigenbundle", i + 1, j + 1, br))
                })?;
                for k in 0..r {
                    s[i][j][k] = x.coeff(1 << k);
                }
            }
        }
        LieAlgebroid::new(chart, frame, anchor, s)
    };
    let l = build(dec.l_sections(), dec.l_frame(), true)?;
    let lbar = build(dec.lbar_sections(), dec.lbar_frame(), false)?;
    Ok((l, lbar))
}

/// Every derived object of a generalized complex structure.
#[derive(Clone, Debug)]
pub struct GcsPipeline {
    pub gcs: GCStructure,
    pub dec: SpinorDecomposition,
    /// `e ∈ Γ(L̄)` with `d_H u = e·u`, in the `θ`-frame.
    pub e: GradedElement,
    /// `ē` in the `l`-frame.
    pub ebar: GradedElement,
    /// `(L, L̄)` with `Ω`, `V` and `s = Mukai(u, ū)`.
    pub data: BialgebroidData,
    /// Non-constant pivots of the eigenbundle elimination.
    pub pivots: Vec<ScalarField>,
}

impl GcsPipeline {
    pub fn new(gcs: &GCStructure) -> Result<Self> {
        let plus = gcs.eigenbundle(true)?;
        let (u, l) = match &gcs.seed {
            Some(u) => (u.clone(), annihilator(u)?),
            None => (pure_spinor_of(&gcs.chart, &plus.sections)?, plus.sections.clone()),
        };
        let dec = SpinorDecomposition::new(&u, l)?;
        let e = dec.find_e(&gcs.h)?;
        let ebar = dec.conj_of_lbar(&e)?;
        let (la, lb) = bialgebroid_of(&dec, &gcs.h)?;
        let module = HalfDensityModule::new(dec.omega().clone(), dec.v().clone(), dec.mukai_uu().clone())?;
        let data = BialgebroidData::new(la, lb, module)?;
        Ok(GcsPipeline {
            gcs: gcs.clone(),
            dec,
            e,
            ebar,
            data,
            pivots: plus.pivots,
        })
    }

    fn h(&self) -> &GradedElement {
        &self.gcs.h
    }

    fn n2(&self) -> usize {
        self.gcs.chart.dim()
    }

    /// `e` as a section of `T_ℂ ⊕ T*_ℂ`.
    pub fn e_section(&self) -> GenSection {
        self.dec.lbar_section(&self.e)
    }

    /// `ē` as a section of `T_ℂ ⊕ T*_ℂ`.
    pub fn ebar_section(&self) -> GenSection {
        self.dec.l_section(&self.ebar)
    }

    fn banner(&self, r: &mut Report) {
        r.banner("duality <X, theta> = 2 <X, theta>_nat between L and L-bar");
        if !self.gcs.h.is_zero() {
            r.banner("bracket: derived bracket of d_H = d + H^, i.e. the Dorfman bracket twisted by -H");
        }
        if !self.pivots.is_empty() {
            let p: Vec<String> = self.pivots.iter().map(|f| f.to_string()).collect();
            r.banner(format!("eigenframe pivots (frame degenerates where these vanish): {}", p.join(", ")));
        }
    }

    /// Basis elements `l_I` of `Λ^{≤k} L` with multipliers.
    fn l_items(&self, max_deg: usize, degree: u32) -> Vec<GradedElement> {
        let f = self.dec.l_frame();
        let mut out = Vec::new();
        for k in 0..=max_deg.min(self.n2()) {
            for b in blades_of_degree(self.n2(), k) {
                for g in multipliers(&self.gcs.chart, degree) {
                    out.push(GradedElement::from_blade(f, b, g));
                }
            }
        }
        out
    }

    fn lbar_items(&self, max_deg: usize, degree: u32) -> Vec<GradedElement> {
        let f = self.dec.lbar_frame();
        let mut out = Vec::new();
        for k in 0..=max_deg.min(self.n2()) {
            for b in blades_of_degree(self.n2(), k) {
                for g in multipliers(&self.gcs.chart, degree) {
                    out.push(GradedElement::from_blade(f, b, g));
                }
            }
        }
        out
    }

    /// Bialgebroid compatibility of `(L, L̄)`, agreement of its double with
    /// the twisted Courant structure, and the sign laws of `Ω♯`, `V♯`, `∂`.
    pub fn verify_bialgebroid(&self, degree: u32) -> Report {
        let mut r = Report::new("bialgebroid");
        self.banner(&mut r);
        r.extend(check_bialgebroid(&self.data.a, &self.data.astar, degree.min(1)));
        let m = &self.data.module;
        r.extend(crate::algebroid::check_sharp_sign_laws(&m.omega, &m.v));
        r.extend(crate::algebroid::check_bv_identities(&self.data.a, &m.omega, &m.v, degree.min(1)));
        let c = spinor_courant(&self.gcs.chart, &self.gcs.h);
        let mut secs: Vec<GenSection> = self.dec.l_sections().to_vec();
        secs.extend(self.dec.lbar_sections().iter().cloned());
        let mut cases = 0;
        let mut witness = None;
        'outer: for (i, a) in secs.iter().enumerate() {
            for (j, b) in secs.iter().enumerate() {
                cases += 1;
                let direct = match c.dorfman(a, b) {
                    Ok(v) => v,
                    Err(e) => {
                        witness = Some(e.to_string());
                        break 'outer;
                    }
                };
                let via = self.double_bracket(i, j);
                if via.as_ref().ok() != Some(&direct) {
                    witness = Some(format!("frame pair ({}, {}): twisted {} vs double {:?}", i + 1, j + 1, direct, via));
                    break 'outer;
                }
            }
        }
        r.push(Check::from_witness("double bracket equals the twisted Dorfman bracket", cases, witness));
        r
    }

    /// Bracket of frame elements `i`, `j` of `L ⊕ L̄` in the double.
    fn double_bracket(&self, i: usize, j: usize) -> Result<GenSection> {
        let r = self.n2();
        let a = &self.data.a;
        let s = &self.data.astar;
        let fl = self.dec.l_frame();
        let ft = self.dec.lbar_frame();
        let e = |k: usize| GradedElement::from_blade(fl, 1 << k, ScalarField::one());
        let th = |k: usize| GradedElement::from_blade(ft, 1 << k, ScalarField::one());
        let (xa, xs) = match (i < r, j < r) {
            (true, true) => (a.schouten(&e(i), &e(j))?, GradedElement::zero(ft)),
            (false, false) => (GradedElement::zero(fl), s.schouten(&th(i - r), &th(j - r))?),
            (true, false) => (
                -crate::algebroid::iota(&th(j - r), &s.d(&e(i))?)?,
                a.lie_on_forms(&e(i), &th(j - r))?,
            ),
            (false, true) => (
                s.lie_on_forms(&th(i - r), &e(j))?,
                -crate::algebroid::iota(&e(j), &a.d(&th(i - r))?)?,
            ),
        };
        Ok(&self.dec.l_section(&xa) + &self.dec.lbar_section(&xs))
    }

    /// Both diagrams: `Ī(d̃_*(X⊗ū)) = ∂(X·ū)` and `Ī(∂̃(X⊗ū)) = ∂̄(X·ū)`.
    pub fn verify_main_theorem(&self, degree: u32) -> Report {
        let mut r = Report::new("main-theorem");
        self.banner(&mut r);
        r.banner("the N-degree lowering operator is written del, the raising one delbar");
        let items = self.l_items(degree as usize, degree);
        let n2 = self.n2();
        let eval = |x: &GradedElement| -> Result<(GradedElement, GradedElement)> {
            let j = x.degree().unwrap_or(0);
            let xu = self.dec.iso_ibar(x)?;
            let (del, delbar) = self.dec.partial_ops(&xu, n2 - j, self.h())?;
            let a = &self.dec.iso_ibar(&self.data.tilde_dstar(x)?)? - &del;
            let b = &self.dec.iso_ibar(&self.data.tilde_del(x)?)? - &delbar;
            Ok((a, b))
        };
        let w1 = first_failure(&items, |x| match eval(x) {
            Err(e) => Some(format!("X = {}: {}", x, e)),
            Ok((a, _)) => (!a.is_zero()).then(|| format!("X = {}: residual {}", x, a)),
        });
        r.push(Check::from_witness("diagram 1: Ibar(d~_*(X)) = del(X.ubar)", items.len(), w1));
        let w2 = first_failure(&items, |x| match eval(x) {
            Err(e) => Some(format!("X = {}: {}", x, e)),
            Ok((_, b)) => (!b.is_zero()).then(|| format!("X = {}: residual {}", x, b)),
        });
        r.push(Check::from_witness("diagram 2: Ibar(del~(X)) = delbar(X.ubar)", items.len(), w2));
        r
    }

    /// Modular cocycles of `(L, L̄)` for `V`, `Ω` and `s = Mukai(u, ū)`:
    /// `ξ0 = 2e` and `X0 = 2ē`.
    pub fn verify_modular_prop(&self) -> Report {
        let mut r = Report::new("modular-prop");
        self.banner(&mut r);
        r.banner("s = Mukai(u, ubar)");
        let c = &self.data.cocycles;
        let two_e = self.e.scale(&two());
        let two_ebar = self.ebar.scale(&two());
        let w = (c.xi0 != two_e).then(|| format!("xi0 = {}, 2e = {}", c.xi0, two_e));
        r.push(Check::from_witness("cocycle of L w.r.t. V and s equals 2e", 1, w).with_note(format!("e = {}", self.e_section())));
        let w = (c.x0 != two_ebar).then(|| format!("X0 = {}, 2 ebar = {}", c.x0, two_ebar));
        r.push(Check::from_witness("cocycle of L-bar w.r.t. Omega and s equals 2 ebar", 1, w));
        r
    }

    /// The `L̄`-module structures on `ū` agree: `W·d_H(gū)` equals the
    /// half-density action, `W·∂ū = ⟨ē, W⟩ū`, and the canonical isomorphism
    /// intertwines both.
    pub fn verify_module_structures(&self, degree: u32) -> Report {
        let mut r = Report::new("module-structures");
        self.banner(&mut r);
        let dec = &self.dec;
        let ubar = dec.ubar();
        let ft = dec.lbar_frame();
        let gs = multipliers(&self.gcs.chart, degree);
        let mut items = Vec::new();
        for k in 0..self.n2() {
            for g in &gs {
                items.push((GradedElement::from_blade(ft, 1 << k, ScalarField::one()), g.clone()));
            }
        }
        let cot = ubar.frame().clone();
        let nabla = |w: &GradedElement, g: &ScalarField| -> Result<Spinor> {
            let gu = GradedElement::scalar(&cot, g.clone()).wedge(ubar)?;
            dec.iso_i_on(w, &d_h_unchecked(&gu, self.h())?)
        };
        let w1 = first_failure(&items, |(w, g)| {
            let run = || -> Result<Option<String>> {
                let lhs = nabla(w, g)?;
                let c = crate::algebroid::module_action(&self.data.astar, &self.data.cocycles, w, g)?;
                let rhs = ubar.scale(&c);
                let res = &lhs - &rhs;
                Ok((!res.is_zero()).then(|| format!("W = {}, g = {}: residual {}", w, g, res)))
            };
            run().unwrap_or_else(|e| Some(e.to_string()))
        });
        r.push(Check::from_witness("W.d_H(g ubar) equals the half-density action", items.len(), w1));

        let n2 = self.n2();
        let w2 = first_failure(&items[..], |(w, g)| {
            if !g.is_one() {
                return None;
            }
            let run = || -> Result<Option<String>> {
                let (del, _) = dec.partial_ops(ubar, n2, self.h())?;
                let lhs = dec.iso_i_on(w, &del)?;
                let rhs = ubar.scale(&w.det_pair(&self.ebar)?);
                let res = &lhs - &rhs;
                Ok((!res.is_zero()).then(|| format!("W = {}: residual {}", w, res)))
            };
            run().unwrap_or_else(|e| Some(e.to_string()))
        });
        r.push(Check::from_witness("W.del(ubar) = <ebar, W> ubar", n2, w2));

        let w3 = first_failure(&items, |(w, g)| {
            let run = || -> Result<Option<String>> {
                let gu = GradedElement::scalar(&cot, g.clone()).wedge(ubar)?;
                let lhs = &dec.canonical_iso(&nabla(w, &ScalarField::one())?, &gu)?
                    + &dec.canonical_iso(ubar, &nabla(w, g)?)?;
                let ag = self.data.astar.apply_anchor(w, g);
                let x0 = w.det_pair(&self.data.cocycles.x0)?;
                let coeff = &ag + &(g * &x0);
                let rhs = dec.canonical_iso(ubar, ubar)?.scale(&coeff);
                let res = &lhs - &rhs;
                Ok((!res.is_zero()).then(|| format!("W = {}, g = {}: residual {}", w, g, res)))
            };
            run().unwrap_or_else(|e| Some(e.to_string()))
        });
        r.push(Check::from_witness(
            "canonical isomorphism intertwines the module structures",
            items.len(),
            w3,
        ));
        r
    }

    /// `D̃ = d_H`, `D̃² = 0`, Laplacians, Poisson bivector and modular field.
    pub fn verify_corollaries(&self, degree: u32) -> Report {
        let mut r = Report::new("corollaries");
        self.banner(&mut r);
        let dec = &self.dec;
        let data = &self.data;
        let chart = &self.gcs.chart;
        let n2 = self.n2();

        let items = self.l_items(n2, degree);
        let w = first_failure(&items, |x| {
            let run = || -> Result<Option<String>> {
                let lhs = dec.iso_ibar(&data.tilde_d(x)?)?;
                let rhs = d_h_unchecked(&dec.iso_ibar(x)?, self.h())?;
                let res = &lhs - &rhs;
                Ok((!res.is_zero()).then(|| format!("X = {}: residual {}", x, res)))
            };
            run().unwrap_or_else(|e| Some(e.to_string()))
        });
        r.push(Check::from_witness("D~ equals d_H under Ibar", items.len(), w));

        let sq = match data.tilde_d_square(degree) {
            Ok(TildeSquare::Scalar(f)) if f.is_zero() => Check::pass("D~ squares to zero", 1),
            Ok(TildeSquare::Scalar(f)) => Check::fail("D~ squares to zero", 1, format!("D~^2 = multiplication by {}", f)),
            Ok(TildeSquare::NotScalar(w)) => Check::fail("D~ squares to zero", 1, w),
            Err(e) => Check::fail("D~ squares to zero", 1, e.to_string()),
        };
        r.push(sq);

        let es = self.e_section();
        let ebs = self.ebar_section();
        let re = vector::add(&es.vector_part().to_vector(), &ebs.vector_part().to_vector());
        let fns = chart.monomials(degree.max(1));
        let w = first_failure(&fns, |f| {
            let run = || -> Result<Option<String>> {
                let rhs = &vector::derive(&re, f) * &half();
                let a = data.laplacian(&GradedElement::scalar(dec.l_frame(), f.clone()))?;
                let b = data.laplacian_star(&GradedElement::scalar(dec.lbar_frame(), f.clone()))?;
                for (name, v) in [("Delta f", a), ("Delta_* f", b)] {
                    let res = &v - &GradedElement::scalar(v.frame(), rhs.clone());
                    if !res.is_zero() {
                        return Ok(Some(format!("f = {}: {} - rhs = {}", f, name, res)));
                    }
                }
                Ok(None)
            };
            run().unwrap_or_else(|e| Some(e.to_string()))
        });
        r.push(Check::from_witness("Delta f = Delta_* f = 1/2 pr_T(e + ebar)(f)", fns.len(), w));

        let lap_items = self.l_items(3, 1);
        let w = first_failure(&lap_items, |x| {
            let run = || -> Result<Option<String>> {
                let res = &data.laplacian(x)? - &data.laplacian_formula(x)?;
                Ok((!res.is_zero()).then(|| format!("X = {}: residual {}", x, res)))
            };
            run().unwrap_or_else(|e| Some(e.to_string()))
        });
        r.push(Check::from_witness("Delta = 1/2 (L_X0 + L_xi0) on L", lap_items.len(), w));
        let lap_items_s = self.lbar_items(3, 1);
        let w = first_failure(&lap_items_s, |x| {
            let run = || -> Result<Option<String>> {
                let res = &data.laplacian_star(x)? - &data.laplacian_star_formula(x)?;
                Ok((!res.is_zero()).then(|| format!("W = {}: residual {}", x, res)))
            };
            run().unwrap_or_else(|e| Some(e.to_string()))
        });
        r.push(Check::from_witness("Delta_* = 1/2 (L_X0 + L_xi0) on L-bar", lap_items_s.len(), w));

        let c = spinor_courant(chart, &self.gcs.h);
        let i_half = ScalarField::i().scale(&crate::scalars::Gaussian::from_ratio(1, 2));
        let ebar_half_e = &ebs + &es.scale(&half());
        let e_half_ebar = &es + &ebs.scale(&half());
        let mults = multipliers(chart, 1);
        let mut xs = Vec::new();
        for k in 0..n2 {
            for g in &mults {
                xs.push((k, g.clone()));
            }
        }
        let w = first_failure(&xs, |(k, g)| {
            let run = || -> Result<Option<String>> {
                let x = GradedElement::from_blade(dec.l_frame(), 1 << k, g.clone());
                let xs = dec.l_section(&x);
                let lhs = dec.l_section(&data.laplacian(&x)?);
                let rhs = &c.dorfman(&ebar_half_e, &xs)? - &self.gcs.apply(&c.dorfman(&es, &xs)?).scale(&i_half);
                let res = &lhs - &rhs;
                Ok((!res.is_zero()).then(|| format!("X = {}: residual {}", xs, res)))
            };
            run().unwrap_or_else(|e| Some(e.to_string()))
        });
        r.push(Check::from_witness(
            "Delta X = [[ebar + e/2, X]] - (i/2) J [[e, X]]",
            xs.len(),
            w,
        ));
        let w = first_failure(&xs, |(k, g)| {
            let run = || -> Result<Option<String>> {
                let x = GradedElement::from_blade(dec.lbar_frame(), 1 << k, g.clone());
                let xs = dec.lbar_section(&x);
                let lhs = dec.lbar_section(&data.laplacian_star(&x)?);
                let rhs = &c.dorfman(&e_half_ebar, &xs)? + &self.gcs.apply(&c.dorfman(&ebs, &xs)?).scale(&i_half);
                let res = &lhs - &rhs;
                Ok((!res.is_zero()).then(|| format!("W = {}: residual {}", xs, res)))
            };
            run().unwrap_or_else(|e| Some(e.to_string()))
        });
        r.push(Check::from_witness(
            "Delta_* W = [[e + ebar/2, W]] + (i/2) J [[ebar, W]]",
            xs.len(),
            w,
        ));

        r.extend(self.verify_poisson());
        r
    }

    /// `P^{μν} = ⟨J dx^μ, dx^ν⟩_nat`.
    pub fn j_poisson(&self) -> Matrix {
        let m = self.n2();
        let mut p = Matrix::zeros(m, m);
        for mu in 0..m {
            for nu in 0..m {
                p[(mu, nu)] = &self.gcs.j[(nu, m + mu)] * &half();
            }
        }
        p
    }

    /// The constant `c` with `−iπ = c·P`, if one exists.
    pub fn poisson_constant(&self) -> Option<Option<ScalarField>> {
        let pi = poisson_matrix(&self.data.a, &self.data.astar).scale(&-ScalarField::i());
        let p = self.j_poisson();
        let m = self.n2();
        let mut c: Option<ScalarField> = None;
        for mu in 0..m {
            for nu in 0..m {
                let (a, b) = (&pi[(mu, nu)], &p[(mu, nu)]);
                if b.is_zero() {
                    if !a.is_zero() {
                        return None;
                    }
                    continue;
                }
                let q = a.div(b).ok()?;
                match &c {
                    None => c = Some(q),
                    Some(c0) if *c0 != q => return None,
                    _ => {}
                }
            }
        }
        match c {
            Some(q) if !q.is_constant() => None,
            other => Some(other),
        }
    }

    fn verify_poisson(&self) -> Report {
        let mut r = Report::new("poisson");
        let chart = &self.gcs.chart;
        let pi = self.data.poisson();
        let neg_i_pi = pi.scale(&-ScalarField::i());
        let real = neg_i_pi.conj() == neg_i_pi;
        r.push(if real {
            Check::pass("-i pi is real", 1)
        } else {
            Check::fail("-i pi is real", 1, format!("-i pi = {}", neg_i_pi))
        });
        r.push(match self.poisson_constant() {
            Some(Some(c)) => Check::pass("-i pi is a constant multiple of P", 1).with_note(format!("-i pi = ({}) P", c)),
            Some(None) => Check::pass("-i pi is a constant multiple of P", 1).with_note("pi = P = 0"),
            None => Check::fail("-i pi is a constant multiple of P", 1, format!("-i pi = {}, P = {}", neg_i_pi, self.j_poisson())),
        });
        let s = self.dec.mukai_uu();
        let es = self.e_section();
        let ebs = self.ebar_section();
        let diff = vector::sub(&es.vector_part().to_vector(), &ebs.vector_part().to_vector());
        let run = || -> Result<(Vec<ScalarField>, Vec<ScalarField>)> {
            let xp = modular_vector_field(&bivector(chart, &self.j_poisson())?, s)?;
            let xpi = modular_vector_field(&bivector(chart, &pi)?, s)?;
            Ok((xp, xpi))
        };
        match run() {
            Ok((xp, xpi)) => {
                let i_half = ScalarField::i().scale(&crate::scalars::Gaussian::from_ratio(1, 2));
                let want = vector::scale(&i_half, &diff);
                let w = (xp != want).then(|| format!("X_P = {:?}, (i/2) pr_T(e - ebar) = {:?}", show(&xp), show(&want)));
                let mut check = Check::from_witness("modular field of P equals (i/2) pr_T(e - ebar)", 1, w);
                if xp != want {
                    if let Some(q) = constant_ratio(&xp, &diff) {
                        check = check.with_note(format!("X_P = ({}) pr_T(e - ebar)", q));
                    }
                }
                r.push(check);
                let from_cocycles = self.data.modular_field_from_cocycles();
                let w = (xpi != from_cocycles).then(|| format!("X_pi = {:?}, 1/2(a_*(xi0) - a(X0)) = {:?}", show(&xpi), show(&from_cocycles)));
                r.push(Check::from_witness("modular field of pi equals 1/2 (a_*(xi0) - a(X0))", 1, w));
            }
            Err(e) => r.push(Check::fail("modular field of P equals (i/2) pr_T(e - ebar)", 1, e.to_string())),
        }
        r
    }

    /// Identities of the spinor module for this decomposition.
    pub fn verify_spinor_identities(&self) -> Report {
        check_spinor_identities(&self.dec, self.h())
    }
}

/// `q` constant with `a = q b`, if one exists and `b ≠ 0`.
fn constant_ratio(a: &[ScalarField], b: &[ScalarField]) -> Option<ScalarField> {
    let k = b.iter().position(|x| !x.is_zero())?;
    let q = a[k].div(&b[k]).ok()?;
    (q.is_constant() && a == vector::scale(&q, b).as_slice()).then_some(q)
}

fn show(v: &[ScalarField]) -> Vec<String> {
    v.iter().map(|c| c.to_string()).collect()
}
