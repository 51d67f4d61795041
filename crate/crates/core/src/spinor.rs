//! The Clifford module `Λ•T*_ℂ`: Clifford action, transpose, Mukai pairing,
//! twisted differential, pure spinors and the decomposition
//! `Λ•T*_ℂ = N_0 ⊕ … ⊕ N_{2n}` with its operators `∂`, `∂̄`.
//!
//! Multi-actions nest left to right: `(z_1∧…∧z_k)·ρ = z_1·(…(z_k·ρ))`.

use std::sync::Arc;

use crate::courant::{natural_pairing, validate_closed_3form, GenSection};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::report::{first_failure, Check, Report};
use crate::multivector::{blade_degree, blade_indices, de_rham_d, Blade, Frame, FrameKind, GradedElement};
use crate::scalars::{Chart, ScalarField};

/// A mixed-degree complex form over the cotangent frame of a chart.
pub type Spinor = GradedElement;

fn require_spinor(rho: &Spinor) -> Result<()> {
    if *rho.frame().kind() != FrameKind::Cotangent {
        return Err(Error::ChartMismatch);
    }
    Ok(())
}

fn sign_of(k: usize) -> ScalarField {
    if k.is_multiple_of(2) {
        ScalarField::one()
    } else {
        ScalarField::from_int(-1)
    }
}

/// `(−1)^{j(j−1)/2}`
fn reversal(j: usize) -> i64 {
    if (j * j.saturating_sub(1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `(x + η)·ρ = ι_x ρ + η ∧ ρ`.
pub fn clifford_act(z: &GenSection, rho: &Spinor) -> Result<Spinor> {
    require_spinor(rho)?;
    if z.form_part().frame() != rho.frame() {
        return Err(Error::ChartMismatch);
    }
    let mut out = z.form_part().wedge(rho)?;
    if !z.vector_part().is_zero() {
        let s = rho.part(0);
        let body = if s.is_zero() { rho.clone() } else { rho - &s };
        out = &out + &z.vector_part().contract(&body)?;
    }
    Ok(out)
}

/// `W·ρ` for `W = Σ f_I z_{i_1}∧…∧z_{i_k}` over a frame whose `i`-th element
/// is `sections[i]`.
pub fn clifford_act_multi(w: &GradedElement, sections: &[GenSection], rho: &Spinor) -> Result<Spinor> {
    if sections.len() != w.rank() {
        return Err(Error::FrameMismatch(format!(
            "{} sections for a rank-{} frame",
            sections.len(),
            w.rank()
        )));
    }
    let mut out = GradedElement::zero(rho.frame());
    for (blade, f) in w.terms() {
        let mut acc = rho.clone();
        for &i in blade_indices(blade).iter().rev() {
            acc = clifford_act(&sections[i], &acc)?;
        }
        out = &out + &acc.scale(f);
    }
    Ok(out)
}

/// Reverses wedge factors: the degree-`j` part picks up `(−1)^{j(j−1)/2}`.
pub fn transpose(chi: &Spinor) -> Spinor {
    chi.map_degrees(reversal)
}

fn require_even(rho: &Spinor) -> Result<()> {
    if !rho.rank().is_multiple_of(2) {
        return Err(Error::OddDimension);
    }
    Ok(())
}

/// Coefficient of the top form in `χ^T ∧ ω`.
pub fn mukai(chi: &Spinor, omega: &Spinor) -> Result<ScalarField> {
    require_spinor(chi)?;
    require_even(chi)?;
    Ok(transpose(chi).wedge(omega)?.top_coeff())
}

/// `Σ_i (−1)^{i(i−1)/2} χ_i ∧ ω_{2n−i}`, top coefficient.
pub fn mukai_expanded(chi: &Spinor, omega: &Spinor) -> Result<ScalarField> {
    require_spinor(chi)?;
    require_even(chi)?;
    let m = chi.rank();
    let mut acc = ScalarField::zero();
    for i in 0..=m {
        let a = chi.part(i);
        let b = omega.part(m - i);
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let t = a.wedge(&b)?.top_coeff();
        acc += if reversal(i) < 0 { -t } else { t };
    }
    Ok(acc)
}

/// `d_H ρ = dρ + H ∧ ρ`; `H` must be a closed 3-form.
pub fn d_h(rho: &Spinor, h: &GradedElement) -> Result<Spinor> {
    require_spinor(rho)?;
    let chart = chart_of_frame(rho.frame());
    validate_closed_3form(&chart, h)?;
    d_h_unchecked(rho, h)
}

pub(crate) fn d_h_unchecked(rho: &Spinor, h: &GradedElement) -> Result<Spinor> {
    let d = de_rham_d(rho)?;
    if h.is_zero() {
        return Ok(d);
    }
    Ok(&d + &h.wedge(rho)?)
}

pub(crate) fn chart_of_frame(f: &Frame) -> Chart {
    let names = f
        .labels()
        .iter()
        .map(|l| {
            l.strip_prefix("d/d")
                .or_else(|| l.strip_prefix('d'))
                .unwrap_or(l)
                .to_string()
        })
        .collect();
    Chart::new(names).expect("chart frame labels come from a chart")
}

fn as_column(rho: &Spinor) -> Vec<ScalarField> {
    (0..1usize << rho.rank()).map(|b| rho.coeff(b as Blade)).collect()
}

fn from_column(frame: &Arc<Frame>, v: &[ScalarField]) -> GradedElement {
    let mut out = GradedElement::zero(frame);
    for (b, c) in v.iter().enumerate() {
        if !c.is_zero() {
            out.add_term(b as Blade, c.clone());
        }
    }
    out
}

/// Basis of `{X : X·u = 0}`; fails with `NotPure` unless it is maximal
/// isotropic.
pub fn annihilator(u: &Spinor) -> Result<Vec<GenSection>> {
    require_spinor(u)?;
    if u.is_zero() {
        return Err(Error::NotPure("the zero form".into()));
    }
    let chart = chart_of_frame(u.frame());
    let m = chart.dim();
    let cols: Vec<Vec<ScalarField>> = (0..2 * m)
        .map(|k| {
            let z = GenSection::from_coords(&chart, &crate::linalg::vector::unit(2 * m, k));
            clifford_act(&z, u).map(|r| as_column(&r))
        })
        .collect::<Result<_>>()?;
    let a = Matrix::from_cols(&cols, 1 << m);
    let ker = a.kernel();
    if ker.len() != m {
        return Err(Error::NotPure(format!("annihilator has rank {}, expected {}", ker.len(), m)));
    }
    let secs: Vec<GenSection> = ker.iter().map(|v| GenSection::from_coords(&chart, v)).collect();
    for (i, a) in secs.iter().enumerate() {
        for b in &secs[i..] {
            if !natural_pairing(a, b)?.is_zero() {
                return Err(Error::NotPure(format!("annihilator is not isotropic: <{}, {}> != 0", a, b)));
            }
        }
    }
    Ok(secs)
}

/// Expands `Σ f_I w_{i_1}∧…∧w_{i_k}` where each `w_i` is a degree-1
/// element over `target`.
fn linear_image(x: &GradedElement, images: &[GradedElement], target: &Arc<Frame>) -> Result<GradedElement> {
    let mut out = GradedElement::zero(target);
    for (blade, f) in x.terms() {
        let mut acc = GradedElement::scalar(target, f.clone());
        for &i in &blade_indices(blade) {
            acc = acc.wedge(&images[i])?;
        }
        out = &out + &acc;
    }
    Ok(out)
}

/// A pure spinor `u` with a frame `l_i` of `L = Ann(u)` and the dual frame
/// `θ_j` of `L̄` under `⟨l_i, θ_j⟩ = 2⟨l_i, θ_j⟩_nat = δ_ij`, together with
/// `V ∈ Λ^{2n}L`, `V·ū = u`, `Ω = (−1)^n V̄` and the basis `θ_I·u` of the
/// `N_k`.
#[derive(Clone, Debug)]
pub struct SpinorDecomposition {
    chart: Chart,
    u: Spinor,
    ubar: Spinor,
    l: Vec<GenSection>,
    theta: Vec<GenSection>,
    l_frame: Arc<Frame>,
    lbar_frame: Arc<Frame>,
    /// `l̄_i` in the `θ`-frame.
    conj_l: Vec<GradedElement>,
    /// `θ̄_j` in the `l`-frame.
    conj_theta: Vec<GradedElement>,
    v: GradedElement,
    omega: GradedElement,
    mukai_uu: ScalarField,
    basis_inv: Matrix,
}

impl SpinorDecomposition {
    /// `l` must span `Ann(u)`.
    pub fn new(u: &Spinor, l: Vec<GenSection>) -> Result<Self> {
        require_spinor(u)?;
        require_even(u)?;
        let chart = chart_of_frame(u.frame());
        let m = chart.dim();
        if l.len() != m {
            return Err(Error::NotPure(format!("{} frame sections, expected {}", l.len(), m)));
        }
        for z in &l {
            if z.form_part().frame() != u.frame() {
                return Err(Error::ChartMismatch);
            }
            if !clifford_act(z, u)?.is_zero() {
                return Err(Error::NotPure(format!("{} does not annihilate u", z)));
            }
        }
        let lbar: Vec<GenSection> = l.iter().map(|z| z.conj()).collect();
        let cols: Vec<Vec<ScalarField>> = l.iter().chain(&lbar).map(|z| z.coords()).collect();
        let rank = Matrix::from_cols(&cols, 2 * m).rank();
        if rank != 2 * m {
            return Err(Error::RankDeficient {
                found: rank,
                expected: 2 * m,
            });
        }
        let two = ScalarField::from_int(2);
        let mut g = Matrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                g[(i, j)] = &two * &natural_pairing(&l[i], &lbar[j])?;
            }
        }
        let ginv = g.inverse()?;
        let theta: Vec<GenSection> = (0..m)
            .map(|j| {
                let mut acc = GenSection::zero(&chart);
                for k in 0..m {
                    let c = &ginv[(k, j)];
                    if !c.is_zero() {
                        acc = &acc + &lbar[k].scale(c);
                    }
                }
                acc
            })
            .collect();
        let l_frame = Frame::abstract_frame("l", m);
        let lbar_frame = l_frame.dual();
        // coefficient of θ_j in w ∈ L̄ is 2⟨l_j, w⟩; of l_i in z ∈ L is 2⟨z, θ_i⟩
        let conj_l = lbar
            .iter()
            .map(|w| {
                let v: Vec<ScalarField> = (0..m)
                    .map(|j| natural_pairing(&l[j], w).map(|p| &two * &p))
                    .collect::<Result<_>>()?;
                Ok(GradedElement::from_vector(&lbar_frame, &v))
            })
            .collect::<Result<Vec<_>>>()?;
        let conj_theta = theta
            .iter()
            .map(|t| {
                let z = t.conj();
                let v: Vec<ScalarField> = (0..m)
                    .map(|i| natural_pairing(&z, &theta[i]).map(|p| &two * &p))
                    .collect::<Result<_>>()?;
                Ok(GradedElement::from_vector(&l_frame, &v))
            })
            .collect::<Result<Vec<_>>>()?;
        let ubar = u.conj();
        let mukai_uu = mukai(u, &ubar)?;
        if mukai_uu.is_zero() {
            return Err(Error::DegeneratePairing);
        }
        let mut cols = Vec::with_capacity(1 << m);
        for blade in 0..(1u32 << m) {
            let w = GradedElement::from_blade(&lbar_frame, blade, ScalarField::one());
            cols.push(as_column(&clifford_act_multi(&w, &theta, u)?));
        }
        let basis_inv = Matrix::from_cols(&cols, 1 << m).inverse()?;
        let mut dec = SpinorDecomposition {
            chart,
            u: u.clone(),
            ubar,
            l,
            theta,
            l_frame: l_frame.clone(),
            lbar_frame,
            conj_l,
            conj_theta,
            v: GradedElement::zero(&l_frame),
            omega: GradedElement::zero(&l_frame.dual()),
            mukai_uu,
            basis_inv,
        };
        dec.v = dec.find_v()?;
        let n = m / 2;
        dec.omega = dec.conj_of_l(&dec.v)?.scale(&sign_of(n));
        let p = dec.omega.det_pair(&dec.v)?;
        if !p.is_one() {
            return Err(Error::BadNormalization(format!(
                "<(-1)^n conj V, V> = {}, expected 1",
                p
            )));
        }
        Ok(dec)
    }

    /// Frame from the annihilator of `u`.
    pub fn from_pure_spinor(u: &Spinor) -> Result<Self> {
        SpinorDecomposition::new(u, annihilator(u)?)
    }

    /// The unique multiple `V = c·l_1∧…∧l_{2n}` with `V·ū = u`.
    fn find_v(&self) -> Result<GradedElement> {
        let top = GradedElement::top(&self.l_frame, ScalarField::one());
        let w = self.iso_ibar(&top)?;
        let (b, num) = self
            .u
            .terms()
            .next()
            .map(|(b, c)| (b, c.clone()))
            .ok_or(Error::ZeroTopSection)?;
        let den = w.coeff(b);
        if den.is_zero() {
            return Err(Error::DegeneratePairing);
        }
        let v = top.scale(&num.div(&den)?);
        if self.iso_ibar(&v)? != self.u {
            return Err(Error::DegeneratePairing);
        }
        Ok(v)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn u(&self) -> &Spinor {
        &self.u
    }

    pub fn ubar(&self) -> &Spinor {
        &self.ubar
    }

    pub fn n(&self) -> usize {
        self.chart.dim() / 2
    }

    /// `l_1, …, l_{2n}` spanning `L`.
    pub fn l_sections(&self) -> &[GenSection] {
        &self.l
    }

    /// `θ_1, …, θ_{2n}` spanning `L̄`, dual to the `l_i`.
    pub fn lbar_sections(&self) -> &[GenSection] {
        &self.theta
    }

    pub fn l_frame(&self) -> &Arc<Frame> {
        &self.l_frame
    }

    pub fn lbar_frame(&self) -> &Arc<Frame> {
        &self.lbar_frame
    }

    pub fn v(&self) -> &GradedElement {
        &self.v
    }

    pub fn omega(&self) -> &GradedElement {
        &self.omega
    }

    /// `Mukai(u, ū)`.
    pub fn mukai_uu(&self) -> &ScalarField {
        &self.mukai_uu
    }

    /// Complex conjugate of an element of `Λ•L`, written over the `θ`-frame.
    pub fn conj_of_l(&self, x: &GradedElement) -> Result<GradedElement> {
        linear_image(&x.conj(), &self.conj_l, &self.lbar_frame)
    }

    /// Complex conjugate of an element of `Λ•L̄`, written over the `l`-frame.
    pub fn conj_of_lbar(&self, w: &GradedElement) -> Result<GradedElement> {
        linear_image(&w.conj(), &self.conj_theta, &self.l_frame)
    }

    /// `Σ X^i l_i` for a degree-1 `X` over the `l`-frame.
    pub fn l_section(&self, x: &GradedElement) -> GenSection {
        combine(&self.chart, &self.l, x)
    }

    /// `Σ W^j θ_j` for a degree-1 `W` over the `θ`-frame.
    pub fn lbar_section(&self, w: &GradedElement) -> GenSection {
        combine(&self.chart, &self.theta, w)
    }

    /// Coordinates of `z ∈ L` in the `l`-frame, `None` if `z ∉ L`.
    pub fn l_coords(&self, z: &GenSection) -> Result<Option<GradedElement>> {
        let two = ScalarField::from_int(2);
        let v: Vec<ScalarField> = self
            .theta
            .iter()
            .map(|t| natural_pairing(z, t).map(|p| &two * &p))
            .collect::<Result<_>>()?;
        let x = GradedElement::from_vector(&self.l_frame, &v);
        Ok((self.l_section(&x) == *z).then_some(x))
    }

    /// Coordinates of `z ∈ L̄` in the `θ`-frame, `None` if `z ∉ L̄`.
    pub fn lbar_coords(&self, z: &GenSection) -> Result<Option<GradedElement>> {
        let two = ScalarField::from_int(2);
        let v: Vec<ScalarField> = self
            .l
            .iter()
            .map(|l| natural_pairing(l, z).map(|p| &two * &p))
            .collect::<Result<_>>()?;
        let w = GradedElement::from_vector(&self.lbar_frame, &v);
        Ok((self.lbar_section(&w) == *z).then_some(w))
    }

    /// `I(W⊗u) = W·u` for `W ∈ Λ•L̄`.
    pub fn iso_i(&self, w: &GradedElement) -> Result<Spinor> {
        if w.frame() != &self.lbar_frame {
            return Err(Error::FrameMismatch("expected an element of the L-bar exterior algebra".into()));
        }
        clifford_act_multi(w, &self.theta, &self.u)
    }

    /// `Ī(X⊗ū) = X·ū` for `X ∈ Λ•L`.
    pub fn iso_ibar(&self, x: &GradedElement) -> Result<Spinor> {
        if x.frame() != &self.l_frame {
            return Err(Error::FrameMismatch("expected an element of the L exterior algebra".into()));
        }
        clifford_act_multi(x, &self.l, &self.ubar)
    }

    /// The unique `W ∈ Λ•L̄` with `W·u = ρ`.
    pub fn coords(&self, rho: &Spinor) -> Result<GradedElement> {
        require_spinor(rho)?;
        if rho.frame() != self.u.frame() {
            return Err(Error::ChartMismatch);
        }
        let c = self.basis_inv.apply(&as_column(rho));
        Ok(from_column(&self.lbar_frame, &c))
    }

    /// Components `(n_0, …, n_{2n})` with `n_k ∈ N_k = Λ^k L̄·u`.
    pub fn nk_decompose(&self, rho: &Spinor) -> Result<Vec<Spinor>> {
        let w = self.coords(rho)?;
        (0..=self.chart.dim()).map(|k| self.iso_i(&w.part(k))).collect()
    }

    /// `(∂n, ∂̄n) = (pr_{N_{k−1}} d_H n, pr_{N_{k+1}} d_H n)` for `n ∈ N_k`;
    /// any other component of `d_H n` is reported as leakage.
    pub fn partial_ops(&self, n: &Spinor, k: usize, h: &GradedElement) -> Result<(Spinor, Spinor)> {
        let own = self.coords(n)?;
        if own.terms().any(|(b, _)| blade_degree(b) != k) {
            return Err(Error::DegreeMismatch(format!("input is not in N_{}", k)));
        }
        let w = self.coords(&d_h_unchecked(n, h)?)?;
        let stray: Vec<usize> = {
            let mut d: Vec<usize> = w
                .terms()
                .map(|(b, _)| blade_degree(b))
                .filter(|&d| d + 1 != k && d != k + 1)
                .collect();
            d.dedup();
            d
        };
        if !stray.is_empty() {
            return Err(Error::LeakageOutsideAdjacent(format!(
                "d_H of an N_{} element has components in N_{:?}",
                k, stray
            )));
        }
        let del = if k == 0 { GradedElement::zero(n.frame()) } else { self.iso_i(&w.part(k - 1))? };
        let delbar = self.iso_i(&w.part(k + 1))?;
        Ok((del, delbar))
    }

    /// The `N`-degree of a homogeneous spinor, `None` for zero or mixed.
    pub fn nk_degree(&self, rho: &Spinor) -> Result<Option<usize>> {
        Ok(self.coords(rho)?.degree())
    }

    /// `ω1⊗ω2 ↦ Ω⊗Mukai(V·ω1, ω2)`, returned as the top element
    /// `Mukai(V·ω1, ω2)·Ω` of `Λ^{2n}L̄` (the density factor is `dx_1∧…∧dx_{2n}`).
    pub fn canonical_iso(&self, omega1: &Spinor, omega2: &Spinor) -> Result<GradedElement> {
        let vw = self.iso_ibar_on(&self.v, omega1)?;
        Ok(self.omega.scale(&mukai(&vw, omega2)?))
    }

    /// `X·ρ` for `X ∈ Λ•L` and an arbitrary spinor.
    pub fn iso_ibar_on(&self, x: &GradedElement, rho: &Spinor) -> Result<Spinor> {
        clifford_act_multi(x, &self.l, rho)
    }

    /// `W·ρ` for `W ∈ Λ•L̄` and an arbitrary spinor.
    pub fn iso_i_on(&self, w: &GradedElement, rho: &Spinor) -> Result<Spinor> {
        clifford_act_multi(w, &self.theta, rho)
    }

    /// The `e ∈ Γ(L̄)` with `d_H u = e·u`, in the `θ`-frame.
    pub fn find_e(&self, h: &GradedElement) -> Result<GradedElement> {
        let w = self.coords(&d_h_unchecked(&self.u, h)?)?;
        if w.terms().any(|(b, _)| blade_degree(b) != 1) {
            return Err(Error::NotIntegrable(format!("d_H u is not in N_1: {}", w)));
        }
        Ok(w)
    }
}

fn combine(chart: &Chart, secs: &[GenSection], x: &GradedElement) -> GenSection {
    let mut acc = GenSection::zero(chart);
    for (i, s) in secs.iter().enumerate() {
        let c = x.coeff(1 << i);
        if !c.is_zero() {
            acc = &acc + &s.scale(&c);
        }
    }
    acc
}

/// `find_V` for an explicit frame of `L`.
pub fn find_v(u: &Spinor, l: Vec<GenSection>) -> Result<GradedElement> {
    Ok(SpinorDecomposition::new(u, l)?.v().clone())
}

/// `e` with `d_H u = e·u` as a section of `T_ℂ⊕T*_ℂ`.
pub fn find_e(u: &Spinor, h: &GradedElement) -> Result<GenSection> {
    let chart = chart_of_frame(u.frame());
    validate_closed_3form(&chart, h)?;
    let dec = SpinorDecomposition::from_pure_spinor(u)?;
    Ok(dec.lbar_section(&dec.find_e(h)?))
}

fn basis_forms(frame: &Arc<Frame>) -> Vec<Spinor> {
    (0..1u32 << frame.rank())
        .map(|b| GradedElement::from_blade(frame, b, ScalarField::one()))
        .collect()
}

/// Clifford relation, transpose involution, the two Mukai routes, Mukai
/// symmetry and 2-form equivariance, over full bases of `Λ•T*`.
pub fn check_mukai_identities(chart: &Chart) -> Report {
    let mut report = Report::new("mukai-identities");
    let cot = Frame::cotangent(chart);
    let m = chart.dim();
    let n = m / 2;
    let basis = basis_forms(&cot);
    let pairs: Vec<(usize, usize)> =
        (0..basis.len()).flat_map(|i| (0..basis.len()).map(move |j| (i, j))).collect();

    let zs: Vec<GenSection> = (0..2 * m)
        .flat_map(|a| (a..2 * m).map(move |b| (a, b)))
        .map(|(a, b)| {
            let v = crate::linalg::vector::add(
                &crate::linalg::vector::unit(2 * m, a),
                &crate::linalg::vector::unit(2 * m, b),
            );
            GenSection::from_coords(chart, &v)
        })
        .collect();
    let items: Vec<(usize, usize)> =
        (0..zs.len()).flat_map(|i| (0..basis.len()).map(move |j| (i, j))).collect();
    let w = first_failure(&items, |&(i, j)| {
        let z = &zs[i];
        let rho = &basis[j];
        let run = || -> Result<Spinor> {
            let zz = clifford_act(z, &clifford_act(z, rho)?)?;
            Ok(&zz - &rho.scale(&natural_pairing(z, z)?))
        };
        match run() {
            Err(e) => Some(e.to_string()),
            Ok(r) => (!r.is_zero()).then(|| format!("z = {}, rho = {}: residual {}", z, rho, r)),
        }
    });
    report.push(Check::from_witness("z.z.rho = <z,z> rho", items.len(), w));

    let w = first_failure(&basis, |b| (transpose(&transpose(b)) != *b).then(|| format!("{}", b)));
    report.push(Check::from_witness("transpose is an involution", basis.len(), w));

    if !m.is_multiple_of(2) {
        report.push(Check::fail("Mukai pairing needs an even dimension", 0, format!("dimension {}", m)));
        return report;
    }
    let w = first_failure(&pairs, |&(i, j)| {
        let (a, b) = (&basis[i], &basis[j]);
        let run = || -> Result<Option<String>> {
            let t = mukai(a, b)?;
            let e = mukai_expanded(a, b)?;
            Ok((t != e).then(|| format!("chi = {}, omega = {}: {} vs {}", a, b, t, e)))
        };
        run().unwrap_or_else(|e| Some(e.to_string()))
    });
    report.push(Check::from_witness("Mukai via transpose equals the expanded sum", pairs.len(), w));

    let w = first_failure(&pairs, |&(i, j)| {
        let (a, b) = (&basis[i], &basis[j]);
        let run = || -> Result<Option<String>> {
            let l = mukai(a, b)?;
            let r = mukai(b, a)?.scale(&crate::scalars::Gaussian::from_int(if n.is_multiple_of(2) { 1 } else { -1 }));
            Ok((l != r).then(|| format!("chi = {}, omega = {}: {} vs {}", a, b, l, r)))
        };
        run().unwrap_or_else(|e| Some(e.to_string()))
    });
    report.push(Check::from_witness("Mukai(chi, omega) = (-1)^n Mukai(omega, chi)", pairs.len(), w));

    let two_forms: Vec<Spinor> = crate::multivector::blades_of_degree(m, 2)
        .into_iter()
        .map(|b| GradedElement::from_blade(&cot, b, ScalarField::one()))
        .collect();
    let triples: Vec<(usize, usize, usize)> = (0..two_forms.len())
        .flat_map(|f| pairs.iter().map(move |&(i, j)| (f, i, j)))
        .collect();
    let w = first_failure(&triples, |&(f, i, j)| {
        let (phi, a, b) = (&two_forms[f], &basis[i], &basis[j]);
        let run = || -> Result<Option<String>> {
            let s = &mukai(&phi.wedge(a)?, b)? + &mukai(a, &phi.wedge(b)?)?;
            Ok((!s.is_zero()).then(|| format!("phi = {}, chi = {}, omega = {}: sum {}", phi, a, b, s)))
        };
        run().unwrap_or_else(|e| Some(e.to_string()))
    });
    report.push(Check::from_witness(
        "Mukai(phi^chi, omega) + Mukai(chi, phi^omega) = 0 for 2-forms",
        triples.len(),
        w,
    ));
    report
}

/// Identities of a decomposition: Mukai orthogonality of the `N_k`, the
/// sign law `X·W·u = (−1)^{i(i−1)/2}(ι_X W)·u`, round trips of `I`, and
/// `d_H = ∂ + ∂̄` on every `N_k` basis element.
pub fn check_spinor_identities(dec: &SpinorDecomposition, h: &GradedElement) -> Report {
    let mut report = check_mukai_identities(dec.chart());
    report.title = "spinor-identities".into();
    report.banner("N_k = Lambda^k Lbar . u; del lowers the N-degree, delbar raises it");
    let m = dec.chart().dim();
    let ft = dec.lbar_frame().clone();
    let fl = dec.l_frame().clone();
    let ws = basis_forms(&ft);
    let images: Vec<Result<Spinor>> = ws.iter().map(|w| dec.iso_i(w)).collect();
    let pairs: Vec<(usize, usize)> = (0..ws.len()).flat_map(|i| (0..ws.len()).map(move |j| (i, j))).collect();
    let w = first_failure(&pairs, |&(i, j)| {
        let (di, dj) = (ws[i].degree().unwrap_or(0), ws[j].degree().unwrap_or(0));
        if di + dj == m {
            return None;
        }
        let run = || -> Result<Option<String>> {
            let (a, b) = (images[i].clone()?, images[j].clone()?);
            let p = mukai(&a, &b)?;
            Ok((!p.is_zero()).then(|| format!("N_{} x N_{}: Mukai({}, {}) = {}", di, dj, a, b, p)))
        };
        run().unwrap_or_else(|e| Some(e.to_string()))
    });
    report.push(Check::from_witness("Mukai vanishes on N_i x N_k unless i + k = 2n", pairs.len(), w));

    let degs: Vec<usize> = (0..=m).collect();
    let w = first_failure(&degs, |&i| {
        let bi: Vec<usize> = (0..ws.len()).filter(|&a| ws[a].degree().unwrap_or(0) == i).collect();
        let bj: Vec<usize> = (0..ws.len()).filter(|&a| ws[a].degree().unwrap_or(0) == m - i).collect();
        let run = || -> Result<Option<String>> {
            let mut mat = Matrix::zeros(bi.len(), bj.len());
            for (r, &a) in bi.iter().enumerate() {
                for (c, &b) in bj.iter().enumerate() {
                    mat[(r, c)] = mukai(&images[a].clone()?, &images[b].clone()?)?;
                }
            }
            let rk = mat.rank();
            Ok((rk != bi.len()).then(|| format!("N_{} x N_{} pairing has rank {} of {}", i, m - i, rk, bi.len())))
        };
        run().unwrap_or_else(|e| Some(e.to_string()))
    });
    report.push(Check::from_witness("Mukai is nondegenerate on N_i x N_(2n-i)", degs.len(), w));

    let xs = basis_forms(&fl);
    let lw: Vec<(usize, usize)> = (0..xs.len())
        .flat_map(|i| (0..ws.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| xs[i].degree().unwrap_or(0) <= ws[j].degree().unwrap_or(0))
        .collect();
    let w = first_failure(&lw, |&(i, j)| {
        let (x, wv) = (&xs[i], &ws[j]);
        let k = x.degree().unwrap_or(0);
        let run = || -> Result<Option<String>> {
            let lhs = dec.iso_ibar_on(x, &images[j].clone()?)?;
            let rhs = dec.iso_i(&x.contract(wv)?)?.map_degrees(|_| reversal(k));
            let res = &lhs - &rhs;
            Ok((!res.is_zero()).then(|| format!("X = {}, W = {}: residual {}", x, wv, res)))
        };
        run().unwrap_or_else(|e| Some(e.to_string()))
    });
    report.push(Check::from_witness("X.W.u = (-1)^(i(i-1)/2) (i_X W).u", lw.len(), w));

    let w = first_failure(&ws, |wv| {
        let run = || -> Result<Option<String>> {
            let back = dec.coords(&dec.iso_i(wv)?)?;
            Ok((back != *wv).then(|| format!("W = {}: recovered {}", wv, back)))
        };
        run().unwrap_or_else(|e| Some(e.to_string()))
    });
    report.push(Check::from_witness("I is inverted by the N_k decomposition", ws.len(), w));

    let w = first_failure(&ws, |wv| {
        let k = wv.degree().unwrap_or(0);
        let run = || -> Result<Option<String>> {
            let n = dec.iso_i(wv)?;
            let (del, delbar) = dec.partial_ops(&n, k, h)?;
            let res = &(&del + &delbar) - &d_h_unchecked(&n, h)?;
            Ok((!res.is_zero()).then(|| format!("W = {}: residual {}", wv, res)))
        };
        run().unwrap_or_else(|e| Some(e.to_string()))
    });
    report.push(Check::from_witness("d_H = del + delbar on every N_k", ws.len(), w));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str, c: &Chart) -> Spinor {
        GradedElement::parse(s, c, &Frame::cotangent(c)).unwrap()
    }

    #[test]
    fn clifford_examples() {
        let c = Chart::standard(2);
        let rho = parse("x1 + x2*e[1] + 3*e[1^2]", &c);
        let z = GenSection::parse("e[1]", "e[1]", &c).unwrap();
        let twice = clifford_act(&z, &clifford_act(&z, &rho).unwrap()).unwrap();
        assert_eq!(twice, rho);
        let d1 = GenSection::parse("e[1]", "0", &c).unwrap();
        assert_eq!(clifford_act(&d1, &parse("e[1^2]", &c)).unwrap(), parse("e[2]", &c));
        let dx1 = GenSection::parse("0", "e[1]", &c).unwrap();
        assert_eq!(clifford_act(&dx1, &parse("1", &c)).unwrap(), parse("e[1]", &c));
    }

    #[test]
    fn transpose_and_mukai_examples() {
        let c = Chart::standard(3);
        assert_eq!(transpose(&parse("e[1^2]", &c)), parse("-e[1^2]", &c));
        assert_eq!(transpose(&parse("e[1^2^3]", &c)), parse("-e[1^2^3]", &c));
        assert_eq!(transpose(&parse("x1", &c)), parse("x1", &c));
        let c2 = Chart::standard(2);
        let u = parse("1 + i*e[1^2]", &c2);
        let m = mukai(&u, &u.conj()).unwrap();
        assert_eq!(m, ScalarField::i().scale(&crate::scalars::Gaussian::from_int(-2)));
        assert_eq!(m, mukai_expanded(&u, &u.conj()).unwrap());
        assert!(matches!(mukai(&parse("1", &c), &parse("1", &c)), Err(Error::OddDimension)));
    }

    #[test]
    fn d_h_examples() {
        let c = Chart::standard(4);
        let h = parse("e[1^2^3]", &c);
        assert_eq!(d_h(&parse("1", &c), &h).unwrap(), h);
        let rho = parse("x4 + x1*x4*e[2] + x2*e[3^4]", &c);
        assert!(d_h(&d_h(&rho, &h).unwrap(), &h).unwrap().is_zero());
        let bad = parse("x4*e[1^2^3]", &c);
        assert!(matches!(d_h(&rho, &bad), Err(Error::NotClosed(_))));
    }

    fn spans_equal(a: &[GenSection], b: &[GenSection]) -> bool {
        let cols: Vec<Vec<ScalarField>> = a.iter().chain(b).map(|z| z.coords()).collect();
        let ca: Vec<Vec<ScalarField>> = a.iter().map(|z| z.coords()).collect();
        let n = a[0].coords().len();
        Matrix::from_cols(&cols, n).rank() == Matrix::from_cols(&ca, n).rank()
    }

    #[test]
    fn annihilator_examples() {
        let c = Chart::standard(2);
        let l = annihilator(&parse("1 + i*e[1^2]", &c)).unwrap();
        let expected = vec![
            GenSection::parse("e[1]", "-i*e[2]", &c).unwrap(),
            GenSection::parse("e[2]", "i*e[1]", &c).unwrap(),
        ];
        assert!(spans_equal(&l, &expected));
        let l = annihilator(&parse("e[1] + i*e[2]", &c)).unwrap();
        let expected = vec![
            GenSection::parse("e[1] + i*e[2]", "0", &c).unwrap(),
            GenSection::parse("0", "e[1] + i*e[2]", &c).unwrap(),
        ];
        assert!(spans_equal(&l, &expected));
        assert!(matches!(annihilator(&parse("1 + e[1]", &c)), Err(Error::NotPure(_))));
    }

    #[test]
    fn decomposition_of_symplectic_spinor() {
        let c = Chart::standard(2);
        let u = parse("1 + i*e[1^2]", &c);
        let dec = SpinorDecomposition::from_pure_spinor(&u).unwrap();
        assert_eq!(dec.iso_ibar(dec.v()).unwrap(), u);
        assert!(dec.omega().det_pair(dec.v()).unwrap().is_one());
        let parts = dec.nk_decompose(&u).unwrap();
        assert_eq!(parts[0], u);
        let parts = dec.nk_decompose(dec.ubar()).unwrap();
        assert_eq!(parts[2], *dec.ubar());
        assert!(parts[0].is_zero() && parts[1].is_zero());
        assert!(dec.find_e(&parse("0", &c)).unwrap().is_zero());
    }

    #[test]
    fn rescaled_spinor_gives_nonzero_e() {
        let c = Chart::standard(2);
        let g = parse("1 + x1^2", &c);
        let u = g.wedge(&parse("1 + i*e[1^2]", &c)).unwrap();
        let zero = parse("0", &c);
        let e = find_e(&u, &zero).unwrap();
        assert!(!e.is_zero());
        assert_eq!(clifford_act(&e, &u).unwrap(), d_h(&u, &zero).unwrap());
        let ebar = e.conj();
        let ubar = u.conj();
        assert_eq!(clifford_act(&ebar, &ubar).unwrap(), d_h(&ubar, &zero).unwrap());
    }
}
