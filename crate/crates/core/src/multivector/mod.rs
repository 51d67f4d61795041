//! Graded exterior algebra over a declared frame.
//!
//! A [`GradedElement`] is a mixed-degree sum `Σ f_I e_I` where `I` ranges over
//! strictly increasing index sets (stored as bitmasks). Frames come in dual
//! pairs; pairings and contractions go between a frame and its dual.
//!
//! Contraction convention: `ι_X φ` is the adjoint of the wedge,
//! `⟨ι_X φ, Y⟩ = ⟨φ, X ∧ Y⟩`. In particular `ι_{X∧Y} = ι_Y ∘ ι_X`.

mod cartan;
mod syntax;

pub use cartan::{de_rham_d, interior, lie_derivative, vector_field_bracket, volume_divergence};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalars::{Chart, ScalarField};

/// Which bundle a frame trivializes.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum FrameKind {
    /// Coordinate vector fields `∂/∂x_k` of a chart.
    Tangent,
    /// Coordinate differentials `dx_k` of a chart.
    Cotangent,
    /// A named abstract frame; `dual` distinguishes the frame from its dual.
    Abstract { name: String, dual: bool },
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Frame {
    rank: usize,
    labels: Vec<String>,
    kind: FrameKind,
}

impl Frame {
    pub fn tangent(chart: &Chart) -> Arc<Frame> {
        Arc::new(Frame {
            rank: chart.dim(),
            labels: chart.names().iter().map(|n| format!("d/d{}", n)).collect(),
            kind: FrameKind::Tangent,
        })
    }

    pub fn cotangent(chart: &Chart) -> Arc<Frame> {
        Arc::new(Frame {
            rank: chart.dim(),
            labels: chart.names().iter().map(|n| format!("d{}", n)).collect(),
            kind: FrameKind::Cotangent,
        })
    }

    pub fn abstract_frame(name: &str, rank: usize) -> Arc<Frame> {
        assert!((1..=32).contains(&rank), "frame rank must be in 1..=32");
        Arc::new(Frame {
            rank,
            labels: (1..=rank).map(|k| format!("{}{}", name, k)).collect(),
            kind: FrameKind::Abstract {
                name: name.to_string(),
                dual: false,
            },
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn kind(&self) -> &FrameKind {
        &self.kind
    }

    pub fn is_chart(&self) -> bool {
        matches!(self.kind, FrameKind::Tangent | FrameKind::Cotangent)
    }

    /// The linked dual frame.
    pub fn dual(&self) -> Arc<Frame> {
        let (kind, labels) = match &self.kind {
            FrameKind::Tangent => (
                FrameKind::Cotangent,
                self.labels.iter().map(|l| l.replacen("d/d", "d", 1)).collect(),
            ),
            FrameKind::Cotangent => (
                FrameKind::Tangent,
                self.labels.iter().map(|l| l.replacen('d', "d/d", 1)).collect(),
            ),
            FrameKind::Abstract { name, dual } => (
                FrameKind::Abstract {
                    name: name.clone(),
                    dual: !dual,
                },
                if *dual {
                    self.labels.iter().map(|l| l.trim_end_matches('*').to_string()).collect()
                } else {
                    self.labels.iter().map(|l| format!("{}*", l)).collect()
                },
            ),
        };
        Arc::new(Frame {
            rank: self.rank,
            labels,
            kind,
        })
    }

    pub fn is_dual_of(&self, other: &Frame) -> bool {
        *self.dual() == *other
    }
}

/// Sorted index set as a bitmask.
pub type Blade = u32;

pub fn blade_degree(b: Blade) -> usize {
    b.count_ones() as usize
}

pub fn blade_indices(b: Blade) -> Vec<usize> {
    (0..32).filter(|k| b & (1 << k) != 0).collect()
}

pub fn blade_from_indices(idx: &[usize]) -> Blade {
    idx.iter().fold(0, |acc, &k| acc | (1 << k))
}

/// Sign of `e_a ∧ e_b` relative to `e_{a∪b}`, or `None` if they overlap.
pub fn wedge_sign(a: Blade, b: Blade) -> Option<i64> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if swaps.is_multiple_of(2) { 1 } else { -1 })
}

/// All blades of the given degree in a rank-`r` frame, in lexicographic order.
pub fn blades_of_degree(rank: usize, degree: usize) -> Vec<Blade> {
    let mut out: Vec<Blade> = (0u32..(1u32 << rank))
        .filter(|b| blade_degree(*b) == degree)
        .collect();
    out.sort_by_key(|b| blade_indices(*b));
    out
}

/// A mixed-degree element of `Λ•F` for a frame `F`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedElement {
    frame: Arc<Frame>,
    terms: BTreeMap<Blade, ScalarField>,
}

impl GradedElement {
    pub fn zero(frame: &Arc<Frame>) -> Self {
        GradedElement {
            frame: frame.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(frame: &Arc<Frame>, f: ScalarField) -> Self {
        let mut e = GradedElement::zero(frame);
        e.add_term(0, f);
        e
    }

    /// `e_{i1} ∧ ... ∧ e_{ik}` for arbitrary (possibly unsorted) indices.
    pub fn basis(frame: &Arc<Frame>, indices: &[usize]) -> Result<Self> {
        let mut blade: Blade = 0;
        let mut sign = 1i64;
        for &k in indices {
            if k >= frame.rank() {
                return Err(Error::IndexOutOfRange {
                    index: k,
                    bound: frame.rank(),
                });
            }
            match wedge_sign(blade, 1 << k) {
                None => return Ok(GradedElement::zero(frame)),
                Some(s) => {
                    sign *= s;
                    blade |= 1 << k;
                }
            }
        }
        Ok(GradedElement::from_blade(frame, blade, ScalarField::from_int(sign)))
    }

    pub fn from_blade(frame: &Arc<Frame>, blade: Blade, f: ScalarField) -> Self {
        let mut e = GradedElement::zero(frame);
        e.add_term(blade, f);
        e
    }

    /// Degree-1 element `Σ v_k e_k`.
    pub fn from_vector(frame: &Arc<Frame>, v: &[ScalarField]) -> Self {
        assert_eq!(v.len(), frame.rank());
        let mut e = GradedElement::zero(frame);
        for (k, f) in v.iter().enumerate() {
            e.add_term(1 << k, f.clone());
        }
        e
    }

    /// Top-degree element `f e_1 ∧ ... ∧ e_r`.
    pub fn top(frame: &Arc<Frame>, f: ScalarField) -> Self {
        GradedElement::from_blade(frame, (1u64 << frame.rank()).wrapping_sub(1) as Blade, f)
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn rank(&self) -> usize {
        self.frame.rank()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &ScalarField)> {
        self.terms.iter().map(|(b, f)| (*b, f))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, blade: Blade) -> ScalarField {
        self.terms.get(&blade).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, blade: Blade, f: ScalarField) {
        if f.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(blade) {
            Entry::Vacant(v) => {
                v.insert(f);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &f;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `Some(k)` if every term has degree `k` (zero counts as any degree: `None`).
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|b| blade_degree(*b));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|b| blade_degree(*b)).max()
    }

    /// Degree-`k` component.
    pub fn part(&self, k: usize) -> GradedElement {
        GradedElement {
            frame: self.frame.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| blade_degree(**b) == k)
                .map(|(b, f)| (*b, f.clone()))
                .collect(),
        }
    }

    /// Coefficient vector of the degree-1 part.
    pub fn to_vector(&self) -> Vec<ScalarField> {
        (0..self.rank()).map(|k| self.coeff(1 << k)).collect()
    }

    /// Coefficient of `e_1 ∧ ... ∧ e_r`.
    pub fn top_coeff(&self) -> ScalarField {
        self.coeff((1u64 << self.rank()).wrapping_sub(1) as Blade)
    }

    pub fn scale(&self, f: &ScalarField) -> GradedElement {
        if f.is_zero() {
            return GradedElement::zero(&self.frame);
        }
        GradedElement {
            frame: self.frame.clone(),
            terms: self.terms.iter().map(|(b, c)| (*b, c * f)).collect(),
        }
    }

    pub fn map_coeffs(&self, mut g: impl FnMut(&ScalarField) -> ScalarField) -> GradedElement {
        let mut out = GradedElement::zero(&self.frame);
        for (b, c) in &self.terms {
            out.add_term(*b, g(c));
        }
        out
    }

    /// Multiplies the degree-`k` part by `s(k)`.
    pub fn map_degrees(&self, s: impl Fn(usize) -> i64) -> GradedElement {
        let mut out = GradedElement::zero(&self.frame);
        for (b, c) in &self.terms {
            let sign = s(blade_degree(*b));
            if sign != 0 {
                out.add_term(*b, c.scale(&crate::scalars::Gaussian::from_int(sign)));
            }
        }
        out
    }

    /// Complex conjugation of the coefficients.
    pub fn conj(&self) -> GradedElement {
        self.map_coeffs(|c| c.conj())
    }

    /// Same coefficients over another frame of equal rank.
    pub fn reframe(&self, frame: &Arc<Frame>) -> GradedElement {
        assert_eq!(frame.rank(), self.rank());
        GradedElement {
            frame: frame.clone(),
            terms: self.terms.clone(),
        }
    }

    fn check_same(&self, other: &GradedElement) -> Result<()> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch(format!(
                "{:?} vs {:?}",
                self.frame.kind(),
                other.frame.kind()
            )));
        }
        Ok(())
    }

    fn check_dual(&self, other: &GradedElement) -> Result<()> {
        if !self.frame.is_dual_of(&other.frame) {
            return Err(Error::FrameMismatch(format!(
                "{:?} is not dual to {:?}",
                self.frame.kind(),
                other.frame.kind()
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &GradedElement) -> Result<GradedElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (b, f) in &other.terms {
            out.add_term(*b, f.clone());
        }
        Ok(out)
    }

    /// Exterior product; graded-commutative and associative.
    pub fn wedge(&self, other: &GradedElement) -> Result<GradedElement> {
        self.check_same(other)?;
        let mut out = GradedElement::zero(&self.frame);
        for (a, fa) in &self.terms {
            for (b, fb) in &other.terms {
                if let Some(s) = wedge_sign(*a, *b) {
                    let c = fa * fb;
                    out.add_term(a | b, if s < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Determinant pairing `⟨ξ_1∧…∧ξ_k, X_1∧…∧X_k⟩ = det(ξ_i(X_j))` between
    /// homogeneous elements of equal degree over dual frames.
    pub fn det_pair(&self, other: &GradedElement) -> Result<ScalarField> {
        self.check_dual(other)?;
        if let (Some(a), Some(b)) = (self.degree(), other.degree()) {
            if a != b {
                return Err(Error::DegreeMismatch(format!("pairing degree {} with {}", a, b)));
            }
        }
        let mut acc = ScalarField::zero();
        for (b, f) in &self.terms {
            if let Some(g) = other.terms.get(b) {
                acc += f * g;
            }
        }
        Ok(acc)
    }

    /// `ι_self φ`, adjoint to the wedge: `⟨ι_X φ, Y⟩ = ⟨φ, X ∧ Y⟩`.
    pub fn contract(&self, phi: &GradedElement) -> Result<GradedElement> {
        self.check_dual(phi)?;
        if let (Some(k), Some(l)) = (self.degree(), phi.degree()) {
            if k > l {
                return Err(Error::DegreeMismatch(format!("contracting degree {} into {}", k, l)));
            }
        }
        let mut out = GradedElement::zero(&phi.frame);
        for (i, f) in &self.terms {
            for (j, g) in &phi.terms {
                if i & j != *i {
                    continue;
                }
                let rest = j & !i;
                let s = wedge_sign(*i, rest).expect("disjoint");
                let c = f * g;
                out.add_term(rest, if s < 0 { -c } else { c });
            }
        }
        Ok(out)
    }

    /// `Ω♯(X) = ι_X Ω` for a top-degree `Ω` over the dual frame.
    pub fn omega_sharp(&self, omega: &GradedElement) -> Result<GradedElement> {
        check_top(omega)?;
        self.contract(omega)
    }

    /// `V♯(ξ) = ι_ξ V` for a top-degree `V` over the dual frame.
    pub fn v_sharp(&self, v: &GradedElement) -> Result<GradedElement> {
        check_top(v)?;
        self.contract(v)
    }
}

fn check_top(t: &GradedElement) -> Result<()> {
    if t.is_zero() {
        return Err(Error::ZeroTopSection);
    }
    if t.degree() != Some(t.rank()) {
        return Err(Error::DegreeMismatch(format!(
            "expected a top-degree ({}) section",
            t.rank()
        )));
    }
    Ok(())
}

impl Add for &GradedElement {
    type Output = GradedElement;
    /// Panics on frame mismatch; use [`GradedElement::try_add`] for a checked sum.
    fn add(self, rhs: &GradedElement) -> GradedElement {
        self.try_add(rhs).expect("adding elements over different frames")
    }
}

impl Add for GradedElement {
    type Output = GradedElement;
    fn add(self, rhs: GradedElement) -> GradedElement {
        &self + &rhs
    }
}

impl Sub for &GradedElement {
    type Output = GradedElement;
    fn sub(self, rhs: &GradedElement) -> GradedElement {
        self + &(-rhs)
    }
}

impl Sub for GradedElement {
    type Output = GradedElement;
    fn sub(self, rhs: GradedElement) -> GradedElement {
        &self - &rhs
    }
}

impl Neg for &GradedElement {
    type Output = GradedElement;
    fn neg(self) -> GradedElement {
        GradedElement {
            frame: self.frame.clone(),
            terms: self.terms.iter().map(|(b, f)| (*b, -f)).collect(),
        }
    }
}

impl Neg for GradedElement {
    type Output = GradedElement;
    fn neg(self) -> GradedElement {
        -&self
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut keys: Vec<Blade> = self.terms.keys().copied().collect();
        keys.sort_by_key(|b| (blade_degree(*b), blade_indices(*b)));
        let parts: Vec<String> = keys
            .iter()
            .map(|b| {
                let c = &self.terms[b];
                if *b == 0 {
                    format!("({})", c)
                } else {
                    let idx: Vec<&str> =
                        blade_indices(*b).iter().map(|k| self.frame.labels[*k].as_str()).collect();
                    format!("({})*{}", c, idx.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(r: usize) -> Arc<Frame> {
        Frame::abstract_frame("e", r)
    }

    fn b(fr: &Arc<Frame>, idx: &[usize]) -> GradedElement {
        GradedElement::basis(fr, idx).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let f = frame(3);
        assert_eq!(b(&f, &[0]).wedge(&b(&f, &[1])).unwrap(), b(&f, &[0, 1]));
        assert!(b(&f, &[0]).wedge(&b(&f, &[0])).unwrap().is_zero());
        assert_eq!(b(&f, &[1]).wedge(&b(&f, &[0])).unwrap(), -b(&f, &[0, 1]));
        let g = frame(2);
        assert!(matches!(b(&f, &[0]).wedge(&b(&g, &[0])), Err(Error::FrameMismatch(_))));
    }

    #[test]
    fn det_pair_examples() {
        let f = frame(2);
        let d = f.dual();
        assert!(b(&d, &[0, 1]).det_pair(&b(&f, &[0, 1])).unwrap().is_one());
        assert_eq!(b(&d, &[1, 0]).det_pair(&b(&f, &[0, 1])).unwrap(), ScalarField::from_int(-1));
        assert!(b(&d, &[0]).det_pair(&b(&f, &[1])).unwrap().is_zero());
        assert!(matches!(
            b(&d, &[0]).det_pair(&b(&f, &[0, 1])),
            Err(Error::DegreeMismatch(_))
        ));
    }

    #[test]
    fn contraction_examples() {
        let f = frame(2);
        let d = f.dual();
        assert_eq!(b(&f, &[0]).contract(&b(&d, &[0, 1])).unwrap(), b(&d, &[1]));
        assert_eq!(b(&f, &[1]).contract(&b(&d, &[0, 1])).unwrap(), -b(&d, &[0]));
        assert!(b(&f, &[0]).contract(&b(&d, &[1])).unwrap().is_zero());
        assert!(matches!(
            b(&f, &[0, 1]).contract(&b(&d, &[1])),
            Err(Error::DegreeMismatch(_))
        ));
    }

    #[test]
    fn sharp_examples_rank_two() {
        let f = frame(2);
        let d = f.dual();
        let omega = b(&d, &[0, 1]);
        let v = b(&f, &[0, 1]);
        let x = b(&f, &[0]);
        let ox = x.omega_sharp(&omega).unwrap();
        assert_eq!(ox, b(&d, &[1]));
        assert_eq!(ox.v_sharp(&v).unwrap(), -x.clone());
        let one = GradedElement::scalar(&f, ScalarField::one());
        assert_eq!(one.omega_sharp(&omega).unwrap(), omega);
        assert!(matches!(
            x.omega_sharp(&GradedElement::zero(&d)),
            Err(Error::ZeroTopSection)
        ));
    }

    #[test]
    fn interior_of_product_reverses_order() {
        let f = frame(3);
        let d = f.dual();
        let phi = b(&d, &[0, 1, 2]);
        let x = b(&f, &[0]);
        let y = b(&f, &[2]);
        let lhs = x.wedge(&y).unwrap().contract(&phi).unwrap();
        let rhs = y.contract(&x.contract(&phi).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
