//! Dense linear algebra over the rational-function field.
//!
//! Elimination pivots are chosen among entries that are not identically
//! zero, preferring constants. Non-constant pivots are recorded: they are
//! the functions whose zero sets are where a computed frame degenerates.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalars::ScalarField;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<ScalarField>,
}

/// Reduced row echelon form plus elimination bookkeeping.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivot_cols: Vec<usize>,
    /// Non-constant pivots used during elimination.
    pub pivot_functions: Vec<ScalarField>,
}

fn complexity(f: &ScalarField) -> (u32, usize) {
    if f.is_constant() {
        return (0, 0);
    }
    (
        f.numer().total_degree() + f.denom().total_degree() + 1,
        f.numer().num_terms() + f.denom().num_terms(),
    )
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![ScalarField::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = ScalarField::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ScalarField>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(0);
        assert!(rows.iter().all(|v| v.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<ScalarField>], nrows: usize) -> Self {
        let mut m = Matrix::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows, "column length");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<ScalarField> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<ScalarField> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn conj(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|f| f.conj()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|f| f.is_zero())
    }

    pub fn scale(&self, c: &ScalarField) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|f| f * c).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[ScalarField]) -> Vec<ScalarField> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = ScalarField::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivot_cols = Vec::new();
        let mut pivot_functions = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let best = (r..m.rows)
                .filter(|&i| !m[(i, c)].is_zero())
                .min_by_key(|&i| complexity(&m[(i, c)]));
            let Some(p) = best else { continue };
            m.swap_rows(r, p);
            let piv = m[(r, c)].clone();
            if !piv.is_constant() {
                pivot_functions.push(piv.clone());
            }
            let inv = piv.inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &m[(i, j)] - &(&factor * &m[(r, j)]);
                    m[(i, j)] = v;
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
        Rref {
            matrix: m,
            pivot_cols,
            pivot_functions,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivot_cols.len()
    }

    /// Basis of the right null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<ScalarField>> {
        kernel_from_rref(&self.rref(), self.cols)
    }

    /// Some solution of `self · x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[ScalarField]) -> Option<Vec<ScalarField>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let rr = aug.rref();
        if rr.pivot_cols.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![ScalarField::zero(); self.cols];
        for (r, &c) in rr.pivot_cols.iter().enumerate() {
            x[c] = rr.matrix[(r, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::SingularBasis);
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = ScalarField::one();
        }
        let rr = aug.rref();
        if rr.pivot_cols.len() < n || rr.pivot_cols[n - 1] != n - 1 {
            return Err(Error::SingularBasis);
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = rr.matrix[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> ScalarField {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = ScalarField::one();
        for c in 0..n {
            let best = (c..n)
                .filter(|&i| !m[(i, c)].is_zero())
                .min_by_key(|&i| complexity(&m[(i, c)]));
            let Some(p) = best else {
                return ScalarField::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = &det * &piv;
            let inv = piv.inv().expect("nonzero pivot");
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let factor = &m[(i, c)] * &inv;
                for j in c..n {
                    let v = &m[(i, j)] - &(&factor * &m[(c, j)]);
                    m[(i, j)] = v;
                }
            }
        }
        det
    }
}

/// Componentwise helpers for coordinate vectors.
pub mod vector {
    use crate::scalars::ScalarField;

    pub fn add(a: &[ScalarField], b: &[ScalarField]) -> Vec<ScalarField> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(a: &[ScalarField], b: &[ScalarField]) -> Vec<ScalarField> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn scale(f: &ScalarField, a: &[ScalarField]) -> Vec<ScalarField> {
        a.iter().map(|x| f * x).collect()
    }

    pub fn neg(a: &[ScalarField]) -> Vec<ScalarField> {
        a.iter().map(|x| -x).collect()
    }

    pub fn conj(a: &[ScalarField]) -> Vec<ScalarField> {
        a.iter().map(|x| x.conj()).collect()
    }

    pub fn is_zero(a: &[ScalarField]) -> bool {
        a.iter().all(|x| x.is_zero())
    }

    pub fn dot(a: &[ScalarField], b: &[ScalarField]) -> ScalarField {
        let mut acc = ScalarField::zero();
        for (x, y) in a.iter().zip(b) {
            if !x.is_zero() && !y.is_zero() {
                acc += x * y;
            }
        }
        acc
    }

    /// Directional derivative `Σ_μ x^μ ∂_μ f`.
    pub fn derive(x: &[ScalarField], f: &ScalarField) -> ScalarField {
        let mut acc = ScalarField::zero();
        if f.is_constant() {
            return acc;
        }
        for (mu, c) in x.iter().enumerate() {
            if !c.is_zero() {
                let d = f.partial(mu);
                if !d.is_zero() {
                    acc += c * &d;
                }
            }
        }
        acc
    }

    /// Lie bracket of vector fields given by their coordinate components.
    pub fn bracket(x: &[ScalarField], y: &[ScalarField]) -> Vec<ScalarField> {
        (0..x.len())
            .map(|mu| &derive(x, &y[mu]) - &derive(y, &x[mu]))
            .collect()
    }

    /// `e_k` in dimension `n`.
    pub fn unit(n: usize, k: usize) -> Vec<ScalarField> {
        let mut v = vec![ScalarField::zero(); n];
        v[k] = ScalarField::one();
        v
    }
}

pub(crate) fn kernel_from_rref(rr: &Rref, cols: usize) -> Vec<Vec<ScalarField>> {
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !rr.pivot_cols.contains(c)) {
        let mut v = vec![ScalarField::zero(); cols];
        v[free] = ScalarField::one();
        for (r, &pc) in rr.pivot_cols.iter().enumerate() {
            v[pc] = -&rr.matrix[(r, free)];
        }
        out.push(v);
    }
    out
}

impl Index<(usize, usize)> for Matrix {
    type Output = ScalarField;
    fn index(&self, (i, j): (usize, usize)) -> &ScalarField {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ScalarField {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> ScalarField {
        ScalarField::from_int(n)
    }

    fn x(k: usize) -> ScalarField {
        ScalarField::var(k)
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = Matrix::from_rows(vec![vec![x(0), s(1)], vec![&x(0) * &x(1), x(1)]]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).iter().all(|f| f.is_zero()));
    }

    #[test]
    fn inverse_and_det() {
        let m = Matrix::from_rows(vec![vec![s(1), x(0)], vec![x(1), s(2)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert_eq!(m.det(), s(2) - &x(0) * &x(1));
        let sing = Matrix::from_rows(vec![vec![x(0), x(1)], vec![&x(0) * &x(0), &x(0) * &x(1)]]);
        assert!(sing.det().is_zero());
        assert!(matches!(sing.inverse(), Err(Error::SingularBasis)));
    }

    #[test]
    fn solve_detects_inconsistency() {
        let m = Matrix::from_rows(vec![vec![s(1), s(1)], vec![s(2), s(2)]]);
        assert!(m.solve(&[s(1), s(3)]).is_none());
        let sol = m.solve(&[x(0), &s(2) * &x(0)]).unwrap();
        assert_eq!(m.apply(&sol), vec![x(0), &s(2) * &x(0)]);
    }

    #[test]
    fn records_nonconstant_pivots() {
        let m = Matrix::from_rows(vec![vec![x(0), s(0)], vec![s(0), s(3)]]);
        let rr = m.rref();
        assert_eq!(rr.pivot_functions, vec![x(0)]);
    }
}
