//! Exact dense linear algebra over a [`Field`]: row reduction, rank,
//! kernels and an incrementally grown echelon basis.

use crate::scalar::{Field, Scalar};

/// Reduced row echelon form. `rows[i]` has a 1 in column `pivots[i]` and
/// zeros in every other pivot column.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

/// Row operation `target -= factor * source` restricted to the support of
/// `source`.
fn axpy(field: &Field, target: &mut [Scalar], factor: &Scalar, source: &[Scalar], support: &[usize]) {
    for &c in support {
        let t = field.mul(factor, &source[c]);
        target[c] = field.sub(&target[c], &t);
    }
}

fn support(field: &Field, row: &[Scalar], from: usize) -> Vec<usize> {
    (from..row.len()).filter(|&c| !field.is_zero(&row[c])).collect()
}

/// Reduced row echelon form of `rows` (each of length `ncols`).
pub fn rref(field: &Field, mut rows: Vec<Vec<Scalar>>, ncols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = field.inv(&rows[r][c]).expect("nonzero pivot");
        let sup = support(field, &rows[r], c);
        for &j in &sup {
            rows[r][j] = field.mul(&rows[r][j], &inv);
        }
        let (head, tail) = rows.split_at_mut(r);
        let (piv, rest) = tail.split_first_mut().expect("pivot row");
        for other in head.iter_mut().chain(rest.iter_mut()) {
            if field.is_zero(&other[c]) {
                continue;
            }
            let f = other[c].clone();
            axpy(field, other, &f, piv, &sup);
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    Echelon { rows, pivots, ncols }
}

/// Rank. Characteristic zero goes through certified modular reduction,
/// finite fields through forward elimination.
pub fn rank(field: &Field, mut rows: Vec<Vec<Scalar>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    if field.characteristic() == 0 {
        return crate::modular::rank_char0(field, &rows, ncols);
    }
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = field.inv(&rows[r][c]).expect("nonzero pivot");
        let sup = support(field, &rows[r], c);
        let (head, tail) = rows.split_at_mut(r + 1);
        let piv = &head[r];
        for other in tail.iter_mut() {
            if field.is_zero(&other[c]) {
                continue;
            }
            let f = field.mul(&other[c], &inv);
            axpy(field, other, &f, piv, &sup);
        }
        r += 1;
    }
    r
}

/// Σ a_i b_i.
pub fn dot(field: &Field, a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = field.zero();
    for (x, y) in a.iter().zip(b) {
        if field.is_zero(x) || field.is_zero(y) {
            continue;
        }
        acc = field.add(&acc, &field.mul(x, y));
    }
    acc
}

/// Determinant of a square matrix by elimination.
pub fn det(field: &Field, mut rows: Vec<Vec<Scalar>>) -> Scalar {
    let n = rows.len();
    let mut acc = field.one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !field.is_zero(&rows[i][c])) else {
            return field.zero();
        };
        if pr != c {
            rows.swap(pr, c);
            acc = field.neg(&acc);
        }
        acc = field.mul(&acc, &rows[c][c]);
        let inv = field.inv(&rows[c][c]).expect("nonzero pivot");
        let sup = support(field, &rows[c], c);
        let (head, tail) = rows.split_at_mut(c + 1);
        let piv = &head[c];
        for other in tail.iter_mut() {
            if field.is_zero(&other[c]) {
                continue;
            }
            let f = field.mul(&other[c], &inv);
            axpy(field, other, &f, piv, &sup);
        }
    }
    acc
}

/// Basis of the right kernel {x : A x = 0} of the matrix with the given
/// rows and `ncols` columns.
pub fn kernel(field: &Field, rows: Vec<Vec<Scalar>>, ncols: usize) -> Vec<Vec<Scalar>> {
    let ech = rref(field, rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![field.zero(); ncols];
        v[free] = field.one();
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            v[p] = field.neg(&row[free]);
        }
        basis.push(v);
    }
    basis
}

/// Echelon basis grown one vector at a time.
#[derive(Clone, Debug)]
pub struct IncrementalSpan {
    field: Field,
    ncols: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl IncrementalSpan {
    pub fn new(field: &Field, ncols: usize) -> Self {
        IncrementalSpan {
            field: field.clone(),
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Remainder of `v` after reduction against the current basis.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let f = &self.field;
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if f.is_zero(&v[p]) {
                continue;
            }
            let c = v[p].clone();
            let sup = support(f, row, p);
            axpy(f, &mut v, &c, row, &sup);
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let r = self.reduce(v);
        r.iter().all(|x| self.field.is_zero(x))
    }

    /// Adds `v`; returns true when it enlarged the span.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let f = self.field.clone();
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&r[p]).expect("nonzero");
        for x in r.iter_mut().skip(p) {
            *x = f.mul(x, &inv);
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }
}
