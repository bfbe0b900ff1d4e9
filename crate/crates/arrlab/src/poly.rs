//! Sparse multivariate polynomials with exact coefficients, plus monomial
//! enumeration and evaluation helpers.

use std::collections::BTreeMap;

use crate::scalar::{Field, Scalar};

/// Exponent vectors of total degree `degree` in `nvars` variables, in
/// descending lexicographic order (x_0^degree first).
pub fn monomials(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, degree: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=degree).rev() {
            prefix.push(e);
            rec(nvars, degree - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(nvars, degree, &mut Vec::new(), &mut out);
    out
}

/// Binomial coefficient as u64 (saturating is not needed at desk scale).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Powers x_i^e for e = 0..=max_degree of each coordinate of a point.
pub struct PowerTable {
    powers: Vec<Vec<Scalar>>,
}

impl PowerTable {
    pub fn new(field: &Field, point: &[Scalar], max_degree: u32) -> Self {
        let powers = point
            .iter()
            .map(|x| {
                let mut v = Vec::with_capacity(max_degree as usize + 1);
                v.push(field.one());
                for e in 1..=max_degree as usize {
                    let next = field.mul(&v[e - 1], x);
                    v.push(next);
                }
                v
            })
            .collect();
        PowerTable { powers }
    }

    pub fn monomial(&self, field: &Field, exps: &[u32]) -> Scalar {
        let mut acc: Option<Scalar> = None;
        for (i, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let p = &self.powers[i][e as usize];
            acc = Some(match acc {
                None => p.clone(),
                Some(a) => field.mul(&a, p),
            });
        }
        acc.unwrap_or_else(|| field.one())
    }
}

/// Polynomial as a map from exponent vectors to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, nvars: usize, c: Scalar) -> Self {
        let mut p = Poly::zero(nvars);
        if !field.is_zero(&c) {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(field: &Field, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(e, field.one());
        p
    }

    /// Linear form Σ c_i x_i.
    pub fn linear(field: &Field, coeffs: &[Scalar]) -> Self {
        let n = coeffs.len();
        let mut p = Poly::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            if !field.is_zero(c) {
                let mut e = vec![0; n];
                e[i] = 1;
                p.terms.insert(e, c.clone());
            }
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, field: &Field, exps: Vec<u32>, c: &Scalar) {
        if field.is_zero(c) {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                let s = field.add(v, c);
                if field.is_zero(&s) {
                    self.terms.remove(&exps);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(exps, c.clone());
            }
        }
    }

    pub fn add(&self, field: &Field, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(field, e.clone(), c);
        }
        out
    }

    pub fn sub(&self, field: &Field, other: &Poly) -> Poly {
        self.add(field, &other.scale(field, &field.from_i64(-1)))
    }

    pub fn scale(&self, field: &Field, c: &Scalar) -> Poly {
        if field.is_zero(c) {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), field.mul(v, c))).collect(),
        }
    }

    pub fn mul(&self, field: &Field, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(field, e, &field.mul(c1, c2));
            }
        }
        out
    }

    pub fn pow(&self, field: &Field, e: u32) -> Poly {
        let mut acc = Poly::constant(field, self.nvars, field.one());
        for _ in 0..e {
            acc = acc.mul(field, self);
        }
        acc
    }

    /// Substitutes values for the variables listed in `vals` (index, value)
    /// and keeps the remaining variables in place.
    pub fn substitute(&self, field: &Field, vals: &[(usize, Scalar)]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = e.clone();
            for (i, v) in vals {
                let k = exps[*i];
                if k > 0 {
                    coeff = field.mul(&coeff, &field.pow(v, k as u64));
                    exps[*i] = 0;
                }
            }
            out.add_term(field, exps, &coeff);
        }
        out
    }

    /// Replaces each variable x_i with the polynomial `images[i]`.
    pub fn compose(&self, field: &Field, images: &[Poly]) -> Poly {
        let nv = images.first().map_or(0, |p| p.nvars);
        let mut out = Poly::zero(nv);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(field, nv, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(field, &images[i].pow(field, k));
                }
            }
            out = out.add(field, &t);
        }
        out
    }

    /// Evaluates at a full point.
    pub fn eval(&self, field: &Field, point: &[Scalar]) -> Scalar {
        let mut acc = field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = field.mul(&t, &field.pow(&point[i], k as u64));
                }
            }
            acc = field.add(&acc, &t);
        }
        acc
    }

    /// Total degree of every term, if homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts_match_binomials() {
        for n in 1..5 {
            for d in 0..6 {
                assert_eq!(
                    monomials(n, d).len() as u64,
                    binomial(n as u64 + d as u64 - 1, d as u64)
                );
            }
        }
        assert_eq!(monomials(3, 1), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(2, 5), 0);
        assert_eq!(binomial(20, 10), 184756);
    }

    #[test]
    fn polynomial_identities() {
        let f = Field::rationals();
        let x = Poly::var(&f, 2, 0);
        let y = Poly::var(&f, 2, 1);
        let s = x.add(&f, &y);
        let sq = s.mul(&f, &s);
        let expect = x
            .mul(&f, &x)
            .add(&f, &x.mul(&f, &y).scale(&f, &f.from_i64(2)))
            .add(&f, &y.mul(&f, &y));
        assert_eq!(sq, expect);
        assert!(sq.sub(&f, &expect).is_zero());
        assert_eq!(sq.eval(&f, &[f.from_i64(2), f.from_i64(3)]), f.from_i64(25));
        assert_eq!(sq.homogeneous_degree(), Some(2));
    }
}
