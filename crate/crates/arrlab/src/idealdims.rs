//! Ideals of points: Hilbert functions, regularity, generic codimension-2
//! subspaces Q and the dimensions h(d) = dim[I(Z) ∩ I(Q)^{d−1}]_d, from
//! which the splitting type is read off.
//!
//! Powers of I(Q) are handled in coordinates adapted to Q: with
//! y_0 = L_0, y_1 = L_1 and n−1 coordinate forms completing a basis,
//! [I(Q)^m]_d is spanned by the monomials whose (y_0, y_1)-degree is at
//! least m. No derivatives are involved, so the same code is valid in every
//! characteristic.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{ArrError, Result};
use crate::geometry::{Configuration, PointRef};
use crate::linalg::{dot, kernel, rank, rref, IncrementalSpan};
use crate::poly::{binomial, monomials, Poly, PowerTable};
use crate::scalar::{Embedding, Field, Scalar};

/// Coordinates of Q's defining forms are drawn from [-BOX, BOX] in
/// characteristic zero.
pub const Q_BOX: i64 = 1_000_000;

/// Re-draw budget for [`generic_q`].
pub const MAX_Q_DRAWS: u32 = 64;

/// Default Q seeds.
pub const DEFAULT_SEEDS: [u64; 3] = [42, 43, 44];

/// Two independent linear forms cutting out a codimension-2 subspace Q in
/// general position with respect to a configuration.
#[derive(Clone, Debug)]
pub struct GenericCodim2 {
    pub l0: Vec<Scalar>,
    pub l1: Vec<Scalar>,
    pub seed: u64,
    /// Number of draws until all predicates held.
    pub draws: u32,
    embedding: Embedding,
}

impl GenericCodim2 {
    /// Field the forms live in (an extension of the configuration's field
    /// in positive characteristic).
    pub fn field(&self) -> &Field {
        &self.embedding.target
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn ambient_dim(&self) -> usize {
        self.l0.len() - 1
    }

    /// Basis of the linear space underlying Q (n−1 vectors).
    pub fn subspace_basis(&self) -> Vec<Vec<Scalar>> {
        let n1 = self.l0.len();
        kernel(self.field(), vec![self.l0.clone(), self.l1.clone()], n1)
    }

    /// Rows y_0 = L_0, y_1 = L_1, y_k = x_{c_k}: a basis of linear forms.
    pub fn coordinate_forms(&self) -> Vec<Vec<Scalar>> {
        let f = self.field();
        let n1 = self.l0.len();
        let mut span = IncrementalSpan::new(f, n1);
        span.insert(&self.l0);
        span.insert(&self.l1);
        let mut forms = vec![self.l0.clone(), self.l1.clone()];
        for j in 0..n1 {
            let mut e = vec![f.zero(); n1];
            e[j] = f.one();
            if span.insert(&e) {
                forms.push(e);
            }
        }
        forms
    }

    pub fn format(&self) -> (Vec<String>, Vec<String>) {
        let f = self.field();
        (
            self.l0.iter().map(|c| f.format(c)).collect(),
            self.l1.iter().map(|c| f.format(c)).collect(),
        )
    }
}

fn embedded_points(cfg: &Configuration, emb: &Embedding) -> Vec<Vec<Scalar>> {
    cfg.points()
        .iter()
        .map(|p| p.coords.iter().map(|c| emb.apply(c)).collect())
        .collect()
}

fn q_predicate(f: &Field, l0: &[Scalar], l1: &[Scalar], pts: &[Vec<Scalar>]) -> Option<&'static str> {
    if rank(f, vec![l0.to_vec(), l1.to_vec()]) < 2 {
        return Some("L0 and L1 are dependent");
    }
    let v0: Vec<Scalar> = pts.iter().map(|p| dot(f, l0, p)).collect();
    let v1: Vec<Scalar> = pts.iter().map(|p| dot(f, l1, p)).collect();
    if (0..pts.len()).any(|i| f.is_zero(&v0[i]) && f.is_zero(&v1[i])) {
        return Some("Q contains a point of Z");
    }
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let m = f.sub(&f.mul(&v0[i], &v1[j]), &f.mul(&v0[j], &v1[i]));
            if f.is_zero(&m) {
                return Some("Q meets a line spanned by two points of Z");
            }
        }
    }
    None
}

/// Deterministic generic codimension-2 subspace for `cfg`.
pub fn generic_q(cfg: &Configuration, seed: u64) -> Result<GenericCodim2> {
    let n = cfg.ambient_dim();
    if n < 2 {
        return Err(ArrError::usage("a codimension-2 subspace needs n ≥ 2"));
    }
    let embedding = cfg.field().generic_extension()?;
    let f = embedding.target.clone();
    let pts = embedded_points(cfg, &embedding);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = "";
    for draw in 1..=MAX_Q_DRAWS {
        let l0: Vec<Scalar> = (0..=n).map(|_| f.random(&mut rng, Q_BOX)).collect();
        let l1: Vec<Scalar> = (0..=n).map(|_| f.random(&mut rng, Q_BOX)).collect();
        match q_predicate(&f, &l0, &l1, &pts) {
            None => {
                return Ok(GenericCodim2 {
                    l0,
                    l1,
                    seed,
                    draws: draw,
                    embedding,
                })
            }
            Some(why) => last = why,
        }
    }
    Err(ArrError::Environment(format!(
        "no generic Q after {MAX_Q_DRAWS} draws with seed {seed}: {last}"
    )))
}

/// Degree-d monomials in `nvars` variables whose degree in the first `c`
/// variables is at least `m`: a basis of [I(Λ)^m]_d for the coordinate
/// subspace Λ = V(y_0, …, y_{c−1}).
pub fn fat_monomials(nvars: usize, c: usize, m: u32, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for s in m..=d {
        if c == nvars && s != d {
            continue;
        }
        let heads = monomials(c, s);
        let tails = monomials(nvars - c, d - s);
        for h in &heads {
            for t in &tails {
                let mut e = h.clone();
                e.extend_from_slice(t);
                out.push(e);
            }
        }
    }
    out
}

fn eval_matrix(field: &Field, ys: &[Vec<Scalar>], monos: &[Vec<u32>], d: u32) -> Vec<Vec<Scalar>> {
    ys.iter()
        .map(|y| {
            let t = PowerTable::new(field, y, d);
            monos.iter().map(|e| t.monomial(field, e)).collect()
        })
        .collect()
}

/// dim of the forms in [I(Λ)^m]_d vanishing at the given points, with
/// points and Λ = V(y_0..y_{c−1}) written in the same coordinates y.
pub fn fat_subspace_dim(field: &Field, ys: &[Vec<Scalar>], c: usize, m: u32, d: u32) -> usize {
    let nvars = match ys.first() {
        Some(y) => y.len(),
        None => return 0,
    };
    let monos = fat_monomials(nvars, c, m, d);
    monos.len() - rank(field, eval_matrix(field, ys, &monos, d))
}

/// A configuration seen from a fixed Q: point coordinates in the adapted
/// basis y, ready for repeated degree queries.
pub struct IqggFrame {
    field: Field,
    forms: Vec<Vec<Scalar>>,
    ys: Vec<Vec<Scalar>>,
    n: usize,
}

impl IqggFrame {
    pub fn new(cfg: &Configuration, q: &GenericCodim2) -> Result<Self> {
        if q.embedding().source != *cfg.field() || q.ambient_dim() != cfg.ambient_dim() {
            return Err(ArrError::usage("Q was drawn for a different field or dimension"));
        }
        let field = q.field().clone();
        let forms = q.coordinate_forms();
        let ys = embedded_points(cfg, q.embedding())
            .iter()
            .map(|p| forms.iter().map(|l| dot(&field, l, p)).collect())
            .collect();
        Ok(IqggFrame {
            field,
            forms,
            ys,
            n: cfg.ambient_dim(),
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    fn check(d: u32) -> Result<()> {
        if d < 1 {
            return Err(ArrError::usage("degree d must be at least 1"));
        }
        Ok(())
    }

    pub fn monomials(&self, d: u32) -> Vec<Vec<u32>> {
        fat_monomials(self.n + 1, 2, d - 1, d)
    }

    pub fn dim(&self, d: u32) -> Result<usize> {
        Self::check(d)?;
        if self.ys.is_empty() {
            return Ok(self.monomials(d).len());
        }
        Ok(fat_subspace_dim(&self.field, &self.ys, 2, d - 1, d))
    }

    /// Kernel vectors in the monomial basis of [`Self::monomials`].
    pub fn kernel(&self, d: u32) -> Result<Vec<Vec<Scalar>>> {
        Self::check(d)?;
        let monos = self.monomials(d);
        if self.ys.is_empty() {
            let k = monos.len();
            return Ok((0..k)
                .map(|i| {
                    let mut v = vec![self.field.zero(); k];
                    v[i] = self.field.one();
                    v
                })
                .collect());
        }
        Ok(kernel(
            &self.field,
            eval_matrix(&self.field, &self.ys, &monos, d),
            monos.len(),
        ))
    }

    /// Membership of a degree-d form in X in [I(Z) ∩ I(Q)^{d−1}]_d, by
    /// rewriting it in the coordinates y.
    pub fn contains(&self, p: &Poly, d: u32) -> Result<bool> {
        Self::check(d)?;
        let f = &self.field;
        let n1 = self.n + 1;
        let mut aug: Vec<Vec<Scalar>> = self
            .forms
            .iter()
            .enumerate()
            .map(|(k, row)| {
                let mut r = row.clone();
                r.extend((0..n1).map(|j| if j == k { f.one() } else { f.zero() }));
                r
            })
            .collect();
        // Columns of the inverse: X_i = Σ_k inv[i][k] y_k.
        let ech = rref(f, std::mem::take(&mut aug), 2 * n1);
        if ech.pivots.len() != n1 || ech.pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(ArrError::invariant("coordinate forms of Q are dependent"));
        }
        let images: Vec<Poly> = ech.rows.iter().map(|r| Poly::linear(f, &r[n1..])).collect();
        let g = p.compose(f, &images);
        if g.terms.iter().any(|(e, c)| !f.is_zero(c) && e[0] + e[1] + 1 < d) {
            return Ok(false);
        }
        Ok(self.ys.iter().all(|y| f.is_zero(&g.eval(f, y))))
    }

    /// Basis of [I(Z) ∩ I(Q)^{d−1}]_d as forms in the original variables.
    pub fn basis(&self, d: u32) -> Result<Vec<Poly>> {
        let monos = self.monomials(d);
        let f = &self.field;
        let images: Vec<Poly> = self.forms.iter().map(|l| Poly::linear(f, l)).collect();
        let mono_polys: Vec<Poly> = monos
            .iter()
            .map(|e| {
                let mut p = Poly::zero(self.n + 1);
                p.add_term(f, e.clone(), &f.one());
                p.compose(f, &images)
            })
            .collect();
        Ok(self
            .kernel(d)?
            .iter()
            .map(|v| {
                let mut acc = Poly::zero(self.n + 1);
                for (c, p) in v.iter().zip(&mono_polys) {
                    if !f.is_zero(c) {
                        acc = acc.add(f, &p.scale(f, c));
                    }
                }
                acc
            })
            .collect())
    }

    /// Minimal generator count per degree of ⊕_d [I(Z) ∩ I(Q)^{d−1}]_d as a
    /// module over 𝕂[L_0, L_1], for degrees 1..=d_max.
    pub fn generator_degrees(&self, d_max: u32) -> Result<BTreeMap<u32, usize>> {
        let mut out = BTreeMap::new();
        let mut prev: Vec<Vec<Scalar>> = Vec::new();
        let mut prev_monos: Vec<Vec<u32>> = Vec::new();
        for d in 1..=d_max {
            let monos = self.monomials(d);
            let index: BTreeMap<&Vec<u32>, usize> = monos.iter().enumerate().map(|(i, e)| (e, i)).collect();
            let ker = self.kernel(d)?;
            let mut span = IncrementalSpan::new(&self.field, monos.len());
            for v in &prev {
                for var in 0..2 {
                    let mut w = vec![self.field.zero(); monos.len()];
                    for (c, e) in v.iter().zip(&prev_monos) {
                        if self.field.is_zero(c) {
                            continue;
                        }
                        let mut e2 = e.clone();
                        e2[var] += 1;
                        w[index[&e2]] = c.clone();
                    }
                    span.insert(&w);
                }
            }
            let new = ker.len() - span.dim();
            if new > 0 {
                out.insert(d, new);
            }
            prev = ker;
            prev_monos = monos;
        }
        Ok(out)
    }
}

/// h(d) = dim[I(Z) ∩ I(Q)^{d−1}]_d.
pub fn iqgg_dim(cfg: &Configuration, d: u32, q: &GenericCodim2) -> Result<usize> {
    IqggFrame::new(cfg, q)?.dim(d)
}

/// h_Z(d) = dim[R/I(Z)]_d, the rank of the evaluation matrix on degree-d
/// monomials. Columns are added until the rank reaches |Z|.
pub fn hilbert(cfg: &Configuration, d: u32) -> usize {
    if cfg.is_empty() {
        return 0;
    }
    let f = cfg.field();
    let tables: Vec<PowerTable> = cfg.points().iter().map(|p| PowerTable::new(f, &p.coords, d)).collect();
    let mut span = IncrementalSpan::new(f, cfg.len());
    for e in monomials(cfg.ambient_dim() + 1, d) {
        let col: Vec<Scalar> = tables.iter().map(|t| t.monomial(f, &e)).collect();
        span.insert(&col);
        if span.dim() == cfg.len() {
            break;
        }
    }
    span.dim()
}

/// h_Z(0..=d_max); once h_Z reaches |Z| it stays there.
pub fn hilbert_table(cfg: &Configuration, d_max: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(d_max as usize + 1);
    for d in 0..=d_max {
        let v = match out.last() {
            Some(&last) if last == cfg.len() => last,
            _ => hilbert(cfg, d),
        };
        out.push(v);
    }
    out
}

/// 1 + the first degree r with h_Z(r) = |Z|.
pub fn regularity(cfg: &Configuration) -> Result<u32> {
    if cfg.is_empty() {
        return Err(ArrError::usage("regularity needs at least one point"));
    }
    let mut r = 0;
    while hilbert(cfg, r) < cfg.len() {
        r += 1;
    }
    Ok(r + 1)
}

/// Number of conditions a fat linear subspace of dimension `q_dim` and
/// multiplicity `m` imposes on forms of degree `d` in ℙⁿ.
pub fn expected_conditions(n: usize, d: u32, m: u32, q_dim: usize) -> Result<u64> {
    if n < 1 || q_dim > n - 1 || m < 1 {
        return Err(ArrError::usage("need 0 ≤ q_dim ≤ n−1 and m ≥ 1"));
    }
    let c = (n - q_dim) as u64;
    let qd = q_dim as u64;
    let mut total = 0u64;
    for i in 0..m as u64 {
        if i > d as u64 {
            break;
        }
        total += binomial(qd + d as u64 - i, qd) * binomial(c - 1 + i, c - 1);
    }
    Ok(total)
}

/// dim[I(Z) ∩ I(P)^d]_d: degree-d cones with vertex P through Z.
pub fn cone_dim(cfg: &Configuration, p: &[Scalar], d: u32) -> Result<usize> {
    let f = cfg.field();
    let n1 = cfg.ambient_dim() + 1;
    if p.len() != n1 {
        return Err(ArrError::usage("point has the wrong number of coordinates"));
    }
    let Some(j) = p.iter().position(|c| !f.is_zero(c)) else {
        return Err(ArrError::usage("the zero vector is not a point"));
    };
    // Forms vanishing at P, then x_j to complete a basis.
    let mut forms = kernel(f, vec![p.to_vec()], n1);
    let mut e = vec![f.zero(); n1];
    e[j] = f.one();
    forms.push(e);
    let ys: Vec<Vec<Scalar>> = cfg
        .points()
        .iter()
        .map(|q| forms.iter().map(|l| dot(f, l, &q.coords)).collect())
        .collect();
    if ys.is_empty() {
        return Ok(fat_monomials(n1, n1 - 1, d, d).len());
    }
    Ok(fat_subspace_dim(f, &ys, n1 - 1, d, d))
}

/// min{d : [I(Z) ∩ I(P)^d]_d ≠ 0} for planar Z.
pub fn lp_algebraic(cfg: &Configuration, p: &PointRef) -> Result<u32> {
    if cfg.ambient_dim() != 2 {
        return Err(ArrError::usage("lp_algebraic is defined for planar configurations"));
    }
    if cfg.len() < 2 {
        return Err(ArrError::usage("need at least two points"));
    }
    let coords = match p {
        PointRef::Index(i) => {
            if *i >= cfg.len() {
                return Err(ArrError::usage(format!("index {i} out of range")));
            }
            cfg.point(*i).coords.clone()
        }
        PointRef::External(q) => q.coords.clone(),
    };
    for d in 1..=cfg.len() as u32 + 1 {
        if cone_dim(cfg, &coords, d)? > 0 {
            return Ok(d);
        }
    }
    Err(ArrError::invariant("no cone through Z up to degree |Z| + 1"))
}

/// Nondecreasing tuple (a_1, …, a_n).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SplittingType(pub Vec<u32>);

impl SplittingType {
    pub fn first(&self) -> u32 {
        self.0[0]
    }

    pub fn last(&self) -> u32 {
        *self.0.last().expect("nonempty")
    }

    /// Σ max{0, d − a_i}.
    pub fn predicted_h(&self, d: u32) -> usize {
        self.0.iter().map(|&a| d.saturating_sub(a) as usize).sum()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&a| a as u64).sum()
    }
}

impl std::fmt::Display for SplittingType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Splitting type with the data it was read from.
#[derive(Clone, Debug, Serialize)]
pub struct SplittingReport {
    pub splitting: SplittingType,
    /// h(1), h(2), … up to the last degree needed.
    pub h: Vec<usize>,
    pub seeds: Vec<u64>,
    pub warnings: Vec<String>,
}

/// Per-degree minimum of h over several Q, drawing two more Q when the
/// samples disagree.
pub struct GenericH {
    frames: Vec<IqggFrame>,
    pub seeds: Vec<u64>,
    pub warnings: Vec<String>,
    extended: bool,
    cache: BTreeMap<u32, usize>,
}

impl GenericH {
    pub fn new(cfg: &Configuration, seeds: &[u64]) -> Result<Self> {
        if seeds.is_empty() {
            return Err(ArrError::usage("at least one Q seed is required"));
        }
        let mut frames = Vec::new();
        for &s in seeds {
            frames.push(IqggFrame::new(cfg, &generic_q(cfg, s)?)?);
        }
        Ok(GenericH {
            frames,
            seeds: seeds.to_vec(),
            warnings: Vec::new(),
            extended: false,
            cache: BTreeMap::new(),
        })
    }

    /// The generic value: minimum over samples. Upper semicontinuity means
    /// special Q can only raise h.
    pub fn get(&mut self, cfg: &Configuration, d: u32) -> Result<usize> {
        if let Some(&v) = self.cache.get(&d) {
            return Ok(v);
        }
        let vals = self.frames.iter().map(|fr| fr.dim(d)).collect::<Result<Vec<_>>>()?;
        let min = *vals.iter().min().expect("nonempty");
        if vals.iter().any(|&v| v != min) && !self.extended {
            self.extended = true;
            let base = *self.seeds.iter().max().expect("nonempty");
            for s in [base + 1, base + 2] {
                self.frames.push(IqggFrame::new(cfg, &generic_q(cfg, s)?)?);
                self.seeds.push(s);
            }
            self.warnings.push(format!(
                "Q samples disagree at d = {d} ({vals:?}); drew seeds {} and {}",
                base + 1,
                base + 2
            ));
            // Earlier degrees must use the enlarged sample too.
            self.cache.clear();
            return self.get(cfg, d);
        }
        self.cache.insert(d, min);
        Ok(min)
    }
}

/// Splitting type from second differences of h, with h(0) = h(−1) = 0.
pub fn splitting_analysis(cfg: &Configuration, seeds: &[u64]) -> Result<SplittingReport> {
    if !cfg.is_spanning() {
        return Err(ArrError::usage(
            "splitting type needs a spanning configuration; restrict to the span first",
        ));
    }
    splitting_with(cfg, &mut GenericH::new(cfg, seeds)?)
}

/// As [`splitting_analysis`], sharing the samples (and cache) of `gh`.
pub fn splitting_with(cfg: &Configuration, gh: &mut GenericH) -> Result<SplittingReport> {
    if !cfg.is_spanning() {
        return Err(ArrError::usage(
            "splitting type needs a spanning configuration; restrict to the span first",
        ));
    }
    let n = cfg.ambient_dim();
    let mut hs: Vec<i64> = Vec::new();
    let mut a: Vec<u32> = Vec::new();
    let mut d = 1u32;
    while a.len() < n {
        if d as usize > cfg.len() {
            return Err(ArrError::invariant(format!(
                "recovered only {} of {n} splitting entries by d = {} (seeds {:?})",
                a.len(),
                cfg.len(),
                gh.seeds.clone()
            )));
        }
        // Re-read every degree: an extension of the sample resets the minimum.
        hs = (1..=d)
            .map(|e| gh.get(cfg, e).map(|v| v as i64))
            .collect::<Result<_>>()?;
        a.clear();
        let h = |e: i64| if e < 1 { 0 } else { hs[(e - 1) as usize] };
        for t in 0..d as i64 {
            let count = h(t + 1) - 2 * h(t) + h(t - 1);
            if count < 0 {
                return Err(ArrError::invariant(format!(
                    "negative second difference of h at t = {t} (seeds {:?})",
                    gh.seeds.clone()
                )));
            }
            for _ in 0..count {
                a.push(t as u32);
            }
        }
        d += 1;
    }
    if a.len() > n {
        return Err(ArrError::invariant(format!(
            "more than {n} splitting entries recovered (seeds {:?})",
            gh.seeds.clone()
        )));
    }
    let st = SplittingType(a);
    if st.sum() != cfg.len() as u64 - 1 {
        return Err(ArrError::invariant(format!(
            "splitting type {st} sums to {} but |Z| − 1 = {} (seeds {:?}); re-seed",
            st.sum(),
            cfg.len() - 1,
            gh.seeds.clone()
        )));
    }
    if st.first() < 1 {
        return Err(ArrError::invariant(format!(
            "spanning Z with a_1 = 0 (seeds {:?})",
            gh.seeds.clone()
        )));
    }
    Ok(SplittingReport {
        splitting: st,
        h: hs.iter().map(|&v| v as usize).collect(),
        seeds: gh.seeds.clone(),
        warnings: gh.warnings.clone(),
    })
}

pub fn splitting_type(cfg: &Configuration, seeds: &[u64]) -> Result<SplittingType> {
    Ok(splitting_analysis(cfg, seeds)?.splitting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ProjectivePoint;

    fn q() -> Field {
        Field::rationals()
    }

    fn generic5() -> Configuration {
        Configuration::from_ints(
            &q(),
            2,
            &[
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![1, 1, 1],
                vec![1, 2, 5],
            ],
        )
        .unwrap()
    }

    fn example611() -> Configuration {
        Configuration::from_ints(&q(), 2, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]]).unwrap()
    }

    fn conic(k: i64) -> Configuration {
        let pts: Vec<Vec<i64>> = (0..k).map(|t| vec![t * t, t, 1]).collect();
        Configuration::from_ints(&q(), 2, &pts).unwrap()
    }

    #[test]
    fn hilbert_of_generic_points_is_min() {
        let z = generic5();
        assert_eq!(hilbert_table(&z, 3), vec![1, 3, 5, 5]);
        assert_eq!(hilbert(&conic(7), 2), 5);
    }

    #[test]
    fn regularity_examples() {
        let one = Configuration::from_ints(&q(), 2, &[vec![1, 2, 3]]).unwrap();
        assert_eq!(regularity(&one).unwrap(), 1);
        let four = example611();
        assert_eq!(regularity(&four).unwrap(), 3);
        for d in 1..=3 {
            assert_eq!(regularity(&conic(2 * d + 3)).unwrap(), d as u32 + 2);
        }
    }

    #[test]
    fn q_is_deterministic() {
        let z = generic5();
        let a = generic_q(&z, 7).unwrap();
        let b = generic_q(&z, 7).unwrap();
        assert_eq!(a.l0, b.l0);
        assert_eq!(a.l1, b.l1);
        assert_eq!(a.subspace_basis().len(), 1);
    }

    #[test]
    fn special_q_is_rejected() {
        let f = q();
        let z = generic5();
        let pts = embedded_points(&z, &f.embedding_into(&f).unwrap());
        let ints = |v: &[i64]| v.iter().map(|&x| f.from_i64(x)).collect::<Vec<_>>();
        // V(x1, x2) is the point (1:0:0) of Z.
        assert_eq!(
            q_predicate(&f, &ints(&[0, 1, 0]), &ints(&[0, 0, 1]), &pts),
            Some("Q contains a point of Z")
        );
        // V(x2, x0 - 2x1) = (2:1:0) lies on the line through (1:0:0), (0:1:0).
        assert_eq!(
            q_predicate(&f, &ints(&[0, 0, 1]), &ints(&[1, -2, 0]), &pts),
            Some("Q meets a line spanned by two points of Z")
        );
    }

    #[test]
    fn empty_configuration_gives_full_power() {
        let empty = Configuration::new(&q(), 2, vec![]).unwrap();
        let z = generic5();
        let qq = generic_q(&z, 1).unwrap();
        for d in 1..6 {
            assert_eq!(iqgg_dim(&empty, d, &qq).unwrap(), 2 * d as usize + 1);
        }
    }

    #[test]
    fn basis_forms_vanish_where_they_should() {
        let z = example611();
        let qq = generic_q(&z, 3).unwrap();
        let frame = IqggFrame::new(&z, &qq).unwrap();
        let b = frame.basis(2).unwrap();
        assert_eq!(b.len(), 1);
        let f = qq.field();
        for p in z.points() {
            assert!(f.is_zero(&b[0].eval(f, &p.coords)));
        }
        let qp = &qq.subspace_basis()[0];
        assert!(f.is_zero(&b[0].eval(f, qp)));
    }

    #[test]
    fn splitting_of_small_configurations() {
        assert_eq!(splitting_type(&generic5(), &DEFAULT_SEEDS).unwrap().0, vec![2, 2]);
        assert_eq!(splitting_type(&example611(), &DEFAULT_SEEDS).unwrap().0, vec![1, 2]);
        let coord = Configuration::from_ints(&q(), 2, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(splitting_type(&coord, &DEFAULT_SEEDS).unwrap().0, vec![1, 1]);
    }

    #[test]
    fn non_spanning_input_is_refused() {
        let line = Configuration::from_ints(&q(), 2, &[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]]).unwrap();
        assert!(matches!(splitting_type(&line, &[1]), Err(ArrError::Usage(_))));
    }

    #[test]
    fn iqgg_generators_of_four_points() {
        let z = example611();
        let frame = IqggFrame::new(&z, &generic_q(&z, 42).unwrap()).unwrap();
        let g = frame.generator_degrees(5).unwrap();
        assert_eq!(g.into_iter().collect::<Vec<_>>(), vec![(2, 1), (3, 1)]);
    }

    #[test]
    fn expected_conditions_examples() {
        for n in 2..5usize {
            for d in 2..7u32 {
                let total = binomial(n as u64 + d as u64, n as u64);
                let e = expected_conditions(n, d, d - 1, n - 2).unwrap();
                assert_eq!(total - e, n as u64 * d as u64 + 1);
                // Layers i = 0..d exhaust all forms.
                assert_eq!(expected_conditions(n, d, d + 1, n - 2).unwrap(), total);
            }
            assert_eq!(
                expected_conditions(n, 4, 1, n - 1).unwrap(),
                binomial(n as u64 + 3, n as u64 - 1)
            );
        }
        assert!(expected_conditions(2, 3, 0, 0).is_err());
    }

    #[test]
    fn expected_conditions_match_monomial_counts() {
        // Independent count: monomials of (y_0..y_{c−1})-degree ≥ m span [I(Λ)^m]_d.
        for n in 1..5usize {
            for q_dim in 0..n {
                for d in 0..6u32 {
                    for m in 1..5u32 {
                        let c = n - q_dim;
                        let all = monomials(n + 1, d).len() as u64;
                        let fat = monomials(n + 1, d)
                            .iter()
                            .filter(|e| e[..c].iter().sum::<u32>() >= m)
                            .count() as u64;
                        assert_eq!(
                            expected_conditions(n, d, m, q_dim).unwrap(),
                            all - fat,
                            "{n} {q_dim} {d} {m}"
                        );
                        assert_eq!(fat_monomials(n + 1, c, m, d).len() as u64, fat);
                    }
                }
            }
        }
    }

    #[test]
    fn cones_count_lines_through_a_point() {
        let z = generic5();
        assert_eq!(lp_algebraic(&z, &PointRef::Index(0)).unwrap(), 4);
        let two = Configuration::from_ints(&q(), 2, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert_eq!(lp_algebraic(&two, &PointRef::Index(1)).unwrap(), 1);
        let ext = ProjectivePoint::from_ints(&q(), &[1, 1, 0]).unwrap();
        // (1:1:0) joins (1:0:0), (0:1:0) by one line and (0:0:1), (1:1:1) by another.
        assert_eq!(lp_algebraic(&z, &PointRef::External(ext.clone())).unwrap(), 3);
        assert_eq!(crate::geometry::l_p_count(&z, &PointRef::External(ext)).unwrap(), 3);
    }
}
