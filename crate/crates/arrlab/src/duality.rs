//! The bigraded module I^≫(Z) ⊆ 𝕂[X, A] dual to the derivation module of
//! the arrangement A_Z, its partial evaluations, and the freeness and
//! semistability tests built on it.
//!
//! Linear algebra runs in a fixed basis of [𝔪^≫]_d: the products
//! X_i·M^β with |β| = d−1, except those with i = 0 and β_0 ≥ 1. The maximal
//! minors M_0..M_n are algebraically independent, and the Euler relation
//! Σ X_i M_i = 0 is the only relation between the X_i and the M_j, so
//! X_0·M_0·M^γ is always rewritten as −Σ_{i≥1} X_i·M_i·M^γ. Independence of
//! the basis is certified at runtime by evaluation.
//!
//! Membership in I(Z)·𝕂[A] is tested per point P: after X := P the minors
//! sweep out P^⊥, so F lies in I(Z)·𝕂[A] iff Σ P_i f_i vanishes on P^⊥.
//! [`BiGradedForm`] gives the fully expanded polynomial, used for output
//! and for the direct substitution test.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ArrError, Result};
use crate::geometry::{spanned_lines, Configuration};
use crate::idealdims::{generic_q, splitting_analysis, GenericCodim2, IqggFrame, SplittingReport, SplittingType};
use crate::linalg::{det, kernel, rank, IncrementalSpan};
use crate::poly::{binomial, monomials, Poly};
use crate::scalar::{Field, Scalar};

/// Prime used to certify independence in characteristic zero.
const CERT_PRIME: u64 = 2_147_483_647;

/// Index set {(i, β)} of the basis of [𝔪^≫]_d.
#[derive(Clone, Debug)]
pub struct MinorBasis {
    pub n: usize,
    pub d: u32,
    pub elems: Vec<(usize, Vec<u32>)>,
    index: HashMap<(usize, Vec<u32>), usize>,
}

impl MinorBasis {
    pub fn new(n: usize, d: u32) -> Self {
        let mut elems = Vec::new();
        for i in 0..=n {
            for b in monomials(n + 1, d - 1) {
                if i == 0 && b[0] >= 1 {
                    continue;
                }
                elems.push((i, b));
            }
        }
        let index = elems.iter().cloned().enumerate().map(|(k, e)| (e, k)).collect();
        MinorBasis { n, d, elems, index }
    }

    /// (n+1)·C(n+d−1, n) − C(n+d−2, n).
    pub fn expected_len(n: usize, d: u32) -> u64 {
        let (n, d) = (n as u64, d as u64);
        (n + 1) * binomial(n + d - 1, n) - if d >= 2 { binomial(n + d - 2, n) } else { 0 }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn position(&self, i: usize, beta: &[u32]) -> Option<usize> {
        self.index.get(&(i, beta.to_vec())).copied()
    }

    /// Adds c·X_i·M^β to `v`, rewriting through the Euler relation.
    fn accumulate(&self, field: &Field, v: &mut [Scalar], i: usize, beta: &[u32], c: &Scalar) {
        if i == 0 && beta[0] >= 1 {
            let neg = field.neg(c);
            for i2 in 1..=self.n {
                let mut b = beta.to_vec();
                b[0] -= 1;
                b[i2] += 1;
                let k = self.index[&(i2, b)];
                v[k] = field.add(&v[k], &neg);
            }
        } else {
            let k = self.index[&(i, beta.to_vec())];
            v[k] = field.add(&v[k], c);
        }
    }
}

/// Products Π_k lin[k]^{β_k} for every β of degree `deg`.
fn product_table(field: &Field, lin: &[Poly], deg: u32) -> HashMap<Vec<u32>, Poly> {
    let nv = lin[0].nvars;
    let nk = lin.len();
    let mut table: HashMap<Vec<u32>, Poly> = HashMap::new();
    table.insert(vec![0; nk], Poly::constant(field, nv, field.one()));
    for s in 1..=deg {
        for b in monomials(nk, s) {
            let k = b.iter().position(|&e| e > 0).expect("positive degree");
            let mut prev = b.clone();
            prev[k] -= 1;
            let p = table[&prev].mul(field, &lin[k]);
            table.insert(b, p);
        }
    }
    table
}

fn certified() -> &'static Mutex<HashSet<(u64, usize, u32)>> {
    static SET: OnceLock<Mutex<HashSet<(u64, usize, u32)>>> = OnceLock::new();
    SET.get_or_init(|| Mutex::new(HashSet::new()))
}

/// Numeric M_k(x, rows) = det[e_k; x; rows].
fn minor_values(field: &Field, x: &[Scalar], rows: &[Vec<Scalar>]) -> Vec<Scalar> {
    let n1 = x.len();
    (0..n1)
        .map(|k| {
            let mut e = vec![field.zero(); n1];
            e[k] = field.one();
            let mut m = vec![e, x.to_vec()];
            m.extend(rows.iter().cloned());
            det(field, m)
        })
        .collect()
}

/// Checks that the basis elements are linearly independent polynomials by
/// evaluating them at random points: full rank of the evaluation matrix is
/// an exact certificate.
fn certify(field: &Field, basis: &MinorBasis) -> Result<()> {
    let key = (field.characteristic(), basis.n, basis.d);
    if certified().lock().expect("lock").contains(&key) {
        return Ok(());
    }
    let ef = if field.characteristic() == 0 {
        Field::finite(CERT_PRIME, 1)?
    } else {
        field.generic_extension()?.target
    };
    let n = basis.n;
    let mut rng = ChaCha8Rng::seed_from_u64(0xb1d);
    let mut span = IncrementalSpan::new(&ef, basis.len());
    for _ in 0..basis.len() + 8 {
        let x: Vec<Scalar> = (0..=n).map(|_| ef.random(&mut rng, 1 << 20)).collect();
        let rows: Vec<Vec<Scalar>> = (1..n)
            .map(|_| (0..=n).map(|_| ef.random(&mut rng, 1 << 20)).collect())
            .collect();
        let m = minor_values(&ef, &x, &rows);
        let row: Vec<Scalar> = basis
            .elems
            .iter()
            .map(|(i, b)| {
                let mut v = x[*i].clone();
                for (k, &e) in b.iter().enumerate() {
                    if e > 0 {
                        v = ef.mul(&v, &ef.pow(&m[k], e as u64));
                    }
                }
                v
            })
            .collect();
        span.insert(&row);
        if span.dim() == basis.len() {
            certified().lock().expect("lock").insert(key);
            return Ok(());
        }
    }
    Err(ArrError::invariant(format!(
        "could not certify independence of the degree-{} minor basis (rank {} of {})",
        basis.d,
        span.dim(),
        basis.len()
    )))
}

/// Linear conditions on basis coordinates expressing F ∈ I(P)·𝕂[A]:
/// coefficients of Σ_i P_i·Π_k M_k^{β_k} with M ranging over P^⊥.
fn point_conditions(field: &Field, p: &[Scalar], basis: &MinorBasis) -> Vec<Vec<Scalar>> {
    let n = basis.n;
    let d = basis.d;
    let j = p.iter().position(|c| !field.is_zero(c)).expect("nonzero point");
    let inv = field.inv(&p[j]).expect("nonzero");
    // P^⊥ parametrized by u_t for t ≠ j: M_t = u_t, M_j = −Σ (P_t / P_j) u_t.
    let slot = |t: usize| if t < j { t } else { t - 1 };
    let lin: Vec<Poly> = (0..=n)
        .map(|k| {
            if k != j {
                Poly::var(field, n, slot(k))
            } else {
                let mut c = vec![field.zero(); n];
                for t in (0..=n).filter(|&t| t != j) {
                    c[slot(t)] = field.neg(&field.mul(&p[t], &inv));
                }
                Poly::linear(field, &c)
            }
        })
        .collect();
    let table = product_table(field, &lin, d - 1);
    let umonos = monomials(n, d - 1);
    let uindex: HashMap<&Vec<u32>, usize> = umonos.iter().enumerate().map(|(k, e)| (e, k)).collect();
    let mut rows = vec![vec![field.zero(); basis.len()]; umonos.len()];
    for (col, (i, b)) in basis.elems.iter().enumerate() {
        if field.is_zero(&p[*i]) {
            continue;
        }
        for (e, c) in &table[b].terms {
            rows[uindex[e]][col] = field.mul(&p[*i], c);
        }
    }
    rows.retain(|r| r.iter().any(|c| !field.is_zero(c)));
    rows
}

/// [I^≫(Z)]_d as a subspace of [𝔪^≫]_d, in basis coordinates.
#[derive(Clone, Debug)]
pub struct IggSpace {
    pub basis: MinorBasis,
    pub field: Field,
    pub vectors: Vec<Vec<Scalar>>,
}

impl IggSpace {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn d(&self) -> u32 {
        self.basis.d
    }

    /// Fully expanded basis forms.
    pub fn forms(&self) -> Vec<BiGradedForm> {
        let table = ExpansionTable::new(&self.field, self.basis.n, self.basis.d);
        self.vectors.iter().map(|v| table.expand(&self.basis, v)).collect()
    }

    /// Images of the basis vectors under A-rows := `rows`, as forms in X
    /// over the field of `rows` (which `emb` maps this field into).
    pub fn evaluate_rows(&self, emb: &crate::scalar::Embedding, rows: &[Vec<Scalar>]) -> Result<Vec<Poly>> {
        let images = basis_x_images(&emb.target, &self.basis, rows)?;
        let f = &emb.target;
        Ok(self
            .vectors
            .iter()
            .map(|v| {
                let mut acc = Poly::zero(self.basis.n + 1);
                for (c, img) in v.iter().zip(&images) {
                    if !self.field.is_zero(c) {
                        acc = acc.add(f, &img.scale(f, &emb.apply(c)));
                    }
                }
                acc
            })
            .collect())
    }
}

/// Computes [I^≫(Z)]_d.
pub fn igg_space(cfg: &Configuration, d: u32) -> Result<IggSpace> {
    if d < 1 {
        return Err(ArrError::usage("degree d must be at least 1"));
    }
    let n = cfg.ambient_dim();
    if n < 2 {
        return Err(ArrError::usage("the dual module needs n ≥ 2"));
    }
    let field = cfg.field().clone();
    let basis = MinorBasis::new(n, d);
    certify(&field, &basis)?;
    let mut rows = Vec::new();
    for p in cfg.points() {
        rows.extend(point_conditions(&field, &p.coords, &basis));
    }
    let vectors = kernel(&field, rows, basis.len());
    Ok(IggSpace { basis, field, vectors })
}

/// Lazily computed [I^≫(Z)]_d for several degrees.
pub struct DualModule<'a> {
    cfg: &'a Configuration,
    spaces: Mutex<BTreeMap<u32, Arc<IggSpace>>>,
}

impl<'a> DualModule<'a> {
    pub fn new(cfg: &'a Configuration) -> Result<Self> {
        if cfg.ambient_dim() < 2 {
            return Err(ArrError::usage("the dual module needs n ≥ 2"));
        }
        Ok(DualModule {
            cfg,
            spaces: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn config(&self) -> &Configuration {
        self.cfg
    }

    pub fn space(&self, d: u32) -> Result<Arc<IggSpace>> {
        if let Some(s) = self.spaces.lock().expect("lock").get(&d) {
            return Ok(s.clone());
        }
        let s = Arc::new(igg_space(self.cfg, d)?);
        self.spaces.lock().expect("lock").insert(d, s.clone());
        Ok(s)
    }

    /// Computes the listed degrees concurrently.
    pub fn prefetch(&self, degrees: &[u32]) -> Result<()> {
        let missing: Vec<u32> = {
            let have = self.spaces.lock().expect("lock");
            degrees.iter().copied().filter(|d| !have.contains_key(d)).collect()
        };
        let done: Vec<(u32, IggSpace)> = missing
            .par_iter()
            .map(|&d| igg_space(self.cfg, d).map(|s| (d, s)))
            .collect::<Result<_>>()?;
        let mut have = self.spaces.lock().expect("lock");
        for (d, s) in done {
            have.insert(d, Arc::new(s));
        }
        Ok(())
    }

    pub fn dim(&self, d: u32) -> Result<usize> {
        Ok(self.space(d)?.dim())
    }

    /// α(D_0) = min{d : [I^≫]_d ≠ 0} − 1, searching d ≤ d_max.
    pub fn alpha(&self, d_max: u32) -> Result<Option<u32>> {
        if d_max < 2 {
            return Err(ArrError::usage("d_max must be at least 2"));
        }
        for d in 1..=d_max {
            if self.dim(d)? > 0 {
                return Ok(Some(d - 1));
            }
        }
        Ok(None)
    }

    /// Minimal generator counts per degree up to d_max.
    pub fn generator_degrees(&self, d_max: u32) -> Result<BTreeMap<u32, usize>> {
        if d_max < 2 {
            return Err(ArrError::usage("d_max must be at least 2"));
        }
        self.prefetch(&(1..=d_max).collect::<Vec<_>>())?;
        let f = self.cfg.field();
        let mut out = BTreeMap::new();
        let mut prev: Option<Arc<IggSpace>> = None;
        for d in 1..=d_max {
            let cur = self.space(d)?;
            let mut span = IncrementalSpan::new(f, cur.basis.len());
            if let Some(pv) = &prev {
                for v in &pv.vectors {
                    for j in 0..=cur.basis.n {
                        let mut w = vec![f.zero(); cur.basis.len()];
                        for (c, (i, b)) in v.iter().zip(&pv.basis.elems) {
                            if f.is_zero(c) {
                                continue;
                            }
                            let mut b2 = b.clone();
                            b2[j] += 1;
                            cur.basis.accumulate(f, &mut w, *i, &b2, c);
                        }
                        span.insert(&w);
                    }
                }
            }
            let new = cur.dim() - span.dim();
            if new > 0 {
                out.insert(d, new);
            }
            prev = Some(cur);
        }
        Ok(out)
    }

    /// dim ε_Q([I^≫]_d), with the images.
    fn epsilon_image(&self, d: u32, q: &GenericCodim2) -> Result<(Vec<Poly>, usize)> {
        let space = self.space(d)?;
        let target = q.field();
        let images = space.evaluate_rows(q.embedding(), &q.subspace_basis())?;
        let monos = monomials(self.cfg.ambient_dim() + 1, d);
        let rows = images
            .iter()
            .map(|p| {
                monos
                    .iter()
                    .map(|e| p.terms.get(e).cloned().unwrap_or_else(|| target.zero()))
                    .collect()
            })
            .collect();
        let r = rank(target, rows);
        Ok((images, r))
    }

    /// ε_Q on [I^≫]_d compared with [I(Z) ∩ I(Q)^{d−1}]_d, including an
    /// exact containment test of every image.
    pub fn commute_check(&self, d: u32, q: &GenericCodim2) -> Result<CommuteReport> {
        let frame = IqggFrame::new(self.cfg, q)?;
        let (images, left) = self.epsilon_image(d, q)?;
        let mut contained = true;
        for p in &images {
            if !frame.contains(p, d)? {
                contained = false;
                break;
            }
        }
        Ok(CommuteReport {
            d,
            igg_dim: self.dim(d)?,
            left,
            right: frame.dim(d)?,
            contained,
        })
    }

    /// Freeness through surjectivity of ε_Q in every degree up to a_n + 1,
    /// with the planar Chern cross-check.
    pub fn freeness(&self, seeds: &[u64]) -> Result<FreenessReport> {
        self.freeness_with(&splitting_analysis(self.cfg, seeds)?)
    }

    /// As [`Self::freeness`], reusing a splitting computation. The image
    /// dimension is compared with h(d) predicted by the splitting type; the
    /// containment of the images is a theorem and is left to
    /// [`Self::commute_check`].
    pub fn freeness_with(&self, sr: &SplittingReport) -> Result<FreenessReport> {
        let st = sr.splitting.clone();
        let degrees: Vec<u32> = (1..=st.last() + 1).filter(|&d| st.predicted_h(d) > 0).collect();
        self.prefetch(&degrees)?;
        let qs = sr
            .seeds
            .iter()
            .map(|&s| generic_q(self.cfg, s))
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        let mut surjective = true;
        for &d in &degrees {
            let want = st.predicted_h(d);
            let mut best: Option<usize> = None;
            // A special Q can only lower the rank of ε_Q; stop at the first
            // sample that reaches the generic target.
            for q in &qs {
                let (_, left) = self.epsilon_image(d, q)?;
                if left > want {
                    return Err(ArrError::invariant(format!(
                        "dim ε_Q([I^≫]_{d}) = {left} exceeds h({d}) = {want} (seed {})",
                        q.seed
                    )));
                }
                best = Some(best.map_or(left, |b| b.max(left)));
                if left == want {
                    break;
                }
            }
            let best = best.expect("at least one seed");
            if best != want {
                surjective = false;
            }
            rows.push(FreenessRow {
                d,
                image_dim: best,
                iqgg_dim: want,
            });
        }
        let c2 = if self.cfg.ambient_dim() == 2 {
            let c2 = c2_combinatorial(self.cfg)?;
            let chern = c2 == st.0[0] as i64 * st.0[1] as i64;
            if chern != surjective {
                return Err(ArrError::invariant(format!(
                    "ε_Q-surjectivity says free = {surjective} but c_2 = {c2} vs a_1·a_2 = {} (seeds {:?})",
                    st.0[0] * st.0[1],
                    sr.seeds
                )));
            }
            Some(c2)
        } else {
            None
        };
        Ok(FreenessReport {
            free: surjective,
            splitting: st,
            degrees: rows,
            c2,
            seeds: sr.seeds.clone(),
        })
    }

    /// [I^≫]_{⌊(|Z|−2)/2⌋+1} = 0.
    pub fn semistable(&self) -> Result<bool> {
        if self.cfg.ambient_dim() != 2 {
            return Err(ArrError::usage("semistability test is planar"));
        }
        if self.cfg.len() < 2 {
            return Err(ArrError::usage("need at least two points"));
        }
        let d = (self.cfg.len() as u32 - 2) / 2 + 1;
        Ok(self.dim(d)? == 0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommuteReport {
    pub d: u32,
    pub igg_dim: usize,
    /// dim ε_Q([I^≫]_d).
    pub left: usize,
    /// dim[I(Z) ∩ I(Q)^{d−1}]_d.
    pub right: usize,
    /// Whether every image lies in the right-hand space.
    pub contained: bool,
}

impl CommuteReport {
    pub fn holds(&self) -> bool {
        self.contained && self.left <= self.right
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FreenessRow {
    pub d: u32,
    pub image_dim: usize,
    pub iqgg_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FreenessReport {
    pub free: bool,
    pub splitting: SplittingType,
    pub degrees: Vec<FreenessRow>,
    pub c2: Option<i64>,
    pub seeds: Vec<u64>,
}

pub fn alpha(cfg: &Configuration, d_max: u32) -> Result<Option<u32>> {
    DualModule::new(cfg)?.alpha(d_max)
}

pub fn generator_degrees(cfg: &Configuration, d_max: u32) -> Result<BTreeMap<u32, usize>> {
    DualModule::new(cfg)?.generator_degrees(d_max)
}

pub fn commute_check(cfg: &Configuration, d: u32, q: &GenericCodim2) -> Result<CommuteReport> {
    DualModule::new(cfg)?.commute_check(d, q)
}

pub fn freeness(cfg: &Configuration, seeds: &[u64]) -> Result<FreenessReport> {
    DualModule::new(cfg)?.freeness(seeds)
}

pub fn semistable(cfg: &Configuration) -> Result<bool> {
    DualModule::new(cfg)?.semistable()
}

/// Σ over spanned lines of (|L ∩ Z| − 1), minus |Z|, plus 1.
pub fn c2_combinatorial(cfg: &Configuration) -> Result<i64> {
    if cfg.ambient_dim() != 2 {
        return Err(ArrError::usage("c_2 formula is planar"));
    }
    let lines = spanned_lines(cfg)?;
    let s: i64 = lines.iter().map(|l| l.len() as i64 - 1).sum();
    Ok(s - cfg.len() as i64 + 1)
}

/// X-forms X_i·Π_k M_k(X)^{β_k} with the A-rows fixed to `rows`.
fn basis_x_images(field: &Field, basis: &MinorBasis, rows: &[Vec<Scalar>]) -> Result<Vec<Poly>> {
    let n = basis.n;
    if rows.len() != n - 1 || rows.iter().any(|r| r.len() != n + 1) {
        return Err(ArrError::usage(format!("expected {} rows of length {}", n - 1, n + 1)));
    }
    if n >= 2 && rank(field, rows.to_vec()) < n - 1 {
        return Err(ArrError::usage("substituted rows are linearly dependent"));
    }
    let lin = minor_linear_forms(field, rows, n);
    let table = product_table(field, &lin, basis.d - 1);
    Ok(basis
        .elems
        .iter()
        .map(|(i, b)| table[b].mul(field, &Poly::var(field, n + 1, *i)))
        .collect())
}

/// M_k(X) = det[e_k; X; rows] as linear forms in X.
fn minor_linear_forms(field: &Field, rows: &[Vec<Scalar>], n: usize) -> Vec<Poly> {
    let unit = |t: usize| {
        let mut e = vec![field.zero(); n + 1];
        e[t] = field.one();
        e
    };
    (0..=n)
        .map(|k| {
            let coeffs: Vec<Scalar> = (0..=n)
                .map(|t| {
                    let mut m = vec![unit(k), unit(t)];
                    m.extend(rows.iter().cloned());
                    det(field, m)
                })
                .collect();
            Poly::linear(field, &coeffs)
        })
        .collect()
}

/// Exact polynomial in X_0..X_n and A_{i,j} (1 ≤ i ≤ n−1, 0 ≤ j ≤ n),
/// bihomogeneous of X-degree `x_degree` and degree `a_degree` in each A-row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiGradedForm {
    pub n: usize,
    pub x_degree: u32,
    pub a_degree: u32,
    pub field: Field,
    pub poly: Poly,
}

/// Variable index of A_{i,j}.
pub fn a_var(n: usize, i: usize, j: usize) -> usize {
    (n + 1) * i + j
}

fn nvars(n: usize) -> usize {
    (n + 1) * n
}

fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, k: usize, out: &mut Vec<(Vec<usize>, bool)>) {
        if cur.len() == k {
            let mut inv = 0;
            for a in 0..k {
                for b in a + 1..k {
                    if cur[a] > cur[b] {
                        inv += 1;
                    }
                }
            }
            out.push((cur.clone(), inv % 2 == 1));
            return;
        }
        for x in 0..k {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(cur, used, k, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], k, &mut out);
    out
}

/// The signed maximal minor M_i = det[e_i; X; A_1; …; A_{n−1}].
pub fn minor(field: &Field, i: usize, n: usize) -> Result<BiGradedForm> {
    if n < 2 || i > n {
        return Err(ArrError::usage("minor index must satisfy 0 ≤ i ≤ n with n ≥ 2"));
    }
    let cols: Vec<usize> = (0..=n).filter(|&c| c != i).collect();
    let nv = nvars(n);
    let mut poly = Poly::zero(nv);
    let sign_i = i % 2 == 1;
    for (perm, odd) in permutations(n) {
        let mut e = vec![0u32; nv];
        for (r, &s) in perm.iter().enumerate() {
            let c = cols[s];
            // Row 0 is X, row r ≥ 1 is A_r.
            e[if r == 0 { c } else { a_var(n, r, c) }] += 1;
        }
        let c = if odd ^ sign_i { field.from_i64(-1) } else { field.one() };
        poly.add_term(field, e, &c);
    }
    Ok(BiGradedForm {
        n,
        x_degree: 1,
        a_degree: 1,
        field: field.clone(),
        poly,
    })
}

/// Σ_j M_j^k·X_j.
pub fn power_sum_form(field: &Field, n: usize, k: u32) -> Result<BiGradedForm> {
    let mut poly = Poly::zero(nvars(n));
    for j in 0..=n {
        let m = minor(field, j, n)?.poly.pow(field, k);
        poly = poly.add(field, &m.mul(field, &Poly::var(field, nvars(n), j)));
    }
    Ok(BiGradedForm {
        n,
        x_degree: k + 1,
        a_degree: k,
        field: field.clone(),
        poly,
    })
}

/// Expanded products X_i·M^β for one degree.
pub struct ExpansionTable {
    field: Field,
    n: usize,
    table: HashMap<Vec<u32>, Poly>,
}

impl ExpansionTable {
    pub fn new(field: &Field, n: usize, d: u32) -> Self {
        let lin: Vec<Poly> = (0..=n).map(|i| minor(field, i, n).expect("valid minor").poly).collect();
        ExpansionTable {
            field: field.clone(),
            n,
            table: product_table(field, &lin, d - 1),
        }
    }

    pub fn expand(&self, basis: &MinorBasis, v: &[Scalar]) -> BiGradedForm {
        let f = &self.field;
        let nv = nvars(self.n);
        let mut poly = Poly::zero(nv);
        for (c, (i, b)) in v.iter().zip(&basis.elems) {
            if f.is_zero(c) {
                continue;
            }
            let t = self.table[b].mul(f, &Poly::var(f, nv, *i)).scale(f, c);
            poly = poly.add(f, &t);
        }
        BiGradedForm {
            n: self.n,
            x_degree: basis.d,
            a_degree: basis.d - 1,
            field: f.clone(),
            poly,
        }
    }
}

impl BiGradedForm {
    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Every term has the recorded X-degree and A-row degrees.
    pub fn check_multidegree(&self) -> bool {
        let n = self.n;
        self.poly.terms.keys().all(|e| {
            e[..=n].iter().sum::<u32>() == self.x_degree
                && (1..n).all(|r| e[a_var(n, r, 0)..=a_var(n, r, n)].iter().sum::<u32>() == self.a_degree)
        })
    }

    /// The A-polynomial left after X := p.
    pub fn substitute_x(&self, p: &[Scalar]) -> Poly {
        let vals: Vec<(usize, Scalar)> = p.iter().cloned().enumerate().collect();
        self.poly.substitute(&self.field, &vals)
    }

    /// F ∈ I(Z)·𝕂[A]: X := P gives the zero polynomial for every P ∈ Z.
    pub fn is_member(&self, cfg: &Configuration) -> bool {
        cfg.points().iter().all(|p| self.substitute_x(&p.coords).is_zero())
    }

    /// ε: substitute the A-rows; the result is a form in X_0..X_n.
    pub fn epsilon(&self, rows: &[Vec<Scalar>]) -> Result<Poly> {
        let n = self.n;
        if rows.len() != n - 1 || rows.iter().any(|r| r.len() != n + 1) {
            return Err(ArrError::usage(format!("expected {} rows of length {}", n - 1, n + 1)));
        }
        if rank(&self.field, rows.to_vec()) < n - 1 {
            return Err(ArrError::usage("substituted rows are linearly dependent"));
        }
        let mut vals = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                vals.push((a_var(n, r + 1, j), c.clone()));
            }
        }
        let p = self.poly.substitute(&self.field, &vals);
        let mut out = Poly::zero(n + 1);
        for (e, c) in &p.terms {
            out.add_term(&self.field, e[..=n].to_vec(), c);
        }
        Ok(out)
    }

    /// Whether `other` is a nonzero scalar multiple of this form.
    pub fn proportional(&self, other: &BiGradedForm) -> bool {
        poly_proportional(&self.field, &self.poly, &other.poly)
    }

    fn var_name(&self, k: usize) -> String {
        let n1 = self.n + 1;
        if k < n1 {
            format!("X{k}")
        } else {
            format!("A{}_{}", k / n1, k % n1)
        }
    }

    /// Canonical text: `coeff * X0^2*A1_1 + …`, terms in descending
    /// lexicographic order of exponent vectors (X before A).
    pub fn to_canonical_string(&self) -> String {
        if self.poly.is_zero() {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        for (e, c) in self.poly.terms.iter().rev() {
            let mut coeff = self.field.format(c);
            if coeff.contains(' ') {
                coeff = format!("({coeff})");
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(k, &x)| {
                    if x == 1 {
                        self.var_name(k)
                    } else {
                        format!("{}^{x}", self.var_name(k))
                    }
                })
                .collect();
            let mono = if mono.is_empty() {
                "1".to_string()
            } else {
                mono.join("*")
            };
            terms.push(format!("{coeff} * {mono}"));
        }
        terms.join(" + ")
    }
}

/// Whether q = c·p for some nonzero c (both nonzero).
pub fn poly_proportional(field: &Field, p: &Poly, q: &Poly) -> bool {
    if p.is_zero() || q.is_zero() || p.terms.len() != q.terms.len() {
        return false;
    }
    let (e0, c0) = p.terms.iter().next().expect("nonzero");
    let Some(d0) = q.terms.get(e0) else {
        return false;
    };
    let ratio = field.div(d0, c0).expect("nonzero");
    p.scale(field, &ratio) == *q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    fn cfg(pts: &[Vec<i64>]) -> Configuration {
        Configuration::from_ints(&q(), 2, pts).unwrap()
    }

    fn coord3() -> Configuration {
        cfg(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])
    }

    fn generic5() -> Configuration {
        cfg(&[
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, 1],
            vec![1, 2, 5],
        ])
    }

    #[test]
    fn minors_at_a_coordinate_point() {
        let f = q();
        let p = vec![f.one(), f.zero(), f.zero()];
        let m: Vec<Poly> = (0..3).map(|i| minor(&f, i, 2).unwrap().substitute_x(&p)).collect();
        assert!(m[0].is_zero());
        let a = |j| Poly::var(&f, 6, a_var(2, 1, j));
        assert_eq!(m[1], a(2).scale(&f, &f.from_i64(-1)));
        assert_eq!(m[2], a(1));
    }

    #[test]
    fn euler_relation_holds_identically() {
        let f = q();
        for n in 2..5 {
            let mut s = Poly::zero(nvars(n));
            for i in 0..=n {
                let m = minor(&f, i, n).unwrap();
                assert!(m.check_multidegree());
                s = s.add(&f, &m.poly.mul(&f, &Poly::var(&f, nvars(n), i)));
            }
            assert!(s.is_zero(), "n = {n}");
            assert!(power_sum_form(&f, n, 1).unwrap().is_zero());
        }
    }

    #[test]
    fn repeated_row_kills_minors() {
        let f = q();
        let m = minor(&f, 1, 2).unwrap();
        let row = vec![f.from_i64(3), f.from_i64(-1), f.from_i64(2)];
        let e = m.epsilon(std::slice::from_ref(&row)).unwrap();
        assert!(f.is_zero(&e.eval(&f, &row)));
    }

    #[test]
    fn basis_sizes() {
        for n in 2..5 {
            for d in 1..7 {
                let b = MinorBasis::new(n, d);
                assert_eq!(b.len() as u64, MinorBasis::expected_len(n, d));
                certify(&q(), &b).unwrap();
            }
        }
    }

    #[test]
    fn degree_one_is_linear_forms_through_z() {
        assert_eq!(igg_space(&generic5(), 1).unwrap().dim(), 0);
        let line = cfg(&[vec![1, 0, 0], vec![0, 1, 0]]);
        assert_eq!(igg_space(&line, 1).unwrap().dim(), 1);
    }

    #[test]
    fn coordinate_points_are_free() {
        let z = coord3();
        let dm = DualModule::new(&z).unwrap();
        assert_eq!(dm.dim(2).unwrap(), 2);
        assert_eq!(dm.alpha(4).unwrap(), Some(1));
        let g = dm.generator_degrees(4).unwrap();
        assert_eq!(g.into_iter().collect::<Vec<_>>(), vec![(2, 2)]);
        let fr = dm.freeness(&[42, 43, 44]).unwrap();
        assert!(fr.free);
        assert_eq!(fr.c2, Some(1));
    }

    #[test]
    fn generic_points_are_not_free() {
        let z = generic5();
        let dm = DualModule::new(&z).unwrap();
        assert_eq!(dm.dim(3).unwrap(), 0);
        assert!(dm.semistable().unwrap());
        assert_eq!(c2_combinatorial(&z).unwrap(), 6);
        let fr = dm.freeness(&[42, 43, 44]).unwrap();
        assert!(!fr.free);
        let r = dm.commute_check(3, &generic_q(&z, 42).unwrap()).unwrap();
        assert!(r.holds());
        assert_eq!((r.left, r.right), (0, 2));
    }

    #[test]
    fn expanded_basis_passes_direct_membership() {
        let z = cfg(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]]);
        let s = igg_space(&z, 3).unwrap();
        assert_eq!(s.dim(), 3);
        for f in s.forms() {
            assert!(f.check_multidegree());
            assert!(f.is_member(&z));
            assert!(!f.is_zero());
        }
        assert_eq!(igg_space(&z, 2).unwrap().dim(), 0);
    }

    #[test]
    fn epsilon_at_a_point_lands_in_its_power() {
        let z = generic5();
        let s = igg_space(&z, 4).unwrap();
        assert!(s.dim() > 0);
        let f = q();
        for form in s.forms() {
            for p in z.points() {
                let e = form.epsilon(std::slice::from_ref(&p.coords)).unwrap();
                // Every term of ε_P(F) lies in I(P)^d: vanishing to order d at P
                // means ε_P(F) is a form in the d-th power of the ideal of P.
                let forms = kernel(&f, vec![p.coords.clone()], 3);
                let mut span = IncrementalSpan::new(&f, monomials(3, 4).len());
                let lin: Vec<Poly> = forms.iter().map(|l| Poly::linear(&f, l)).collect();
                for b in monomials(2, 4) {
                    let prod = lin[0].pow(&f, b[0]).mul(&f, &lin[1].pow(&f, b[1]));
                    span.insert(&to_vec(&f, &prod, 4));
                }
                assert!(span.contains(&to_vec(&f, &e, 4)));
            }
        }
    }

    fn to_vec(f: &Field, p: &Poly, d: u32) -> Vec<Scalar> {
        monomials(3, d)
            .iter()
            .map(|e| p.terms.get(e).cloned().unwrap_or_else(|| f.zero()))
            .collect()
    }

    #[test]
    fn canonical_text_of_a_minor() {
        let f = q();
        assert_eq!(
            minor(&f, 0, 2).unwrap().to_canonical_string(),
            "1 * X1*A1_2 + -1 * X2*A1_1"
        );
        assert_eq!(
            minor(&f, 2, 2).unwrap().to_canonical_string(),
            "1 * X0*A1_1 + -1 * X1*A1_0"
        );
    }

    #[test]
    fn dependent_rows_are_rejected() {
        let f = q();
        let m = minor(&f, 0, 3).unwrap();
        let r = vec![f.one(), f.zero(), f.zero(), f.zero()];
        assert!(matches!(m.epsilon(&[r.clone(), r]), Err(ArrError::Usage(_))));
    }
}
