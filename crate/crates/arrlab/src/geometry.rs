//! Projective points, configurations and the matroid of a configuration:
//! spans, flats, joins through a point and general-position subsets.

use std::collections::{BTreeSet, HashSet};

use crate::error::{ArrError, Result};
use crate::linalg::{rank, IncrementalSpan};
use crate::scalar::{Field, Scalar};

/// Point of ℙⁿ with its first nonzero coordinate scaled to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    pub coords: Vec<Scalar>,
}

impl ProjectivePoint {
    pub fn new(field: &Field, coords: Vec<Scalar>) -> Result<Self> {
        if let Some(bad) = coords.iter().position(|c| !field.contains(c)) {
            return Err(ArrError::usage(format!("coordinate {bad} does not belong to {field}")));
        }
        let Some(lead) = coords.iter().find(|c| !field.is_zero(c)) else {
            return Err(ArrError::usage("the zero vector is not a projective point"));
        };
        let inv = field.inv(lead)?;
        Ok(ProjectivePoint {
            coords: coords.iter().map(|c| field.mul(c, &inv)).collect(),
        })
    }

    pub fn from_ints(field: &Field, coords: &[i64]) -> Result<Self> {
        Self::new(field, coords.iter().map(|&c| field.from_i64(c)).collect())
    }
}

/// Ordered set of distinct points in ℙⁿ over one field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    ambient_dim: usize,
    field: Field,
    points: Vec<ProjectivePoint>,
    pub name: Option<String>,
}

impl Configuration {
    pub fn new(field: &Field, ambient_dim: usize, points: Vec<ProjectivePoint>) -> Result<Self> {
        if ambient_dim < 1 {
            return Err(ArrError::usage("ambient dimension must be at least 1"));
        }
        let mut seen = HashSet::new();
        for (i, p) in points.iter().enumerate() {
            if p.coords.len() != ambient_dim + 1 {
                return Err(ArrError::usage(format!(
                    "point {i} has {} coordinates, expected {}",
                    p.coords.len(),
                    ambient_dim + 1
                )));
            }
            if !p.coords.iter().all(|c| field.contains(c)) {
                return Err(ArrError::usage(format!("point {i} does not belong to {field}")));
            }
            if !seen.insert(p.clone()) {
                return Err(ArrError::usage(format!("point {i} repeats an earlier point")));
            }
        }
        Ok(Configuration {
            ambient_dim,
            field: field.clone(),
            points,
            name: None,
        })
    }

    /// Builds from raw coordinate vectors, normalizing each.
    pub fn from_coords(field: &Field, ambient_dim: usize, coords: Vec<Vec<Scalar>>) -> Result<Self> {
        let pts = coords
            .into_iter()
            .map(|c| ProjectivePoint::new(field, c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(field, ambient_dim, pts)
    }

    pub fn from_ints(field: &Field, ambient_dim: usize, coords: &[Vec<i64>]) -> Result<Self> {
        Self::from_coords(
            field,
            ambient_dim,
            coords
                .iter()
                .map(|c| c.iter().map(|&x| field.from_i64(x)).collect())
                .collect(),
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &ProjectivePoint {
        &self.points[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: &ProjectivePoint) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    /// Subconfiguration on the given indices (in the given order).
    pub fn subset(&self, indices: &[usize]) -> Configuration {
        Configuration {
            ambient_dim: self.ambient_dim,
            field: self.field.clone(),
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            name: None,
        }
    }

    /// This configuration with one more point appended.
    pub fn with_point(&self, p: ProjectivePoint) -> Result<Configuration> {
        let mut pts = self.points.clone();
        pts.push(p);
        Configuration::new(&self.field, self.ambient_dim, pts)
    }

    /// The same points re-expressed over a larger field.
    pub fn embed(&self, emb: &crate::scalar::Embedding) -> Configuration {
        Configuration {
            ambient_dim: self.ambient_dim,
            field: emb.target.clone(),
            points: self
                .points
                .iter()
                .map(|p| ProjectivePoint {
                    coords: p.coords.iter().map(|c| emb.apply(c)).collect(),
                })
                .collect(),
            name: self.name.clone(),
        }
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        if subset.is_empty() {
            return Err(ArrError::usage("subset must be nonempty"));
        }
        if let Some(&bad) = subset.iter().find(|&&i| i >= self.len()) {
            return Err(ArrError::usage(format!(
                "index {bad} out of range (|Z| = {})",
                self.len()
            )));
        }
        Ok(())
    }

    /// Echelon basis of the span of the given points.
    pub fn span_basis(&self, subset: &[usize]) -> IncrementalSpan {
        let mut s = IncrementalSpan::new(&self.field, self.ambient_dim + 1);
        for &i in subset {
            s.insert(&self.points[i].coords);
        }
        s
    }

    /// Whether all points span ℙⁿ.
    pub fn is_spanning(&self) -> bool {
        !self.is_empty() && self.span_basis(&(0..self.len()).collect::<Vec<_>>()).dim() == self.ambient_dim + 1
    }
}

/// Intersection of the configuration with a linear subspace.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flat {
    pub indices: Vec<usize>,
    pub dim: usize,
}

impl Flat {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

/// Projective dimension of the span of `subset` (rank minus one).
pub fn span_dim(cfg: &Configuration, subset: &[usize]) -> Result<usize> {
    cfg.check_subset(subset)?;
    let rows = subset.iter().map(|&i| cfg.point(i).coords.clone()).collect();
    Ok(rank(cfg.field(), rows) - 1)
}

fn closure_of_basis(cfg: &Configuration, basis: &IncrementalSpan) -> Vec<usize> {
    (0..cfg.len())
        .filter(|&i| basis.contains(&cfg.point(i).coords))
        .collect()
}

/// All configuration points in the span of `subset`.
pub fn closure(cfg: &Configuration, subset: &[usize]) -> Result<Flat> {
    cfg.check_subset(subset)?;
    let basis = cfg.span_basis(subset);
    Ok(Flat {
        indices: closure_of_basis(cfg, &basis),
        dim: basis.dim() - 1,
    })
}

/// Every flat of dimension 1..=max_dim holding at least two points,
/// sorted by (dim, indices).
pub fn enumerate_flats(cfg: &Configuration, max_dim: usize) -> Result<Vec<Flat>> {
    let n = cfg.ambient_dim();
    if max_dim < 1 || max_dim > n.saturating_sub(1).max(1) {
        return Err(ArrError::usage(format!(
            "max_dim must lie in 1..={}",
            n.saturating_sub(1).max(1)
        )));
    }
    Ok(flats_up_to(cfg, max_dim))
}

/// Flats of dimension 1..=max_dim (no range check), each obtained by
/// extending a flat of one dimension less by a point outside it.
pub(crate) fn flats_up_to(cfg: &Configuration, max_dim: usize) -> Vec<Flat> {
    let mut layer: BTreeSet<Flat> = (0..cfg.len())
        .map(|i| Flat {
            indices: vec![i],
            dim: 0,
        })
        .collect();
    let mut out = Vec::new();
    for dim in 1..=max_dim {
        let mut next = BTreeSet::new();
        for f in &layer {
            let basis = cfg.span_basis(&f.indices);
            if basis.dim() != dim {
                continue;
            }
            // Only extend by points larger than the flat's minimum outside
            // point to avoid redundant work; closures are deduplicated anyway.
            for p in 0..cfg.len() {
                if f.contains(p) {
                    continue;
                }
                let mut b = basis.clone();
                b.insert(&cfg.point(p).coords);
                let idx = closure_of_basis(cfg, &b);
                if idx.iter().any(|&i| i < p && !f.contains(i)) {
                    // Already produced from a smaller outside point.
                    continue;
                }
                next.insert(Flat { indices: idx, dim });
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Argument to [`l_p_count`]: a point of the configuration or an outside
/// point.
#[derive(Clone, Debug)]
pub enum PointRef {
    Index(usize),
    External(ProjectivePoint),
}

/// Number of distinct lines joining `p` to the other points of Z.
pub fn l_p_count(cfg: &Configuration, p: &PointRef) -> Result<usize> {
    let (coords, skip) = match p {
        PointRef::Index(i) => {
            if *i >= cfg.len() {
                return Err(ArrError::usage(format!("index {i} out of range")));
            }
            (cfg.point(*i).coords.clone(), Some(*i))
        }
        PointRef::External(q) => match cfg.index_of(q) {
            Some(i) => (q.coords.clone(), Some(i)),
            None => (q.coords.clone(), None),
        },
    };
    let others: Vec<usize> = (0..cfg.len()).filter(|&j| Some(j) != skip).collect();
    if skip.is_some() && cfg.len() < 2 || others.is_empty() {
        return Err(ArrError::usage("need at least one other point"));
    }
    let mut covered = vec![false; cfg.len()];
    let mut lines = 0;
    for &q in &others {
        if covered[q] {
            continue;
        }
        let mut b = IncrementalSpan::new(cfg.field(), cfg.ambient_dim() + 1);
        b.insert(&coords);
        b.insert(&cfg.point(q).coords);
        for &r in &others {
            if !covered[r] && b.contains(&cfg.point(r).coords) {
                covered[r] = true;
            }
        }
        lines += 1;
    }
    Ok(lines)
}

/// All lines spanned by pairs of points, including two-point lines.
pub fn spanned_lines(cfg: &Configuration) -> Result<Vec<Flat>> {
    if cfg.len() < 2 {
        return Err(ArrError::usage("need at least two points"));
    }
    Ok(flats_up_to(cfg, 1))
}

/// Size of a largest subset in linearly general position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MgpResult {
    pub size: usize,
    /// False when |Z| exceeds the exhaustive-search cap and `size` is only a
    /// lower bound from a greedy pass.
    pub exact: bool,
}

pub const MGP_EXACT_CAP: usize = 25;

struct Mgp<'a> {
    cfg: &'a Configuration,
    order: Vec<usize>,
    n: usize,
    best: usize,
    /// blocked[i] > 0 when point i lies in the span of at most n chosen points.
    blocked: Vec<u32>,
    chosen: Vec<usize>,
}

impl Mgp<'_> {
    /// Spans of subsets S ∪ {p}, S ⊆ chosen, |S| ≤ n−1; returns the points
    /// they contain (with multiplicity) so the caller can undo.
    fn spans_with(&self, p: usize) -> Vec<usize> {
        let mut hits = Vec::new();
        let k = self.chosen.len();
        let maxs = self.n.saturating_sub(1).min(k);
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
        while let Some((start, s)) = stack.pop() {
            let mut pts = s.clone();
            pts.push(p);
            let basis = self.cfg.span_basis(&pts);
            for i in 0..self.cfg.len() {
                if basis.contains(&self.cfg.point(i).coords) {
                    hits.push(i);
                }
            }
            if s.len() < maxs {
                for j in start..k {
                    let mut t = s.clone();
                    t.push(self.chosen[j]);
                    stack.push((j + 1, t));
                }
            }
        }
        hits
    }

    fn search(&mut self, pos: usize) {
        let available = self.order[pos..].iter().filter(|&&i| self.blocked[i] == 0).count();
        if self.chosen.len() + available <= self.best {
            return;
        }
        if pos == self.order.len() {
            self.best = self.chosen.len();
            return;
        }
        let p = self.order[pos];
        if self.blocked[p] == 0 {
            let hits = self.spans_with(p);
            for &h in &hits {
                self.blocked[h] += 1;
            }
            self.chosen.push(p);
            self.search(pos + 1);
            self.chosen.pop();
            for &h in &hits {
                self.blocked[h] -= 1;
            }
        }
        self.search(pos + 1);
    }
}

/// Largest W ⊆ Z with every subset of at most n+1 points independent.
/// Exhaustive branch-and-bound for |Z| ≤ 25, greedy lower bound beyond.
pub fn max_general_position_subset(cfg: &Configuration) -> MgpResult {
    let n = cfg.ambient_dim();
    if cfg.is_empty() {
        return MgpResult { size: 0, exact: true };
    }
    // Collinearity degree: excess incidences on dependent flats through each point.
    let mut degree = vec![0usize; cfg.len()];
    if n >= 2 {
        for f in flats_up_to(cfg, n - 1) {
            if f.len() > f.dim + 1 {
                for &i in &f.indices {
                    degree[i] += f.len() - f.dim - 1;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..cfg.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(degree[i]), i));
    let mut m = Mgp {
        cfg,
        order,
        n,
        best: 0,
        blocked: vec![0; cfg.len()],
        chosen: Vec::new(),
    };
    if cfg.len() <= MGP_EXACT_CAP {
        m.search(0);
        return MgpResult {
            size: m.best,
            exact: true,
        };
    }
    // Greedy: least constrained points first.
    let order: Vec<usize> = m.order.iter().rev().copied().collect();
    for p in order {
        if m.blocked[p] == 0 {
            let hits = m.spans_with(p);
            for h in hits {
                m.blocked[h] += 1;
            }
            m.chosen.push(p);
        }
    }
    MgpResult {
        size: m.chosen.len(),
        exact: false,
    }
}

/// Whether the listed points are in linearly general position.
pub fn in_general_position(cfg: &Configuration, subset: &[usize]) -> bool {
    let n = cfg.ambient_dim();
    let k = subset.len().min(n + 1);
    let mut ok = true;
    for_each_combination(subset, k, &mut |c| {
        if ok && cfg.span_basis(c).dim() != c.len() {
            ok = false;
        }
    });
    ok
}

/// Calls `f` on every k-element combination of `items` (in order).
pub fn for_each_combination<F: FnMut(&[usize])>(items: &[usize], k: usize, f: &mut F) {
    fn rec<F: FnMut(&[usize])>(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut F) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut Vec::new(), f);
}
