//! The modified expected number of conditions Ex.C(Z,d), its coarsest
//! optimal partition Ex.Bl(Z,d), and the matroid M_d whose rank equals
//! Ex.C(Z,d).
//!
//! Ex.C(Z,d) is the minimum of Σ (d·dim Span(A_i) + 1) over partitions of Z
//! into nonempty blocks A_i. Blocks are searched among flats of Z: a block
//! may always be enlarged to the points of its span at no cost.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{ArrError, Result};
use crate::geometry::{flats_up_to, span_dim, Configuration};

/// One block of a partition of Z with the projective dimension of its span.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Block {
    pub indices: Vec<usize>,
    pub dim: usize,
}

impl Block {
    pub fn cost(&self, d: u32) -> u64 {
        d as u64 * self.dim as u64 + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExcResult {
    pub d: u32,
    pub value: u64,
    pub witness: Vec<Block>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExblPartition {
    pub d: u32,
    pub blocks: Vec<Block>,
}

impl ExblPartition {
    pub fn cost(&self) -> u64 {
        self.blocks.iter().map(|b| b.cost(self.d)).sum()
    }
}

/// Largest configuration the bitmask solver accepts.
pub const MAX_POINTS: usize = 128;

/// Exhaustive partition enumeration cap for [`ExcSolver::exbl`].
pub const EXBL_ENUMERATION_CAP: usize = 12;

type Mask = u128;
/// Best cost of covering a mask, with the chosen block and its dimension.
type CoverMemo = HashMap<Mask, (u64, Option<(Mask, usize)>)>;

fn mask_of(indices: &[usize]) -> Mask {
    indices.iter().fold(0, |m, &i| m | (1 << i))
}

fn indices_of(mask: Mask) -> Vec<usize> {
    (0..128).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Precomputed flat lattice of a configuration, reused across degrees.
pub struct ExcSolver<'a> {
    cfg: &'a Configuration,
    /// Flats of dimension ≥ 1 with at least two points, including the span
    /// of all of Z, as (mask, dim).
    flats: Vec<(Mask, usize)>,
}

impl<'a> ExcSolver<'a> {
    pub fn new(cfg: &'a Configuration) -> Result<Self> {
        if cfg.len() > MAX_POINTS {
            return Err(ArrError::usage(format!("at most {MAX_POINTS} points supported")));
        }
        let n = cfg.ambient_dim();
        let mut flats: Vec<(Mask, usize)> = if n >= 2 {
            flats_up_to(cfg, n - 1)
                .iter()
                .map(|f| (mask_of(&f.indices), f.dim))
                .collect()
        } else {
            Vec::new()
        };
        if cfg.len() >= 2 {
            let all: Vec<usize> = (0..cfg.len()).collect();
            let full = (mask_of(&all), span_dim(cfg, &all)?);
            if !flats.contains(&full) {
                flats.push(full);
            }
        }
        Ok(ExcSolver { cfg, flats })
    }

    pub fn config(&self) -> &Configuration {
        self.cfg
    }

    fn candidates(&self, d: u32) -> Vec<Vec<(Mask, usize)>> {
        // Flats holding fewer than d·dim + 1 points never beat singletons.
        let mut per_point = vec![Vec::new(); self.cfg.len()];
        for &(m, dim) in &self.flats {
            if (m.count_ones() as u64) < d as u64 * dim as u64 + 1 {
                continue;
            }
            for i in indices_of(m) {
                per_point[i].push((m, dim));
            }
        }
        per_point
    }

    /// Ex.C(Z,d) with a witness partition.
    pub fn exc(&self, d: u32) -> Result<ExcResult> {
        if d < 1 {
            return Err(ArrError::usage("degree d must be at least 1"));
        }
        let cand = self.candidates(d);
        let mut memo: CoverMemo = HashMap::new();
        let full = mask_of(&(0..self.cfg.len()).collect::<Vec<_>>());
        let value = solve(full, d, &cand, &mut memo);
        // Walk the recorded choices to rebuild the partition.
        let mut witness = Vec::new();
        let mut m = full;
        while m != 0 {
            let (_, choice) = memo[&m];
            let low = m.trailing_zeros() as usize;
            let block_mask = match choice {
                None => 1 << low,
                Some((fm, _)) => fm & m,
            };
            let idx = indices_of(block_mask);
            let dim = span_dim(self.cfg, &idx)?;
            witness.push(Block { indices: idx, dim });
            m &= !block_mask;
        }
        let total: u64 = witness.iter().map(|b| b.cost(d)).sum();
        if total != value {
            return Err(ArrError::invariant(format!(
                "Ex.C witness cost {total} differs from the optimum {value} at d = {d}"
            )));
        }
        witness.sort();
        Ok(ExcResult { d, value, witness })
    }

    /// The coarsest optimal partition Ex.Bl(Z,d).
    pub fn exbl(&self, d: u32) -> Result<ExblPartition> {
        let opt = self.exc(d)?;
        let blocks = if self.cfg.len() <= EXBL_ENUMERATION_CAP {
            self.join_of_optimal_partitions(d, opt.value)?
        } else {
            self.greedy_merge(d, &opt)?
        };
        let part = ExblPartition { d, blocks };
        if part.cost() != opt.value {
            return Err(ArrError::invariant(format!(
                "join of optimal partitions costs {} but Ex.C = {} at d = {d}",
                part.cost(),
                opt.value
            )));
        }
        Ok(part)
    }

    fn join_of_optimal_partitions(&self, d: u32, opt: u64) -> Result<Vec<Block>> {
        let n = self.cfg.len();
        // Span dimension of every subset, indexed by bitmask.
        let mut dims = vec![0usize; 1 << n];
        for (m, slot) in dims.iter_mut().enumerate().skip(1) {
            let idx = indices_of(m as Mask);
            *slot = span_dim(self.cfg, &idx)?;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut blocks: Vec<usize> = Vec::new();
        let mut found = 0usize;
        enumerate_partitions(0, n, d, opt, &dims, &mut blocks, &mut |bl| {
            found += 1;
            for &b in bl {
                let idx = indices_of(b as Mask);
                for w in idx.windows(2) {
                    let (a, c) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                    parent[a] = c;
                }
            }
        });
        if found == 0 {
            return Err(ArrError::invariant("no partition attains Ex.C"));
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        let mut out: Vec<Block> = groups
            .into_values()
            .map(|idx| {
                let dim = dims[mask_of(&idx) as usize];
                Block { indices: idx, dim }
            })
            .collect();
        out.sort();
        Ok(out)
    }

    fn greedy_merge(&self, d: u32, opt: &ExcResult) -> Result<Vec<Block>> {
        let mut blocks = opt.witness.clone();
        // Merge every family of blocks inside a common flat whenever the
        // merged cost does not exceed the family's cost.
        loop {
            let mut merged = false;
            for &(fm, fdim) in &self.flats {
                let inside: Vec<usize> = (0..blocks.len())
                    .filter(|&k| mask_of(&blocks[k].indices) & !fm == 0)
                    .collect();
                if inside.len() < 2 {
                    continue;
                }
                let cost: u64 = inside.iter().map(|&k| blocks[k].cost(d)).sum();
                let merged_cost = d as u64 * fdim as u64 + 1;
                if merged_cost < cost {
                    return Err(ArrError::invariant("witness partition is not optimal"));
                }
                if merged_cost == cost {
                    let mut idx: Vec<usize> = inside.iter().flat_map(|&k| blocks[k].indices.clone()).collect();
                    idx.sort();
                    let dim = span_dim(self.cfg, &idx)?;
                    let keep: Vec<Block> = (0..blocks.len())
                        .filter(|k| !inside.contains(k))
                        .map(|k| blocks[k].clone())
                        .collect();
                    blocks = keep;
                    blocks.push(Block { indices: idx, dim });
                    merged = true;
                    break;
                }
            }
            if !merged {
                break;
            }
        }
        blocks.sort();
        Ok(blocks)
    }
}

fn solve(mask: Mask, d: u32, cand: &[Vec<(Mask, usize)>], memo: &mut CoverMemo) -> u64 {
    if mask == 0 {
        return 0;
    }
    if let Some(&(v, _)) = memo.get(&mask) {
        return v;
    }
    let low = mask.trailing_zeros() as usize;
    let mut best = 1 + solve(mask & !(1 << low), d, cand, memo);
    let mut choice = None;
    for &(fm, dim) in &cand[low] {
        let cost = d as u64 * dim as u64 + 1;
        if cost >= best {
            continue;
        }
        let v = cost + solve(mask & !fm, d, cand, memo);
        if v < best {
            best = v;
            choice = Some((fm, dim));
        }
    }
    memo.insert(mask, (best, choice));
    best
}

/// Enumerates set partitions of {0..n} (blocks as bitmasks) whose cost
/// equals `opt`, pruning partial partitions already above it.
fn enumerate_partitions<F: FnMut(&[usize])>(
    i: usize,
    n: usize,
    d: u32,
    opt: u64,
    dims: &[usize],
    blocks: &mut Vec<usize>,
    f: &mut F,
) {
    let cost: u64 = blocks.iter().map(|&b| d as u64 * dims[b] as u64 + 1).sum();
    if cost > opt {
        return;
    }
    if i == n {
        if cost == opt {
            f(blocks);
        }
        return;
    }
    for k in 0..blocks.len() {
        blocks[k] |= 1 << i;
        enumerate_partitions(i + 1, n, d, opt, dims, blocks, f);
        blocks[k] &= !(1 << i);
    }
    blocks.push(1 << i);
    enumerate_partitions(i + 1, n, d, opt, dims, blocks, f);
    blocks.pop();
}

/// Ex.C(Z,d) with a witness.
pub fn exc(cfg: &Configuration, d: u32) -> Result<ExcResult> {
    ExcSolver::new(cfg)?.exc(d)
}

/// Ex.Bl(Z,d), the coarsest partition attaining Ex.C(Z,d).
pub fn exbl(cfg: &Configuration, d: u32) -> Result<ExblPartition> {
    ExcSolver::new(cfg)?.exbl(d)
}

/// Closed form in ℙ² for spanning Z: min{2d+1, (d+1) + |Z∖L|, |Z|} over
/// lines L. Returns `None` outside that setting.
pub fn exc_planar(cfg: &Configuration, d: u32) -> Option<u64> {
    if cfg.ambient_dim() != 2 || !cfg.is_spanning() {
        return None;
    }
    let z = cfg.len() as u64;
    let longest = flats_up_to(cfg, 1).iter().map(|l| l.len()).max().unwrap_or(1) as u64;
    let mut best = (2 * d as u64 + 1).min(z);
    if longest >= 2 {
        best = best.min(d as u64 + 1 + z - longest);
    }
    Some(best)
}

/// Independence in M_d: |A| ≤ d·dim Span(A) + 1 for every nonempty A ⊆
/// subset. Checked on the flats of the subset, which carry the largest A
/// for each span.
pub fn md_is_independent(cfg: &Configuration, subset: &[usize], d: u32) -> Result<bool> {
    if subset.iter().any(|&i| i >= cfg.len()) {
        return Err(ArrError::usage("index out of range"));
    }
    if subset.len() <= 1 {
        return Ok(true);
    }
    let sub = cfg.subset(subset);
    let n = cfg.ambient_dim();
    let bound = |dim: usize| d as u64 * dim as u64 + 1;
    let all: Vec<usize> = (0..sub.len()).collect();
    if sub.len() as u64 > bound(span_dim(&sub, &all)?) {
        return Ok(false);
    }
    if n >= 2 {
        for f in flats_up_to(&sub, n - 1) {
            if f.len() as u64 > bound(f.dim) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Rank of M_d by the greedy algorithm in index order.
pub fn md_rank(cfg: &Configuration, d: u32) -> Result<u64> {
    let mut chosen: Vec<usize> = Vec::new();
    for p in 0..cfg.len() {
        chosen.push(p);
        if !md_is_independent(cfg, &chosen, d)? {
            chosen.pop();
        }
    }
    Ok(chosen.len() as u64)
}

/// Forward differences δ_d = Ex.C(d+1) − Ex.C(d) for d = 1..d_max−1, after
/// checking they are nonincreasing and sandwiched by the block dimensions
/// of Ex.Bl(d) and Ex.Bl(d+1).
pub fn exc_delta_sequence(cfg: &Configuration, d_max: u32) -> Result<Vec<u64>> {
    if d_max < 2 {
        return Err(ArrError::usage("d_max must be at least 2"));
    }
    let solver = ExcSolver::new(cfg)?;
    let values: Vec<u64> = (1..=d_max)
        .map(|d| solver.exc(d).map(|r| r.value))
        .collect::<Result<_>>()?;
    let bl: Vec<ExblPartition> = (1..=d_max).map(|d| solver.exbl(d)).collect::<Result<_>>()?;
    let mut deltas = Vec::new();
    for d in 1..d_max {
        let i = (d - 1) as usize;
        let delta = values[i + 1] - values[i];
        let upper: usize = bl[i].blocks.iter().map(|b| b.dim).sum();
        let lower: usize = bl[i + 1].blocks.iter().map(|b| b.dim).sum();
        if !(upper as u64 >= delta && delta >= lower as u64) {
            return Err(ArrError::invariant(format!(
                "δ_{d} = {delta} escapes the block-dimension sandwich [{lower}, {upper}]"
            )));
        }
        if let Some(&prev) = deltas.last() {
            if delta > prev {
                return Err(ArrError::invariant(format!("δ increases at d = {d}")));
            }
        }
        deltas.push(delta);
    }
    Ok(deltas)
}
