//! Shared constructions and brute-force oracles for the integration tests.
#![allow(dead_code)]

use arrlab::configlib::build_generic;
use arrlab::geometry::{span_dim, Configuration, ProjectivePoint};
use arrlab::scalar::{Field, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rationals() -> Field {
    Field::rationals()
}

/// Three coordinate points and (1:1:1).
pub fn four_points() -> Configuration {
    Configuration::from_ints(
        &rationals(),
        2,
        &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]],
    )
    .unwrap()
}

/// k points (t² : t : 1), t = 0..k−1.
pub fn conic_points(k: usize) -> Configuration {
    let coords: Vec<Vec<i64>> = (0..k as i64).map(|t| vec![t * t, t, 1]).collect();
    Configuration::from_ints(&rationals(), 2, &coords).unwrap()
}

/// Ten points on the plane X_3 = 0 plus two points off it. With
/// `on_conic` the ten points are (t² : t : 1 : 0), otherwise general.
pub fn plane_pair(on_conic: bool) -> Configuration {
    let f = rationals();
    let mut coords: Vec<Vec<Scalar>> = if on_conic {
        (1..=10i64)
            .map(|t| [t * t, t, 1, 0].iter().map(|&c| f.from_i64(c)).collect())
            .collect()
    } else {
        build_generic(10, 2, 7)
            .unwrap()
            .points()
            .iter()
            .map(|p| {
                let mut c = p.coords.clone();
                c.push(f.zero());
                c
            })
            .collect()
    };
    for extra in [[3, -7, 11, 5], [-13, 2, 17, 19]] {
        coords.push(extra.iter().map(|&c| f.from_i64(c)).collect());
    }
    Configuration::from_coords(&f, 3, coords).unwrap()
}

/// Random spanning planar configuration of 3..=max_points points. Odd
/// seeds draw coordinates from {−1, 0, 1} (the 13 points of the B_3
/// arrangement's dual), even seeds from {−2..2}.
pub fn random_planar(seed: u64, max_points: usize) -> Configuration {
    let r = if seed % 2 == 1 { 1 } else { 2 };
    random_config(seed, 2, max_points, r)
}

/// Random spanning configuration in ℙⁿ of n+1..=max_points points with
/// coordinates in {−r..r}.
pub fn random_config(seed: u64, n: usize, max_points: usize, r: i64) -> Configuration {
    let f = rationals();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let k = rng.gen_range(n + 1..=max_points);
        let mut pts: Vec<ProjectivePoint> = Vec::new();
        while pts.len() < k {
            let c: Vec<i64> = (0..=n).map(|_| rng.gen_range(-r..=r)).collect();
            if let Ok(p) = ProjectivePoint::from_ints(&f, &c) {
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
        }
        let cfg = Configuration::new(&f, n, pts).unwrap();
        if cfg.is_spanning() {
            return cfg;
        }
    }
}

/// Ex.C(Z,d) by enumerating every set partition of Z.
pub fn brute_exc(cfg: &Configuration, d: u32) -> u64 {
    assert!(cfg.len() <= 16);
    let dims: Vec<u64> = (0u32..1 << cfg.len())
        .map(|m| {
            let idx: Vec<usize> = (0..cfg.len()).filter(|&i| m >> i & 1 == 1).collect();
            if idx.is_empty() {
                0
            } else {
                span_dim(cfg, &idx).unwrap() as u64
            }
        })
        .collect();
    fn go(n: usize, d: u64, dims: &[u64], i: usize, blocks: &mut Vec<u32>, best: &mut u64) {
        if i == n {
            let cost: u64 = blocks.iter().map(|&b| d * dims[b as usize] + 1).sum();
            *best = (*best).min(cost);
            return;
        }
        for k in 0..blocks.len() {
            blocks[k] |= 1 << i;
            go(n, d, dims, i + 1, blocks, best);
            blocks[k] &= !(1 << i);
        }
        blocks.push(1 << i);
        go(n, d, dims, i + 1, blocks, best);
        blocks.pop();
    }
    let mut best = u64::MAX;
    go(cfg.len(), d as u64, &dims, 0, &mut Vec::new(), &mut best);
    best
}

/// Number of lines through at least two points, by pairwise enumeration.
pub fn brute_lines(cfg: &Configuration) -> usize {
    let mut lines: Vec<Vec<usize>> = Vec::new();
    for i in 0..cfg.len() {
        for j in i + 1..cfg.len() {
            let on: Vec<usize> = (0..cfg.len())
                .filter(|&k| span_dim(cfg, &[i, j, k]).unwrap() == 1)
                .collect();
            if !lines.contains(&on) {
                lines.push(on);
            }
        }
    }
    lines.len()
}
