//! Certified rank over ℚ and ℚ(ζ_m) by reduction modulo split primes.
//!
//! Rows are scaled to have entries in ℤ[ζ]. Reduction modulo a prime
//! ideal above p ≡ 1 (mod m) is a ring map ℤ[ζ] → 𝔽_p, so each modular
//! rank is a lower bound. A nonzero r×r minor μ vanishes modulo the chosen
//! ideal only if p divides the norm N(μ), so once the product of the primes
//! used exceeds a Hadamard bound on |N(μ)| the largest modular rank equals
//! the true rank.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{is_prime, mulmod, powmod, Field, FieldSpec, Scalar};

const PRIME_TOP: u64 = 1 << 62;

type PrimeCache = Mutex<HashMap<u64, Vec<(u64, u64)>>>;

/// (p, ω) with p ≡ 1 (mod m) and ω a primitive m-th root of unity mod p,
/// in decreasing order of p. Extended on demand.
fn split_primes(m: u64, count: usize) -> Vec<(u64, u64)> {
    static CACHE: OnceLock<PrimeCache> = OnceLock::new();
    let mut cache = CACHE
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .expect("prime cache");
    let list = cache.entry(m).or_default();
    let factors = prime_factors(m);
    let mut p = list.last().map_or(PRIME_TOP - (PRIME_TOP - 1) % m, |&(p, _)| p - m);
    while list.len() < count {
        if is_prime(p) {
            if let Some(w) = primitive_root_of_unity(p, m, &factors) {
                list.push((p, w));
            }
        }
        p -= m;
    }
    list[..count].to_vec()
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

fn primitive_root_of_unity(p: u64, m: u64, factors: &[u64]) -> Option<u64> {
    for x in 2..1000u64 {
        let w = powmod(x, (p - 1) / m, p);
        if factors.iter().all(|&q| powmod(w, m / q, p) != 1) {
            return Some(w);
        }
    }
    None
}

/// Rows over ℤ[ζ], each entry given by its coefficient vector.
struct IntMatrix {
    rows: Vec<Vec<Vec<BigInt>>>,
    ncols: usize,
}

fn integral_rows(rows: &[Vec<Scalar>], ncols: usize) -> IntMatrix {
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let coeffs: Vec<Vec<num_rational::BigRational>> = row
            .iter()
            .map(|x| match x {
                Scalar::Rat(r) => vec![r.clone()],
                Scalar::Cyc(v) => v.clone(),
                Scalar::Fin(_) => unreachable!("characteristic zero only"),
            })
            .collect();
        let mut l = BigInt::one();
        for c in coeffs.iter().flatten() {
            l = l.lcm(c.denom());
        }
        let int_row: Vec<Vec<BigInt>> = coeffs
            .iter()
            .map(|v| v.iter().map(|c| c.numer() * (&l / c.denom())).collect())
            .collect();
        if int_row.iter().flatten().any(|c| !c.is_zero()) {
            out.push(int_row);
        }
    }
    IntMatrix { rows: out, ncols }
}

/// log2 of a bound on |N(μ)| for every square minor μ.
fn norm_bound_bits(m: &IntMatrix, width: usize) -> f64 {
    let k = m.rows.len().min(m.ncols);
    if k == 0 {
        return 0.0;
    }
    // Under every embedding |σ(a)| ≤ Σ |coefficients|.
    let mut row_bits: Vec<f64> = m
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| e.iter().map(|c| c.abs()).sum::<BigInt>().bits() as f64)
                .fold(0.0, f64::max)
        })
        .collect();
    row_bits.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let per_embedding: f64 = row_bits[..k].iter().sum::<f64>() + k as f64 * (k as f64).log2() / 2.0;
    per_embedding * width as f64
}

fn reduce(c: &BigInt, p: u64) -> u64 {
    let r = (c.magnitude() % BigUint::from(p)).to_u64().expect("below p");
    if c.sign() == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

fn rank_mod(m: &IntMatrix, p: u64, w: u64) -> usize {
    let powers: Vec<u64> = {
        let width = m.rows.first().and_then(|r| r.first()).map_or(1, |e| e.len());
        let mut v = vec![1 % p];
        for _ in 1..width {
            v.push(mulmod(*v.last().expect("nonempty"), w, p));
        }
        v
    };
    let mut a: Vec<Vec<u64>> = m
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| {
                    e.iter()
                        .zip(&powers)
                        .fold(0u64, |acc, (c, &z)| (acc + mulmod(reduce(c, p), z, p)) % p)
                })
                .collect()
        })
        .collect();
    let mut r = 0;
    for c in 0..m.ncols {
        if r == a.len() {
            break;
        }
        let Some(pr) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        let inv = powmod(a[r][c], p - 2, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let piv = &head[r];
        for other in tail.iter_mut() {
            if other[c] == 0 {
                continue;
            }
            let f = mulmod(other[c], inv, p);
            for j in c..m.ncols {
                if piv[j] != 0 {
                    other[j] = (other[j] + p - mulmod(f, piv[j], p)) % p;
                }
            }
        }
        r += 1;
    }
    r
}

/// Exact rank of a matrix over ℚ or ℚ(ζ_m).
pub(crate) fn rank_char0(field: &Field, rows: &[Vec<Scalar>], ncols: usize) -> usize {
    let m = match field.spec() {
        FieldSpec::Rationals => 1,
        FieldSpec::Cyclotomic { m } => *m as u64,
        FieldSpec::Finite { .. } => panic!("rank_char0 called over a finite field"),
    };
    let mat = integral_rows(rows, ncols);
    let full = mat.rows.len().min(ncols);
    if full == 0 {
        return 0;
    }
    let width = mat.rows[0][0].len();
    let need = norm_bound_bits(&mat, width) + 1.0;
    let mut best = 0;
    let mut have = 0.0;
    let mut batch = 4;
    let mut used = 0;
    loop {
        let primes = split_primes(m, used + batch);
        for &(p, w) in &primes[used..] {
            best = best.max(rank_mod(&mat, p, w));
            if best == full {
                return best;
            }
            have += (p as f64).log2();
            if have > need {
                return best;
            }
        }
        used += batch;
        batch *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_split() {
        for m in [1u64, 3, 5, 12] {
            for (p, w) in split_primes(m, 5) {
                assert!(is_prime(p));
                assert_eq!((p - 1) % m, 0);
                assert_eq!(powmod(w, m, p), 1);
            }
        }
    }

    #[test]
    fn multiple_of_large_prime_product() {
        // Rank drops modulo every prime dividing the 2×2 minor; the bound
        // forces enough primes to see rank 2.
        let f = Field::rationals();
        let (p1, _) = split_primes(1, 1)[0];
        let big = BigInt::from(p1) * BigInt::from(p1);
        let x = f.from_bigint(&(big + 1u32));
        let rows = vec![vec![f.one(), f.one()], vec![f.one(), x]];
        assert_eq!(rank_char0(&f, &rows, 2), 2);
        let rows = vec![vec![f.from_i64(2), f.from_i64(4)], vec![f.from_i64(3), f.from_i64(6)]];
        assert_eq!(rank_char0(&f, &rows, 2), 1);
    }
}
