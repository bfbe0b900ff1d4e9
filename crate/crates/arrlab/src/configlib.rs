//! Named configurations, direct sums, random generic configurations and the
//! JSON configuration format.
//!
//! File format:
//! `{"field": {"kind": "cyclotomic", "m": 5}, "ambient_dim": 2,
//!   "points": [["1", "0", "0"], ["1", "-z^2", "0"]], "name": "ceva-5"}`.
//! Coordinates are scalar literals (integers are also accepted as JSON
//! numbers). Unknown keys are rejected.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ArrError, Result};
use crate::geometry::{in_general_position, Configuration, ProjectivePoint};
use crate::idealdims::hilbert;
use crate::poly::binomial;
use crate::scalar::{prime_power, Field, FieldSpec, Scalar};

fn ceva_field(m: u32) -> Result<Field> {
    if m < 2 {
        return Err(ArrError::usage("m must be at least 2"));
    }
    if m == 2 {
        Ok(Field::rationals())
    } else {
        Field::cyclotomic(m)
    }
}

/// ζ_m^k in the field returned by `ceva_field(m)`.
fn root_of_unity(f: &Field, m: u32, k: u32) -> Result<Scalar> {
    if m == 2 {
        Ok(f.from_i64(if k.is_multiple_of(2) { 1 } else { -1 }))
    } else {
        f.zeta_power(k as i64)
    }
}

/// F_m: for i < j and 0 ≤ k < m, the point with −1 in position i, ζ^k in
/// position j and 0 elsewhere. Over ℚ when m = 2, else over ℚ(ζ_m).
pub fn build_fermat(m: u32, n: usize) -> Result<Configuration> {
    let f = ceva_field(m)?;
    if n < 1 {
        return Err(ArrError::usage("n must be at least 1"));
    }
    let mut pts = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            for k in 0..m {
                let mut c = vec![f.zero(); n + 1];
                c[i] = f.from_i64(-1);
                c[j] = root_of_unity(&f, m, k)?;
                pts.push(ProjectivePoint::new(&f, c)?);
            }
        }
    }
    Ok(Configuration::new(&f, n, pts)?.with_name(format!("fermat-{m}-{n}")))
}

/// C_m = coordinate points followed by F_m.
pub fn build_ceva_extended(m: u32, n: usize) -> Result<Configuration> {
    if n < 2 {
        return Err(ArrError::usage("n must be at least 2"));
    }
    let fm = build_fermat(m, n)?;
    let f = fm.field().clone();
    let mut pts = Vec::new();
    for i in 0..=n {
        let mut c = vec![f.zero(); n + 1];
        c[i] = f.one();
        pts.push(ProjectivePoint::new(&f, c)?);
    }
    pts.extend(fm.points().iter().cloned());
    Ok(Configuration::new(&f, n, pts)?.with_name(format!("ceva-{m}-{n}")))
}

/// All 𝔽_q-points of ℙⁿ, ordered by the position of the leading 1 and
/// then lexicographically (elements of 𝔽_{p^e} ordered by their base-p
/// digit vectors, constant term first).
pub fn build_projective_space(q: u64, n: usize) -> Result<Configuration> {
    let Some((p, e)) = prime_power(q) else {
        return Err(ArrError::usage(format!("{q} is not a prime power")));
    };
    if n < 1 {
        return Err(ArrError::usage("n must be at least 1"));
    }
    let f = Field::finite(p, e)?;
    let elem = |mut x: u64| {
        let mut digits = Vec::with_capacity(e as usize);
        for _ in 0..e {
            digits.push(x % p);
            x /= p;
        }
        Scalar::Fin(digits)
    };
    let mut pts = Vec::new();
    for lead in 0..=n {
        let free = n - lead;
        let count = (q as u128).pow(free as u32);
        for idx in 0..count {
            let mut c = vec![f.zero(); n + 1];
            c[lead] = f.one();
            // Most significant digit first, so that the order is lexicographic.
            let mut x = idx;
            for pos in (lead + 1..=n).rev() {
                c[pos] = elem((x % q as u128) as u64);
                x /= q as u128;
            }
            pts.push(ProjectivePoint::new(&f, c)?);
        }
    }
    Ok(Configuration::new(&f, n, pts)?.with_name(format!("pg-{n}-{q}")))
}

/// Smallest field containing both, when one of the supported embeddings
/// applies.
pub fn common_field(a: &Field, b: &Field) -> Result<Field> {
    if a == b {
        return Ok(a.clone());
    }
    let fail = || ArrError::usage(format!("no common field for {a} and {b}"));
    let cyc_m = |s: &FieldSpec| match s {
        FieldSpec::Rationals => Some(1u32),
        FieldSpec::Cyclotomic { m } => Some(*m),
        _ => None,
    };
    match (a.spec(), b.spec()) {
        (FieldSpec::Finite { p: p1, k: k1, .. }, FieldSpec::Finite { p: p2, k: k2, .. }) => {
            if p1 != p2 {
                return Err(fail());
            }
            let k = k1.lcm(k2);
            if k == *k1 {
                Ok(a.clone())
            } else if k == *k2 {
                Ok(b.clone())
            } else {
                Field::finite(*p1, k)
            }
        }
        (sa, sb) => {
            let (ma, mb) = (cyc_m(sa).ok_or_else(fail)?, cyc_m(sb).ok_or_else(fail)?);
            let m = ma.lcm(&mb);
            if m == ma {
                Ok(a.clone())
            } else if m == mb {
                Ok(b.clone())
            } else {
                Field::cyclotomic(m)
            }
        }
    }
}

/// Z_1 ⊕ Z_2 in ℙ^{n_1 + n_2 + 1}: points of `a` padded with zeros on the
/// right, points of `b` on the left.
pub fn direct_sum(a: &Configuration, b: &Configuration) -> Result<Configuration> {
    let f = common_field(a.field(), b.field())?;
    let a = a.embed(&a.field().embedding_into(&f)?);
    let b = b.embed(&b.field().embedding_into(&f)?);
    let (na, nb) = (a.ambient_dim(), b.ambient_dim());
    let mut pts = Vec::new();
    for p in a.points() {
        let mut c = p.coords.clone();
        c.extend((0..=nb).map(|_| f.zero()));
        pts.push(ProjectivePoint::new(&f, c)?);
    }
    for p in b.points() {
        let mut c: Vec<Scalar> = (0..=na).map(|_| f.zero()).collect();
        c.extend(p.coords.iter().cloned());
        pts.push(ProjectivePoint::new(&f, c)?);
    }
    let name = match (&a.name, &b.name) {
        (Some(x), Some(y)) => Some(format!("{x}+{y}")),
        _ => None,
    };
    let mut out = Configuration::new(&f, na + nb + 1, pts)?;
    out.name = name;
    Ok(out)
}

/// Coordinates of generic points are drawn from [-GENERIC_BOX, GENERIC_BOX].
pub const GENERIC_BOX: i64 = 1000;

const GENERIC_DRAWS: usize = 10_000;

/// k random rational points in linearly general position whose Hilbert
/// function is also maximal, h_Z(d) = min{C(n+d, n), k}.
pub fn build_generic(k: usize, n: usize, seed: u64) -> Result<Configuration> {
    if k < 1 || n < 1 {
        return Err(ArrError::usage("need k ≥ 1 and n ≥ 1"));
    }
    let f = Field::rationals();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cfg = Configuration::new(&f, n, Vec::new())?;
    let mut draws = 0;
    while cfg.len() < k {
        draws += 1;
        if draws > GENERIC_DRAWS {
            return Err(ArrError::Environment(format!(
                "could not place {k} generic points (seed {seed})"
            )));
        }
        let c: Vec<i64> = (0..=n).map(|_| rng.gen_range(-GENERIC_BOX..=GENERIC_BOX)).collect();
        let Ok(p) = ProjectivePoint::from_ints(&f, &c) else {
            continue;
        };
        let Ok(next) = cfg.with_point(p) else {
            continue;
        };
        let all: Vec<usize> = (0..next.len()).collect();
        if !in_general_position(&next, &all) || !maximal_hilbert(&next) {
            continue;
        }
        cfg = next;
    }
    Ok(cfg.with_name(format!("generic-{k}-{n}-{seed}")))
}

fn maximal_hilbert(cfg: &Configuration) -> bool {
    let n = cfg.ambient_dim() as u64;
    let k = cfg.len() as u64;
    let mut d = 0u32;
    loop {
        let full = binomial(n + d as u64, n);
        if hilbert(cfg, d) as u64 != full.min(k) {
            return false;
        }
        if full >= k {
            return true;
        }
        d += 1;
    }
}

/// Scalar literal as written in a file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Text(String),
    Int(i64),
}

/// On-disk configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub field: FieldSpec,
    pub ambient_dim: usize,
    pub points: Vec<Vec<Literal>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Free-form description of where the configuration comes from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl ConfigFile {
    pub fn from_config(cfg: &Configuration) -> Self {
        let f = cfg.field();
        ConfigFile {
            field: f.spec().clone(),
            ambient_dim: cfg.ambient_dim(),
            points: cfg
                .points()
                .iter()
                .map(|p| p.coords.iter().map(|c| Literal::Text(f.format(c))).collect())
                .collect(),
            name: cfg.name.clone(),
            source: None,
        }
    }
}

/// Pretty JSON text of a configuration.
pub fn to_json(cfg: &Configuration) -> String {
    let mut s = serde_json::to_string_pretty(&ConfigFile::from_config(cfg)).expect("serializable");
    s.push('\n');
    s
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before, |i| &before[i + 1..]).chars().count() + 1;
    (line, col)
}

/// Byte offsets of the scalar tokens inside the "points" array, in order.
/// String tokens point just past the opening quote.
fn point_token_offsets(text: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let Some(key) = text.find("\"points\"") else {
        return out;
    };
    let bytes = text.as_bytes();
    let mut i = key + "\"points\"".len();
    while i < bytes.len() && bytes[i] != b'[' {
        i += 1;
    }
    let mut depth = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'[' => depth += 1,
            b']' => {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
            b'"' => {
                out.push(i + 1);
                i += 1;
                while i < bytes.len() && bytes[i] != b'"' {
                    if bytes[i] == b'\\' {
                        i += 1;
                    }
                    i += 1;
                }
            }
            b'-' | b'0'..=b'9' => {
                out.push(i);
                while i + 1 < bytes.len() && (bytes[i + 1] == b'-' || bytes[i + 1].is_ascii_alphanumeric()) {
                    i += 1;
                }
            }
            _ => {}
        }
        i += 1;
    }
    out
}

/// Parses a configuration file; errors carry line and column.
pub fn from_json(text: &str) -> Result<Configuration> {
    let file: ConfigFile =
        serde_json::from_str(text).map_err(|e| ArrError::parse(e.line(), e.column(), e.to_string()))?;
    let field = Field::new(file.field.clone())?;
    let offsets = point_token_offsets(text);
    let mut coords = Vec::with_capacity(file.points.len());
    let mut flat = 0;
    for (i, row) in file.points.iter().enumerate() {
        let mut c = Vec::with_capacity(row.len());
        for (j, lit) in row.iter().enumerate() {
            let parsed = match lit {
                Literal::Text(s) => field.parse(s),
                Literal::Int(v) => Ok(field.from_i64(*v)),
            };
            match parsed {
                Ok(x) => c.push(x),
                Err(ArrError::Parse { column, message, .. }) => {
                    let (line, col) = offsets.get(flat).map_or((1, 1), |&o| line_col(text, o));
                    return Err(ArrError::parse(
                        line,
                        col + column - 1,
                        format!("point {i}, coordinate {j}: {message}"),
                    ));
                }
                Err(e) => return Err(e),
            }
            flat += 1;
        }
        coords.push(c);
    }
    let mut cfg = Configuration::from_coords(&field, file.ambient_dim, coords)?;
    cfg.name = file.name;
    Ok(cfg)
}
