//! Exact coefficient fields: ℚ, cyclotomic fields ℚ(ζ_m), and finite fields
//! 𝔽_p, 𝔽_{p^k}.
//!
//! A [`Field`] is a cheap-to-clone handle holding the precomputed reduction
//! polynomial. A [`Scalar`] is a plain value in canonical form, so equality
//! of field elements is equality of representations. All operations go
//! through the field handle: `field.mul(&a, &b)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ArrError, Result};

/// Serializable description of a coefficient field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldSpec {
    Rationals,
    Cyclotomic {
        m: u32,
    },
    Finite {
        p: u64,
        #[serde(default = "default_k")]
        k: u32,
        /// Monic modulus, coefficients from the constant term upward
        /// (length k+1). Filled in automatically when absent and k > 1.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<Vec<u64>>,
    },
}

fn default_k() -> u32 {
    1
}

/// Field element in canonical form.
///
/// `Cyc` holds exactly φ(m) coefficients (residue mod Φ_m), `Fin` exactly
/// k coefficients in `0..p` (residue mod the field modulus).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Cyc(Vec<BigRational>),
    Fin(Vec<u64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug)]
enum Repr {
    Rat,
    /// Φ_m with integer coefficients, constant term first, monic.
    Cyc {
        m: u32,
        phi: Vec<BigInt>,
    },
    /// Monic modulus over 𝔽_p, constant term first (length k+1).
    Fin {
        p: u64,
        modulus: Vec<u64>,
    },
}

#[derive(Debug)]
struct Inner {
    spec: FieldSpec,
    repr: Repr,
}

/// Handle to a concrete field. Cloning shares the precomputed data.
#[derive(Clone, Debug)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.spec {
            FieldSpec::Rationals => write!(f, "QQ"),
            FieldSpec::Cyclotomic { m } => write!(f, "QQ(zeta_{m})"),
            FieldSpec::Finite { p, k, .. } if *k == 1 => write!(f, "GF({p})"),
            FieldSpec::Finite { p, k, .. } => write!(f, "GF({p}^{k})"),
        }
    }
}

// ===================== integer and prime-field helpers =====================

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    // Miller-Rabin with these bases is deterministic below 3.3e24.
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &b in &BASES {
        let mut x = powmod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Euler's totient by trial factorization.
pub fn euler_phi(mut m: u64) -> u64 {
    let mut result = m;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            while m.is_multiple_of(d) {
                m /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Returns `(p, e)` with `q = p^e`, or `None` when q is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut e = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    Some(powmod(a, p - 2, p))
}

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    fp_trim(&mut out);
    out
}

/// Division with remainder over 𝔽_p; `b` must be nonzero after trimming.
fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let mut b = b.to_vec();
    fp_trim(&mut b);
    let db = b.len() - 1;
    let lead_inv = invmod(b[db], p).expect("nonzero leading coefficient");
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    for k in (db..r.len()).rev() {
        let c = mulmod(r[k], lead_inv, p);
        if c == 0 {
            continue;
        }
        q[k - db] = c;
        for j in 0..=db {
            let t = mulmod(c, b[j], p);
            r[k - db + j] = (r[k - db + j] + p - t) % p;
        }
    }
    fp_trim(&mut q);
    fp_trim(&mut r);
    (q, r)
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    fp_trim(&mut out);
    out
}

/// Inverse of `a` modulo the irreducible `modulus` over 𝔽_p.
fn fp_poly_inverse(a: &[u64], modulus: &[u64], p: u64) -> Option<Vec<u64>> {
    // Extended Euclid tracking only the coefficient of `a`.
    let (mut r0, mut r1) = (modulus.to_vec(), a.to_vec());
    fp_trim(&mut r1);
    if r1.is_empty() {
        return None;
    }
    let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    // r0 is a nonzero constant when gcd = 1.
    if r0.len() != 1 {
        return None;
    }
    let c = invmod(r0[0], p)?;
    Some(s0.iter().map(|&x| mulmod(x, c, p)).collect())
}

/// Irreducibility over 𝔽_p by trial division against every monic
/// polynomial of degree 1..=deg/2.
pub fn is_irreducible_fp(f: &[u64], p: u64) -> bool {
    let mut f = f.to_vec();
    fp_trim(&mut f);
    if f.len() < 2 {
        return false;
    }
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u128).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                g.push((x % p as u128) as u64);
                x /= p as u128;
            }
            g.push(1);
            let (_, r) = fp_divrem(&f, &g, p);
            if r.is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically first monic irreducible of degree k over 𝔽_p, where
/// the order compares coefficient vectors from the constant term upward
/// interpreted as base-p integers.
pub fn first_irreducible(p: u64, k: u32) -> Vec<u64> {
    let k = k as usize;
    let count = (p as u128).pow(k as u32);
    for idx in 0..count {
        let mut g = Vec::with_capacity(k + 1);
        let mut x = idx;
        for _ in 0..k {
            g.push((x % p as u128) as u64);
            x /= p as u128;
        }
        g.push(1);
        if is_irreducible_fp(&g, p) {
            return g;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

// ===================== cyclotomic polynomial helpers =====================

fn int_poly_divexact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    // b is monic
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (db..r.len()).rev() {
        let c = r[k].clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=db {
            r[k - db + j] -= &c * &b[j];
        }
        q[k - db] = c;
    }
    debug_assert!(r.iter().all(|x| x.is_zero()));
    q
}

/// The m-th cyclotomic polynomial, constant term first, via
/// Φ_m = (z^m − 1) / ∏_{d | m, d < m} Φ_d.
pub fn cyclotomic_poly(m: u32) -> Vec<BigInt> {
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = int_poly_divexact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn rat_trim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn rat_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    rat_trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = &b[db];
    let mut q = vec![BigRational::zero(); r.len() - db];
    for k in (db..r.len()).rev() {
        if r[k].is_zero() {
            continue;
        }
        let c = &r[k] / lead;
        for j in 0..=db {
            let t = &c * &b[j];
            r[k - db + j] -= t;
        }
        q[k - db] = c;
    }
    rat_trim(&mut q);
    rat_trim(&mut r);
    (q, r)
}

fn rat_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    rat_trim(&mut out);
    out
}

fn rat_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    let mut out: Vec<BigRational> = (0..n)
        .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
        .collect();
    rat_trim(&mut out);
    out
}

// ===================== literal parsing =====================

/// A parsed literal: a list of (coefficient, exponent) monomials in one
/// optional variable.
struct ParsedPoly {
    terms: Vec<(BigRational, u32)>,
}

struct LitParser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    var: Option<char>,
    src: &'a str,
}

impl<'a> LitParser<'a> {
    fn new(src: &'a str, var: Option<char>) -> Self {
        let chars = src.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect();
        LitParser {
            chars,
            pos: 0,
            var,
            src,
        }
    }

    fn err(&self, msg: &str) -> ArrError {
        let column = self
            .chars
            .get(self.pos)
            .map(|(i, _)| i + 1)
            .unwrap_or(self.src.chars().count() + 1);
        ArrError::parse(1, column, format!("{msg} in scalar literal {:?}", self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        Ok(s.parse::<BigInt>().expect("digits"))
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() == Some('^') {
            self.bump();
            let e = self.uint()?;
            e.to_u32().ok_or_else(|| self.err("exponent too large"))
        } else {
            Ok(1)
        }
    }

    fn term(&mut self) -> Result<(BigRational, u32)> {
        let mut coeff = BigRational::one();
        let mut saw_number = false;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let n = self.uint()?;
            let mut c = BigRational::from_integer(n);
            if self.peek() == Some('/') {
                self.bump();
                let d = self.uint()?;
                if d.is_zero() {
                    return Err(self.err("zero denominator"));
                }
                c /= BigRational::from_integer(d);
            }
            coeff = c;
            saw_number = true;
            if self.peek() == Some('*') {
                self.bump();
                return self.var_part(coeff);
            }
        }
        match (self.peek(), self.var) {
            (Some(c), Some(v)) if c == v => self.var_part(coeff),
            _ if saw_number => Ok((coeff, 0)),
            _ => Err(self.err("expected a number or variable")),
        }
    }

    fn var_part(&mut self, coeff: BigRational) -> Result<(BigRational, u32)> {
        match (self.peek(), self.var) {
            (Some(c), Some(v)) if c == v => {
                self.bump();
                let e = self.exponent()?;
                Ok((coeff, e))
            }
            _ => Err(self.err("expected variable")),
        }
    }

    fn parse(mut self) -> Result<ParsedPoly> {
        let mut terms = Vec::new();
        if self.chars.is_empty() {
            return Err(self.err("empty literal"));
        }
        let mut first = true;
        loop {
            let mut sign = 1;
            match self.peek() {
                Some('+') => {
                    self.bump();
                }
                Some('-') => {
                    sign = -1;
                    self.bump();
                }
                _ if !first => return Err(self.err("expected '+' or '-'")),
                _ => {}
            }
            let (c, e) = self.term()?;
            terms.push((if sign < 0 { -c } else { c }, e));
            first = false;
            if self.peek().is_none() {
                break;
            }
        }
        Ok(ParsedPoly { terms })
    }
}

// ===================== the field handle =====================

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Field> {
        let (spec, repr) = match spec {
            FieldSpec::Rationals => (FieldSpec::Rationals, Repr::Rat),
            FieldSpec::Cyclotomic { m } => {
                if m < 2 {
                    return Err(ArrError::usage("cyclotomic order m must be at least 2"));
                }
                let phi = cyclotomic_poly(m);
                (FieldSpec::Cyclotomic { m }, Repr::Cyc { m, phi })
            }
            FieldSpec::Finite { p, k, modulus } => {
                if !is_prime(p) {
                    return Err(ArrError::usage(format!("{p} is not prime")));
                }
                if k == 0 {
                    return Err(ArrError::usage("extension degree k must be positive"));
                }
                let modulus = match modulus {
                    _ if k == 1 => None,
                    Some(f) => {
                        if f.len() != k as usize + 1 || f[k as usize] != 1 || f.iter().any(|&c| c >= p) {
                            return Err(ArrError::usage(format!(
                                "modulus must be monic of degree {k} with coefficients in 0..{p}"
                            )));
                        }
                        if !is_irreducible_fp(&f, p) {
                            return Err(ArrError::usage("modulus is reducible"));
                        }
                        Some(f)
                    }
                    None => Some(first_irreducible(p, k)),
                };
                let poly = modulus.clone().unwrap_or_else(|| vec![0, 1]);
                (FieldSpec::Finite { p, k, modulus }, Repr::Fin { p, modulus: poly })
            }
        };
        Ok(Field(Arc::new(Inner { spec, repr })))
    }

    pub fn rationals() -> Field {
        Field::new(FieldSpec::Rationals).expect("QQ")
    }

    pub fn cyclotomic(m: u32) -> Result<Field> {
        Field::new(FieldSpec::Cyclotomic { m })
    }

    pub fn finite(p: u64, k: u32) -> Result<Field> {
        Field::new(FieldSpec::Finite { p, k, modulus: None })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    /// 0 for characteristic zero, otherwise the prime p.
    pub fn characteristic(&self) -> u64 {
        match &self.0.repr {
            Repr::Fin { p, .. } => *p,
            _ => 0,
        }
    }

    /// Number of elements, or `None` for infinite fields.
    pub fn order(&self) -> Option<u128> {
        match &self.0.repr {
            Repr::Fin { p, modulus } => Some((*p as u128).pow(modulus.len() as u32 - 1)),
            _ => None,
        }
    }

    /// Dimension of the stored coefficient vector.
    fn width(&self) -> usize {
        match &self.0.repr {
            Repr::Rat => 1,
            Repr::Cyc { phi, .. } => phi.len() - 1,
            Repr::Fin { modulus, .. } => modulus.len() - 1,
        }
    }

    /// True when `a` has the representation shape of this field.
    pub fn contains(&self, a: &Scalar) -> bool {
        match (&self.0.repr, a) {
            (Repr::Rat, Scalar::Rat(_)) => true,
            (Repr::Cyc { .. }, Scalar::Cyc(v)) => v.len() == self.width(),
            (Repr::Fin { p, .. }, Scalar::Fin(v)) => v.len() == self.width() && v.iter().all(|c| c < p),
            _ => false,
        }
    }

    pub fn zero(&self) -> Scalar {
        match &self.0.repr {
            Repr::Rat => Scalar::Rat(BigRational::zero()),
            Repr::Cyc { .. } => Scalar::Cyc(vec![BigRational::zero(); self.width()]),
            Repr::Fin { .. } => Scalar::Fin(vec![0; self.width()]),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match &self.0.repr {
            Repr::Rat => Scalar::Rat(BigRational::from_integer(n.clone())),
            Repr::Cyc { .. } => {
                let mut v = vec![BigRational::zero(); self.width()];
                v[0] = BigRational::from_integer(n.clone());
                Scalar::Cyc(v)
            }
            Repr::Fin { p, .. } => {
                let r = n.mod_floor(&BigInt::from(*p)).to_u64().expect("reduced");
                let mut v = vec![0; self.width()];
                v[0] = r;
                Scalar::Fin(v)
            }
        }
    }

    /// Image of a rational number; fails in characteristic p when the
    /// denominator vanishes.
    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar> {
        match &self.0.repr {
            Repr::Rat => Ok(Scalar::Rat(q.clone())),
            Repr::Cyc { .. } => {
                let mut v = vec![BigRational::zero(); self.width()];
                v[0] = q.clone();
                Ok(Scalar::Cyc(v))
            }
            Repr::Fin { .. } => {
                let n = self.from_bigint(q.numer());
                let d = self.from_bigint(q.denom());
                self.div(&n, &d)
            }
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(x) => x.is_zero(),
            Scalar::Cyc(v) => v.iter().all(|c| c.is_zero()),
            Scalar::Fin(v) => v.iter().all(|&c| c == 0),
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b, &self.0.repr) {
            (Scalar::Rat(x), Scalar::Rat(y), _) => Scalar::Rat(x + y),
            (Scalar::Cyc(x), Scalar::Cyc(y), _) => Scalar::Cyc(x.iter().zip(y).map(|(u, v)| u + v).collect()),
            (Scalar::Fin(x), Scalar::Fin(y), Repr::Fin { p, .. }) => {
                Scalar::Fin(x.iter().zip(y).map(|(&u, &v)| (u + v) % p).collect())
            }
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (a, &self.0.repr) {
            (Scalar::Rat(x), _) => Scalar::Rat(-x),
            (Scalar::Cyc(x), _) => Scalar::Cyc(x.iter().map(|u| -u).collect()),
            (Scalar::Fin(x), Repr::Fin { p, .. }) => Scalar::Fin(x.iter().map(|&u| (p - u) % p).collect()),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b, &self.0.repr) {
            (Scalar::Rat(x), Scalar::Rat(y), _) => Scalar::Rat(x - y),
            (Scalar::Cyc(x), Scalar::Cyc(y), _) => Scalar::Cyc(x.iter().zip(y).map(|(u, v)| u - v).collect()),
            (Scalar::Fin(x), Scalar::Fin(y), Repr::Fin { p, .. }) => {
                Scalar::Fin(x.iter().zip(y).map(|(&u, &v)| (u + p - v) % p).collect())
            }
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b, &self.0.repr) {
            (Scalar::Rat(x), Scalar::Rat(y), _) => Scalar::Rat(x * y),
            (Scalar::Cyc(x), Scalar::Cyc(y), Repr::Cyc { phi, .. }) => {
                let w = x.len();
                let mut prod = vec![BigRational::zero(); 2 * w - 1];
                for (i, u) in x.iter().enumerate() {
                    if u.is_zero() {
                        continue;
                    }
                    for (j, v) in y.iter().enumerate() {
                        if !v.is_zero() {
                            prod[i + j] += u * v;
                        }
                    }
                }
                Scalar::Cyc(reduce_cyclotomic(prod, phi))
            }
            (Scalar::Fin(x), Scalar::Fin(y), Repr::Fin { p, modulus }) => {
                let p = *p;
                if x.len() == 1 {
                    return Scalar::Fin(vec![mulmod(x[0], y[0], p)]);
                }
                let prod = fp_mul(x, y, p);
                Scalar::Fin(reduce_fp(prod, modulus, p))
            }
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    /// Checked binary operation: reports a field mismatch instead of
    /// panicking.
    pub fn arith(&self, op: ArithOp, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        if !self.contains(a) || !self.contains(b) {
            return Err(ArrError::usage(format!("operands do not belong to {self}")));
        }
        Ok(match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
        })
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        if self.is_zero(a) {
            return Err(ArrError::DivisionByZero);
        }
        Ok(match (a, &self.0.repr) {
            (Scalar::Rat(x), _) => Scalar::Rat(x.recip()),
            (Scalar::Cyc(x), Repr::Cyc { phi, .. }) => {
                let phi_r: Vec<BigRational> = phi.iter().map(|c| BigRational::from_integer(c.clone())).collect();
                let mut a = x.clone();
                rat_trim(&mut a);
                // Extended Euclid tracking the coefficient of `a`.
                let (mut r0, mut r1) = (phi_r, a);
                let (mut s0, mut s1): (Vec<BigRational>, Vec<BigRational>) = (Vec::new(), vec![BigRational::one()]);
                while !r1.is_empty() {
                    let (q, r) = rat_divrem(&r0, &r1);
                    let s2 = rat_sub(&s0, &rat_mul(&q, &s1));
                    r0 = std::mem::replace(&mut r1, r);
                    s0 = std::mem::replace(&mut s1, s2);
                }
                let c = r0[0].recip();
                let v: Vec<BigRational> = s0.iter().map(|x| x * &c).collect();
                Scalar::Cyc(reduce_cyclotomic(v, phi))
            }
            (Scalar::Fin(x), Repr::Fin { p, modulus }) => {
                if x.len() == 1 {
                    return Ok(Scalar::Fin(vec![invmod(x[0], *p).expect("nonzero")]));
                }
                let inv = fp_poly_inverse(x, modulus, *p).expect("field modulus is irreducible");
                Scalar::Fin(reduce_fp(inv, modulus, *p))
            }
            _ => panic!("scalar does not belong to {self}"),
        })
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Scalar, mut e: u64) -> Scalar {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// ζ^k for the primitive m-th root of unity ζ = z of a cyclotomic field.
    pub fn zeta_power(&self, k: i64) -> Result<Scalar> {
        match &self.0.repr {
            Repr::Cyc { m, phi } => {
                let e = k.rem_euclid(*m as i64) as usize;
                let mut v = vec![BigRational::zero(); e + 1];
                v[e] = BigRational::one();
                let w = phi.len() - 1;
                if v.len() < w {
                    v.resize(w, BigRational::zero());
                }
                Ok(Scalar::Cyc(reduce_cyclotomic(v, phi)))
            }
            _ => Err(ArrError::usage(format!(
                "zeta_power needs a cyclotomic field, got {self}"
            ))),
        }
    }

    /// The generator of the field over its prime field: ζ for ℚ(ζ_m), t for
    /// 𝔽_{p^k} with k > 1, and 1 otherwise.
    pub fn generator(&self) -> Scalar {
        match &self.0.repr {
            Repr::Cyc { .. } => self.zeta_power(1).expect("cyclotomic"),
            Repr::Fin { modulus, .. } if modulus.len() > 2 => {
                let mut v = vec![0; self.width()];
                v[1] = 1;
                Scalar::Fin(v)
            }
            _ => self.one(),
        }
    }

    fn combine_terms(&self, terms: &[(BigRational, u32)]) -> Result<Scalar> {
        let gen = self.generator();
        let mut acc = self.zero();
        for (c, e) in terms {
            let c = self.from_rational(c)?;
            let t = self.mul(&c, &self.pow(&gen, *e as u64));
            acc = self.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Parses the scalar literal grammar: `-12`, `3/4`, `1 - z + 2/3*z^2`
    /// (cyclotomic), `t^2 + 1` (𝔽_{p^k}, k > 1). Whitespace is ignored.
    pub fn parse(&self, src: &str) -> Result<Scalar> {
        let var = match &self.0.repr {
            Repr::Rat => None,
            Repr::Cyc { .. } => Some('z'),
            Repr::Fin { modulus, .. } if modulus.len() > 2 => Some('t'),
            Repr::Fin { .. } => None,
        };
        let parsed = LitParser::new(src, var).parse()?;
        self.combine_terms(&parsed.terms).map_err(|e| match e {
            ArrError::DivisionByZero => ArrError::parse(
                1,
                1,
                format!(
                    "denominator vanishes in characteristic {} in {src:?}",
                    self.characteristic()
                ),
            ),
            other => other,
        })
    }

    /// Canonical literal; `parse(format(a)) == a`.
    pub fn format(&self, a: &Scalar) -> String {
        let var = match &self.0.repr {
            Repr::Cyc { .. } => "z",
            _ => "t",
        };
        match a {
            Scalar::Rat(x) => x.to_string(),
            Scalar::Cyc(v) => format_poly(v.to_vec(), var),
            Scalar::Fin(v) => format_poly(
                v.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect(),
                var,
            ),
        }
    }

    /// Draws a random element: an integer in `[-bound, bound]` in
    /// characteristic zero, a uniform element in characteristic p.
    pub fn random<R: Rng>(&self, rng: &mut R, bound: i64) -> Scalar {
        match &self.0.repr {
            Repr::Fin { p, .. } => Scalar::Fin((0..self.width()).map(|_| rng.gen_range(0..*p)).collect()),
            _ => self.from_i64(rng.gen_range(-bound..=bound)),
        }
    }

    /// Field used when sampling generic linear subspaces: the field itself
    /// in characteristic zero, otherwise the smallest 𝔽_{p^K} with k | K
    /// and p^K > 10^6, together with the embedding.
    pub fn generic_extension(&self) -> Result<Embedding> {
        match &self.0.spec {
            FieldSpec::Finite { p, k, .. } => {
                let mut big_k = *k;
                while (*p as u128).pow(big_k) <= 1_000_000 {
                    big_k += *k;
                }
                if big_k == *k {
                    return self.embedding_into(self);
                }
                let target = Field::finite(*p, big_k)?;
                self.embedding_into(&target)
            }
            _ => self.embedding_into(self),
        }
    }

    /// Embedding of this field into `target` when one exists: ℚ into any
    /// characteristic-zero field, ℚ(ζ_a) into ℚ(ζ_b) for a | b via
    /// ζ_a ↦ ζ_b^{b/a}, 𝔽_{p^k} into 𝔽_{p^K} for k | K.
    pub fn embedding_into(&self, target: &Field) -> Result<Embedding> {
        let fail = || ArrError::usage(format!("no embedding of {self} into {target}"));
        let image = match (&self.0.spec, &target.0.spec) {
            (FieldSpec::Rationals, FieldSpec::Rationals | FieldSpec::Cyclotomic { .. }) => None,
            (FieldSpec::Cyclotomic { m: a }, FieldSpec::Cyclotomic { m: b }) => {
                if b % a != 0 {
                    return Err(fail());
                }
                Some(target.zeta_power((b / a) as i64)?)
            }
            (FieldSpec::Cyclotomic { m: 2 }, FieldSpec::Rationals) => None,
            (FieldSpec::Finite { p: p1, k: k1, .. }, FieldSpec::Finite { p: p2, k: k2, .. }) => {
                if p1 != p2 || k2 % k1 != 0 {
                    return Err(fail());
                }
                if self == target || *k1 == 1 {
                    None
                } else {
                    Some(find_root_in(self, target)?)
                }
            }
            _ => return Err(fail()),
        };
        Ok(Embedding {
            source: self.clone(),
            target: target.clone(),
            image,
        })
    }
}

fn format_poly(coeffs: Vec<BigRational>, var: &str) -> String {
    let mut out = String::new();
    for (e, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        if e == 0 {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{abs}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn reduce_cyclotomic(mut v: Vec<BigRational>, phi: &[BigInt]) -> Vec<BigRational> {
    let w = phi.len() - 1;
    for k in (w..v.len()).rev() {
        if v[k].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut v[k], BigRational::zero());
        for (j, f) in phi[..w].iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let idx = k - w + j;
            if f.is_one() {
                v[idx] -= &c;
            } else if (-f).is_one() {
                v[idx] += &c;
            } else {
                v[idx] -= &c * BigRational::from_integer(f.clone());
            }
        }
    }
    v.truncate(w);
    v.resize(w, BigRational::zero());
    v
}

fn reduce_fp(v: Vec<u64>, modulus: &[u64], p: u64) -> Vec<u64> {
    let w = modulus.len() - 1;
    let mut v = v;
    if v.len() > w {
        let (_, r) = fp_divrem(&v, modulus, p);
        v = r;
    }
    v.resize(w, 0);
    v
}

/// A root of the defining modulus of `small` inside `big`, found by mapping
/// random elements of `big` into the subfield of order |small| and testing.
/// Deterministic: the search uses a fixed seed.
fn find_root_in(small: &Field, big: &Field) -> Result<Scalar> {
    use rand::SeedableRng;
    let modulus = match &small.0.repr {
        Repr::Fin { modulus, .. } => modulus.clone(),
        _ => unreachable!(),
    };
    let q_small = small.order().expect("finite");
    let q_big = big.order().expect("finite");
    let exp = ((q_big - 1) / (q_small - 1)) as u64;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..200_000 {
        let a = big.random(&mut rng, 0);
        if big.is_zero(&a) {
            continue;
        }
        let s = big.pow(&a, exp);
        // Evaluate the modulus at s by Horner.
        let mut acc = big.zero();
        for &c in modulus.iter().rev() {
            acc = big.add(&big.mul(&acc, &s), &big.from_i64(c as i64));
        }
        if big.is_zero(&acc) {
            return Ok(s);
        }
    }
    Err(ArrError::Environment(format!(
        "no root of the {small} modulus found in {big}"
    )))
}

/// Field embedding determined by the image of the source generator.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub source: Field,
    pub target: Field,
    image: Option<Scalar>,
}

impl Embedding {
    pub fn is_identity(&self) -> bool {
        self.source == self.target
    }

    pub fn apply(&self, a: &Scalar) -> Scalar {
        if self.is_identity() {
            return a.clone();
        }
        let t = &self.target;
        let coeffs: Vec<Scalar> = match a {
            Scalar::Rat(x) => vec![t.from_rational(x).expect("characteristic zero")],
            Scalar::Cyc(v) => v
                .iter()
                .map(|c| t.from_rational(c).expect("characteristic zero"))
                .collect(),
            Scalar::Fin(v) => v.iter().map(|&c| t.from_i64(c as i64)).collect(),
        };
        match &self.image {
            None => coeffs[0].clone(),
            Some(g) => {
                let mut acc = t.zero();
                for c in coeffs.iter().rev() {
                    acc = t.add(&t.mul(&acc, g), c);
                }
                acc
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::Rat(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn rational_addition() {
        let f = Field::rationals();
        assert_eq!(f.add(&q(1, 2), &q(1, 3)), q(5, 6));
    }

    #[test]
    fn zeta4_squared_is_minus_one() {
        let f = Field::cyclotomic(4).unwrap();
        let z = f.zeta_power(1).unwrap();
        assert_eq!(f.mul(&z, &z), f.from_i64(-1));
    }

    #[test]
    fn prime_field_products_and_inverses() {
        let f = Field::finite(5, 1).unwrap();
        assert_eq!(f.mul(&f.from_i64(3), &f.from_i64(4)), f.from_i64(2));
        assert_eq!(f.inv(&f.from_i64(2)).unwrap(), f.from_i64(3));
        assert_eq!(f.inv(&f.zero()), Err(ArrError::DivisionByZero));
    }

    #[test]
    fn zeta_powers() {
        let f5 = Field::cyclotomic(5).unwrap();
        assert_eq!(f5.zeta_power(0).unwrap(), f5.one());
        let f2 = Field::cyclotomic(2).unwrap();
        assert_eq!(f2.zeta_power(1).unwrap(), f2.from_i64(-1));
        let f4 = Field::cyclotomic(4).unwrap();
        assert_eq!(f4.zeta_power(3).unwrap(), f4.neg(&f4.zeta_power(1).unwrap()));
        assert!(Field::rationals().zeta_power(1).is_err());
    }

    #[test]
    fn zeta_inverse_is_conjugate_power() {
        for m in 2..13 {
            let f = Field::cyclotomic(m).unwrap();
            let z = f.zeta_power(1).unwrap();
            assert_eq!(f.inv(&z).unwrap(), f.zeta_power(m as i64 - 1).unwrap());
        }
    }

    #[test]
    fn cyclotomic_polynomials() {
        let as_i64 = |m| -> Vec<i64> { cyclotomic_poly(m).iter().map(|c| c.to_i64().unwrap()).collect() };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(2), vec![1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(5), vec![1, 1, 1, 1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn extension_modulus_is_first_irreducible() {
        // t^2 + 1 is the first irreducible quadratic over F_3; t^2+t+1 over F_2.
        assert_eq!(first_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(first_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(first_irreducible(2, 3), vec![1, 1, 0, 1]);
        assert!(!is_irreducible_fp(&[1, 0, 1], 2));
    }

    #[test]
    fn extension_field_inverse() {
        let f = Field::finite(2, 4).unwrap();
        let t = f.generator();
        let mut x = f.one();
        for _ in 0..15 {
            x = f.mul(&x, &t);
            let y = f.inv(&x).unwrap();
            assert!(f.is_one(&f.mul(&x, &y)));
        }
        assert!(f.is_one(&x), "t has order dividing 15 in GF(16)");
    }

    #[test]
    fn parse_and_format_round_trip() {
        let f = Field::cyclotomic(5).unwrap();
        let a = f.parse("1 - z + 2/3*z^2").unwrap();
        assert_eq!(f.format(&a), "1 - z + 2/3*z^2");
        assert_eq!(f.parse(&f.format(&a)).unwrap(), a);
        // z^5 = 1 after reduction.
        assert_eq!(f.parse("z^5").unwrap(), f.one());
        let g = Field::finite(3, 2).unwrap();
        assert_eq!(g.parse("t^2").unwrap(), g.from_i64(-1));
        assert_eq!(Field::rationals().parse(" -12 ").unwrap(), q(-12, 1));
        assert_eq!(Field::rationals().parse("3/4").unwrap(), q(3, 4));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let f = Field::rationals();
        match f.parse("3/x") {
            Err(ArrError::Parse { column, .. }) => assert_eq!(column, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(f.parse("z").is_err());
        assert!(f.parse("").is_err());
        assert!(Field::finite(3, 1).unwrap().parse("1/3").is_err());
    }

    #[test]
    fn field_mismatch_is_usage_error() {
        let f = Field::cyclotomic(5).unwrap();
        let g = Field::rationals();
        assert!(matches!(
            f.arith(ArithOp::Add, &f.one(), &g.one()),
            Err(ArrError::Usage(_))
        ));
    }

    #[test]
    fn bad_specs_rejected() {
        assert!(Field::cyclotomic(1).is_err());
        assert!(Field::finite(6, 1).is_err());
        assert!(Field::new(FieldSpec::Finite {
            p: 2,
            k: 2,
            modulus: Some(vec![1, 0, 1])
        })
        .is_err());
    }

    #[test]
    fn embeddings() {
        let f = Field::cyclotomic(2).unwrap();
        let g = Field::cyclotomic(4).unwrap();
        let e = f.embedding_into(&g).unwrap();
        assert_eq!(e.apply(&f.zeta_power(1).unwrap()), g.from_i64(-1));
        let h = Field::cyclotomic(6).unwrap();
        let e3 = Field::cyclotomic(3).unwrap().embedding_into(&h).unwrap();
        let z3 = Field::cyclotomic(3).unwrap().zeta_power(1).unwrap();
        assert_eq!(e3.apply(&z3), h.zeta_power(2).unwrap());
        assert!(g.embedding_into(&h).is_err());
    }

    #[test]
    fn finite_generic_extension_embeds_subfield() {
        let f = Field::finite(2, 2).unwrap();
        let e = f.generic_extension().unwrap();
        assert!(e.target.order().unwrap() > 1_000_000);
        let t = f.generator();
        let img = e.apply(&t);
        // The image satisfies the source modulus t^2 + t + 1 = 0.
        let tgt = &e.target;
        let val = tgt.add(&tgt.add(&tgt.mul(&img, &img), &img), &tgt.one());
        assert!(tgt.is_zero(&val));
        // Multiplicative.
        let a = f.parse("t + 1").unwrap();
        assert_eq!(e.apply(&f.mul(&a, &t)), tgt.mul(&e.apply(&a), &img));
    }
}
