//! Property tests for the structural invariants.

mod common;

use std::collections::BTreeSet;

use arrlab::classify::{balanced, chern_unexpected_degrees, degree_table, lp_algebraic};
use arrlab::conditions::{Block, ExcSolver};
use arrlab::configlib::{build_ceva_extended, build_projective_space, from_json, to_json};
use arrlab::geometry::{closure, enumerate_flats, l_p_count, span_dim, Configuration, PointRef, ProjectivePoint};
use arrlab::idealdims::{hilbert, regularity, splitting_analysis, DEFAULT_SEEDS};
use arrlab::poly::binomial;
use arrlab::scalar::{Field, FieldSpec, Scalar};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn fields() -> Vec<Field> {
    vec![
        Field::rationals(),
        Field::cyclotomic(5).unwrap(),
        Field::cyclotomic(12).unwrap(),
        Field::finite(3, 2).unwrap(),
        Field::finite(7, 1).unwrap(),
    ]
}

/// Random element: Σ (a_k / b_k) ζ^k over cyclotomic fields, a/b over ℚ,
/// uniform over finite fields.
fn scalar(f: &Field, seed: u64) -> Scalar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frac = |rng: &mut ChaCha8Rng| {
        let den = f.from_i64(rng.gen_range(1..=9));
        f.div(&f.random(rng, 50), &den).unwrap()
    };
    match f.spec() {
        FieldSpec::Cyclotomic { m } => (0..*m as i64).fold(f.zero(), |acc, k| {
            f.add(&acc, &f.mul(&frac(&mut rng), &f.zeta_power(k).unwrap()))
        }),
        FieldSpec::Rationals => frac(&mut rng),
        FieldSpec::Finite { .. } => f.random(&mut rng, 0),
    }
}

fn planar() -> impl Strategy<Value = Configuration> {
    (0u64..1 << 32).prop_map(|s| random_planar(s, 8))
}

fn spatial() -> impl Strategy<Value = Configuration> {
    (0u64..1 << 32).prop_map(|s| random_config(s, 3, 8, 1))
}

fn union(a: &Block, b: &Block) -> Vec<usize> {
    let mut v: Vec<usize> = a.indices.iter().chain(&b.indices).copied().collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(fi in 0usize..5, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let f = &fields()[fi];
        let (a, b, c) = (scalar(f, a), scalar(f, b), scalar(f, c));
        prop_assert_eq!(f.mul(&f.add(&a, &b), &c), f.add(&f.mul(&a, &c), &f.mul(&b, &c)));
        prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
        prop_assert_eq!(f.sub(&f.add(&a, &b), &b), a.clone());
        if !f.is_zero(&a) {
            prop_assert!(f.is_one(&f.mul(&a, &f.inv(&a).unwrap())));
        }
        prop_assert_eq!(f.parse(&f.format(&a)).unwrap(), a);
    }

    #[test]
    fn projective_normal_form(fi in 0usize..5, seeds in prop::array::uniform4(any::<u64>())) {
        let f = &fields()[fi];
        let coords: Vec<Scalar> = seeds[..3].iter().map(|&s| scalar(f, s)).collect();
        prop_assume!(coords.iter().any(|c| !f.is_zero(c)));
        let k = scalar(f, seeds[3]);
        prop_assume!(!f.is_zero(&k));
        let scaled: Vec<Scalar> = coords.iter().map(|c| f.mul(c, &k)).collect();
        prop_assert_eq!(ProjectivePoint::new(f, coords).unwrap(), ProjectivePoint::new(f, scaled).unwrap());
    }

    #[test]
    fn flats_are_closed(z in prop_oneof![planar(), spatial()]) {
        for h in enumerate_flats(&z, z.ambient_dim() - 1).unwrap() {
            prop_assert_eq!(span_dim(&z, &h.indices).unwrap(), h.dim);
            prop_assert_eq!(closure(&z, &h.indices).unwrap().indices, h.indices.clone());
            prop_assert!(h.dim < z.ambient_dim());
        }
    }

    #[test]
    fn exc_witnesses(z in prop_oneof![planar(), spatial()], d in 1u32..6) {
        let solver = ExcSolver::new(&z).unwrap();
        let n = z.ambient_dim() as u64;
        let r = solver.exc(d).unwrap();
        prop_assert_eq!(r.witness.iter().map(|b| b.cost(d)).sum::<u64>(), r.value);
        let covered: BTreeSet<usize> = r.witness.iter().flat_map(|b| b.indices.clone()).collect();
        prop_assert_eq!(covered.len(), z.len());
        prop_assert!(r.value <= (n * d as u64 + 1).min(z.len() as u64));
        if balanced(&z).unwrap() {
            prop_assert_eq!(r.value, (n * d as u64 + 1).min(z.len() as u64));
        }
        let bl = solver.exbl(d).unwrap();
        prop_assert_eq!(bl.cost(), r.value);
        for (i, a) in bl.blocks.iter().enumerate() {
            for b in &bl.blocks[i + 1..] {
                let joined = union(a, b);
                let dim = span_dim(&z, &joined).unwrap();
                // Coarsest: merging strictly increases the cost.
                prop_assert!(d as u64 * dim as u64 + 1 > a.cost(d) + b.cost(d));
                // Spans of distinct blocks are disjoint.
                prop_assert_eq!(dim, a.dim + b.dim + 1);
            }
        }
    }

    #[test]
    fn hilbert_and_regularity(z in prop_oneof![planar(), spatial()]) {
        let n = z.ambient_dim() as u64;
        let mut prev = 0;
        let mut first_full = None;
        for d in 0..=z.len() as u32 {
            let h = hilbert(&z, d);
            prop_assert!(h >= prev);
            prop_assert!(h as u64 <= binomial(n + d as u64, n).min(z.len() as u64));
            if h == z.len() && first_full.is_none() {
                first_full = Some(d);
            }
            prev = h;
        }
        prop_assert_eq!(Some(regularity(&z).unwrap()), first_full.map(|r| r + 1));
    }

    #[test]
    fn splitting_sums(z in prop_oneof![planar(), spatial()]) {
        let s = splitting_analysis(&z, &DEFAULT_SEEDS).unwrap().splitting;
        prop_assert_eq!(s.0.len(), z.ambient_dim());
        prop_assert_eq!(s.sum(), z.len() as u64 - 1);
        prop_assert!(s.0.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(s.first() >= 1);
    }

    #[test]
    fn classification_invariants(z in prop_oneof![planar(), spatial()]) {
        let s = splitting_analysis(&z, &DEFAULT_SEEDS).unwrap().splitting;
        let t = degree_table(&z, z.len() as u32 + 1, &DEFAULT_SEEDS).unwrap();
        let (u, v) = (t.unexpected(), t.very_unexpected());
        prop_assert!(v.is_subset(&u));
        if z.ambient_dim() == 2 {
            prop_assert_eq!(&u, &v);
        }
        for &d in &v {
            prop_assert!(s.first() < d && d < s.last());
        }
        // A non-unexpected degree next to a very unexpected one is a splitting degree.
        for d in 2..=z.len() as u32 {
            if !v.contains(&d) && (v.contains(&(d - 1)) || v.contains(&(d + 1))) {
                prop_assert!(s.0.contains(&d), "d = {} not in {}", d, s);
            }
        }
        if balanced(&z).unwrap() {
            let window: BTreeSet<u32> = (s.first() + 1..s.last()).filter(|&d| d >= 2).collect();
            prop_assert_eq!(v, window);
        }
    }

    #[test]
    fn chern_degrees_are_unexpected(z in planar()) {
        if let Some(chern) = chern_unexpected_degrees(&z).unwrap() {
            let t = degree_table(&z, z.len() as u32 + 1, &DEFAULT_SEEDS).unwrap();
            prop_assert!(chern.is_subset(&t.unexpected()), "{:?} vs {:?}", chern, t.unexpected());
        }
    }

    #[test]
    fn lines_through_points(z in planar()) {
        for i in 0..z.len() {
            let p = PointRef::Index(i);
            prop_assert_eq!(lp_algebraic(&z, &p).unwrap() as usize, l_p_count(&z, &p).unwrap());
        }
    }

    #[test]
    fn json_round_trip(z in prop_oneof![planar(), spatial()]) {
        let back = from_json(&to_json(&z)).unwrap();
        prop_assert_eq!(back.points(), z.points());
        prop_assert_eq!(back.ambient_dim(), z.ambient_dim());
    }
}

#[test]
fn json_round_trip_other_fields() {
    for z in [
        build_ceva_extended(5, 2).unwrap(),
        build_ceva_extended(4, 3).unwrap(),
        build_projective_space(4, 2).unwrap(),
    ] {
        let back = from_json(&to_json(&z)).unwrap();
        assert_eq!(back.points(), z.points());
        assert_eq!(back.field().spec(), z.field().spec());
    }
}
