//! Unexpected and very unexpected degrees, balance, the planar bound suite
//! and the full analysis report.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::conditions::ExcSolver;
use crate::duality::{c2_combinatorial, DualModule};
use crate::error::{ArrError, Result};
use crate::geometry::{
    enumerate_flats, l_p_count, max_general_position_subset, spanned_lines, Configuration, PointRef, ProjectivePoint,
};
use crate::idealdims::{
    hilbert, regularity, splitting_analysis, splitting_with, GenericH, SplittingType, DEFAULT_SEEDS,
};

pub use crate::idealdims::lp_algebraic;

/// One degree of the analysis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeRow {
    pub d: u32,
    /// h_Z(d) = dim[R/I(Z)]_d.
    pub hilbert: usize,
    /// dim[I(Z) ∩ I(Q)^{d−1}]_d for generic Q.
    pub h: usize,
    pub exc: u64,
    pub unexpected: bool,
    pub very_unexpected: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeTable {
    pub rows: Vec<DegreeRow>,
    pub seeds: Vec<u64>,
    pub warnings: Vec<String>,
}

impl DegreeTable {
    pub fn unexpected(&self) -> BTreeSet<u32> {
        self.rows.iter().filter(|r| r.unexpected).map(|r| r.d).collect()
    }

    pub fn very_unexpected(&self) -> BTreeSet<u32> {
        self.rows.iter().filter(|r| r.very_unexpected).map(|r| r.d).collect()
    }
}

fn check_d_max(d_max: u32) -> Result<()> {
    if d_max < 2 {
        return Err(ArrError::usage("d_max must be at least 2"));
    }
    Ok(())
}

fn rows_from(cfg: &Configuration, d_max: u32, gh: &mut GenericH, solver: &ExcSolver) -> Result<Vec<DegreeRow>> {
    let n = cfg.ambient_dim() as i64;
    let mut rows = Vec::new();
    for d in 1..=d_max {
        let hz = hilbert(cfg, d);
        let h = gh.get(cfg, d)?;
        let exc = solver.exc(d)?.value;
        let naive = (n * d as i64 + 1 - hz as i64).max(0);
        let unexpected = d >= 2 && h as i64 > naive;
        let very_unexpected = d >= 2 && (n * d as i64 + 1) - (h as i64) < exc as i64;
        rows.push(DegreeRow {
            d,
            hilbert: hz,
            h,
            exc,
            unexpected,
            very_unexpected,
        });
    }
    Ok(rows)
}

/// Per-degree table for d = 1..=d_max.
pub fn degree_table(cfg: &Configuration, d_max: u32, seeds: &[u64]) -> Result<DegreeTable> {
    check_d_max(d_max)?;
    let solver = ExcSolver::new(cfg)?;
    let mut gh = GenericH::new(cfg, seeds)?;
    loop {
        let before = gh.seeds.len();
        let rows = rows_from(cfg, d_max, &mut gh, &solver)?;
        // A late extension of the sample changes earlier minima.
        if gh.seeds.len() == before {
            return Ok(DegreeTable {
                rows,
                seeds: gh.seeds.clone(),
                warnings: gh.warnings.clone(),
            });
        }
    }
}

/// Degrees 2 ≤ d ≤ d_max with h(d) > max{0, nd + 1 − h_Z(d)}.
pub fn unexpected_degrees(cfg: &Configuration, d_max: u32) -> Result<BTreeSet<u32>> {
    Ok(degree_table(cfg, d_max, &DEFAULT_SEEDS)?.unexpected())
}

/// Degrees 2 ≤ d ≤ d_max with (nd + 1) − h(d) < Ex.C(Z,d).
pub fn very_unexpected_degrees(cfg: &Configuration, d_max: u32) -> Result<BTreeSet<u32>> {
    Ok(degree_table(cfg, d_max, &DEFAULT_SEEDS)?.very_unexpected())
}

/// (|Z ∩ H| − 1)·n ≤ (|Z| − 1)·dim H for every flat H of dimension 1..n−1.
pub fn balanced(cfg: &Configuration) -> Result<bool> {
    if !cfg.is_spanning() {
        return Err(ArrError::usage("balance is defined for spanning configurations"));
    }
    let n = cfg.ambient_dim();
    let z = cfg.len();
    Ok(enumerate_flats(cfg, n.saturating_sub(1).max(1))?
        .iter()
        .filter(|h| h.dim >= 1 && h.dim < n)
        .all(|h| (h.len() - 1) * n <= (z - 1) * h.dim))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: u64,
    pub bound: u64,
    pub holds: bool,
    pub sharp: bool,
    /// False when `value` is only a lower bound.
    pub exact: bool,
    /// The bound relies on the irreducibility proxy.
    pub conditional: bool,
}

impl BoundCheck {
    fn new(name: &str, value: u64, bound: u64) -> Self {
        BoundCheck {
            name: name.to_string(),
            value,
            bound,
            holds: value <= bound,
            sharp: value == bound,
            exact: true,
            conditional: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub applicable: bool,
    /// Minimal unexpected degree.
    pub degree: Option<u32>,
    /// dim[I^≫]_d = 1 and ε_P(F) ≠ 0 for every P ∈ Z.
    pub irreducible_proxy: Option<bool>,
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn irreducible_proxy(module: &DualModule, d: u32) -> Result<bool> {
    let space = module.space(d)?;
    if space.dim() != 1 {
        return Ok(false);
    }
    let cfg = module.config();
    let id = cfg.field().embedding_into(cfg.field())?;
    for p in cfg.points() {
        let img = space.evaluate_rows(&id, std::slice::from_ref(&p.coords))?;
        if img[0].is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn bounds_from(cfg: &Configuration, unexpected: &BTreeSet<u32>, module: &DualModule) -> Result<BoundsReport> {
    let Some(&d) = unexpected.iter().next() else {
        return Ok(BoundsReport {
            applicable: false,
            degree: None,
            irreducible_proxy: None,
            checks: Vec::new(),
        });
    };
    let d64 = d as u64;
    let proxy = irreducible_proxy(module, d)?;
    let mut checks = vec![BoundCheck::new("points", cfg.len() as u64, 3 * d64 - 3)];
    let mgp = max_general_position_subset(cfg);
    let mut c = BoundCheck::new("general_position", mgp.size as u64, d64 + 1);
    c.exact = mgp.exact;
    checks.push(c);
    if d % 2 == 0 && proxy {
        let mut c = BoundCheck::new("general_position_even", mgp.size as u64, d64);
        c.exact = mgp.exact;
        c.conditional = true;
        checks.push(c);
    }
    checks.push(BoundCheck::new(
        "lines",
        spanned_lines(cfg)?.len() as u64,
        d64 * d64 - d64 + 1,
    ));
    let mut lp = 0;
    for i in 0..cfg.len() {
        lp = lp.max(l_p_count(cfg, &PointRef::Index(i))?);
    }
    checks.push(BoundCheck::new("max_lp", lp as u64, d64));
    Ok(BoundsReport {
        applicable: true,
        degree: Some(d),
        irreducible_proxy: Some(proxy),
        checks,
    })
}

/// Planar bounds at the minimal unexpected degree, searched up to |Z|.
pub fn bounds_report(cfg: &Configuration, seeds: &[u64]) -> Result<BoundsReport> {
    if cfg.ambient_dim() != 2 {
        return Err(ArrError::usage("the bound suite is planar"));
    }
    let d_max = (cfg.len() as u32).max(2);
    let table = degree_table(cfg, d_max, seeds)?;
    bounds_from(cfg, &table.unexpected(), &DualModule::new(cfg)?)
}

/// Whether d-th powers of linear forms span all forms of degree d in
/// characteristic p (0 or a prime): d + 1 = q·p^e with 1 ≤ q ≤ p.
pub fn char_hypothesis(p: u64, d: u32) -> Result<bool> {
    if d < 1 {
        return Err(ArrError::usage("d must be at least 1"));
    }
    if p == 0 {
        return Ok(true);
    }
    if !crate::scalar::is_prime(p) {
        return Err(ArrError::usage(format!("{p} is neither 0 nor a prime")));
    }
    let mut m = d as u64 + 1;
    while m.is_multiple_of(p) {
        m /= p;
    }
    // q = p corresponds to m = 1.
    Ok(m <= p)
}

/// Planar configurations: predicted splitting of Z ∪ {p} from l_p(Z)
/// against the direct computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AddPointReport {
    pub before: SplittingType,
    pub l_p: usize,
    pub predicted: Option<SplittingType>,
    pub computed: SplittingType,
    pub agrees: Option<bool>,
}

pub fn add_point_splitting(cfg: &Configuration, p: &ProjectivePoint, seeds: &[u64]) -> Result<AddPointReport> {
    if cfg.ambient_dim() != 2 {
        return Err(ArrError::usage("adding a point is analysed in the plane"));
    }
    if cfg.index_of(p).is_some() {
        return Err(ArrError::usage("the added point already lies in Z"));
    }
    let before = splitting_analysis(cfg, seeds)?.splitting;
    let (a, b) = (before.0[0], before.0[1]);
    let l_p = l_p_count(cfg, &PointRef::External(p.clone()))?;
    let predicted = (l_p as u32 > a).then(|| {
        if a == b {
            SplittingType(vec![a, a + 1])
        } else {
            SplittingType(vec![a + 1, b])
        }
    });
    let computed = splitting_analysis(&cfg.with_point(p.clone())?, seeds)?.splitting;
    let agrees = predicted.as_ref().map(|s| *s == computed);
    Ok(AddPointReport {
        before,
        l_p,
        predicted,
        computed,
        agrees,
    })
}

/// Degrees 2 ≤ d ≤ (|Z|+1)/2 with c_2 < (d−1)(|Z|−d), when no line holds
/// (|Z|−1)/2 or more points; such degrees are unexpected. `None` when the
/// line hypothesis fails.
pub fn chern_unexpected_degrees(cfg: &Configuration) -> Result<Option<BTreeSet<u32>>> {
    let z = cfg.len() as i64;
    let longest = spanned_lines(cfg)?.iter().map(|l| l.len()).max().unwrap_or(0) as i64;
    if 2 * longest >= z - 1 {
        return Ok(None);
    }
    let c2 = c2_combinatorial(cfg)?;
    Ok(Some(
        (2..)
            .take_while(|&d| 2 * d - 1 <= z)
            .filter(|&d| c2 < (d - 1) * (z - d))
            .map(|d| d as u32)
            .collect(),
    ))
}

/// Everything the library knows about Z. Duality-based fields are filled
/// in for planar configurations only.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub name: Option<String>,
    pub field: String,
    pub ambient_dim: usize,
    pub num_points: usize,
    pub d_max: u32,
    pub rows: Vec<DegreeRow>,
    pub splitting_type: SplittingType,
    pub unexpected_degrees: Vec<u32>,
    pub very_unexpected_degrees: Vec<u32>,
    pub regularity: u32,
    pub balanced: bool,
    pub alpha: Option<u32>,
    pub free: Option<bool>,
    pub semistable: Option<bool>,
    pub c2: Option<i64>,
    pub bounds: Option<BoundsReport>,
    pub seeds: Vec<u64>,
    pub warnings: Vec<String>,
}

pub fn analyze(cfg: &Configuration, d_max: u32, seeds: &[u64]) -> Result<AnalysisReport> {
    check_d_max(d_max)?;
    if !cfg.is_spanning() {
        return Err(ArrError::usage("analysis needs a spanning configuration"));
    }
    let solver = ExcSolver::new(cfg)?;
    let mut gh = GenericH::new(cfg, seeds)?;
    let (rows, split) = loop {
        let before = gh.seeds.len();
        let rows = rows_from(cfg, d_max, &mut gh, &solver)?;
        let split = splitting_with(cfg, &mut gh)?;
        if gh.seeds.len() == before {
            break (rows, split);
        }
    };
    let st = split.splitting.clone();
    let table = DegreeTable {
        rows,
        seeds: gh.seeds.clone(),
        warnings: gh.warnings.clone(),
    };
    let unexpected = table.unexpected();
    let very = table.very_unexpected();
    for &d in &very {
        if !unexpected.contains(&d) || !(st.first() < d && d < st.last()) {
            return Err(ArrError::invariant(format!(
                "very unexpected degree {d} is not unexpected or lies outside (a_1, a_n) = ({}, {}) (seeds {:?})",
                st.first(),
                st.last(),
                table.seeds
            )));
        }
    }
    let (alpha, free, semistable, c2, bounds) = if cfg.ambient_dim() == 2 {
        let module = DualModule::new(cfg)?;
        let fr = module.freeness_with(&split)?;
        (
            module.alpha(d_max)?,
            Some(fr.free),
            Some(module.semistable()?),
            fr.c2,
            Some(bounds_from(cfg, &unexpected, &module)?),
        )
    } else {
        (None, None, None, None, None)
    };
    Ok(AnalysisReport {
        name: cfg.name.clone(),
        field: cfg.field().to_string(),
        ambient_dim: cfg.ambient_dim(),
        num_points: cfg.len(),
        d_max,
        rows: table.rows,
        splitting_type: st,
        unexpected_degrees: unexpected.into_iter().collect(),
        very_unexpected_degrees: very.into_iter().collect(),
        regularity: regularity(cfg)?,
        balanced: balanced(cfg)?,
        alpha,
        free,
        semistable,
        c2,
        bounds,
        seeds: table.seeds,
        warnings: table.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configlib::{build_ceva_extended, build_generic, build_projective_space};
    use crate::scalar::{Field, Scalar};

    fn coord3_plus(extra: &[i64]) -> Configuration {
        let mut pts = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        if !extra.is_empty() {
            pts.push(extra.to_vec());
        }
        Configuration::from_ints(&Field::rationals(), 2, &pts).unwrap()
    }

    /// Binary d-th powers (x + a y)^d for distinct a span all binary forms
    /// of degree d exactly when the rank is d + 1.
    fn powers_span(p: u64, d: u32) -> bool {
        let f = Field::finite(p, 1).unwrap().generic_extension().unwrap().target;
        let rows: Vec<Vec<Scalar>> = (0..=d as i64 + 3)
            .map(|a| {
                let a = f.pow(&f.generator(), a as u64 + 1);
                // Coefficient of x^{d−i} y^i is C(d, i) a^i.
                (0..=d)
                    .map(|i| {
                        let c = crate::poly::binomial(d as u64, i as u64) % p;
                        f.mul(&f.from_i64(c as i64), &f.pow(&a, i as u64))
                    })
                    .collect()
            })
            .collect();
        crate::linalg::rank(&f, rows) == d as usize + 1
    }

    #[test]
    fn char_hypothesis_matches_power_rank() {
        assert!(char_hypothesis(0, 17).unwrap());
        assert!(char_hypothesis(3, 8).unwrap());
        assert!(!char_hypothesis(2, 2).unwrap());
        for p in [2u64, 3, 5] {
            for d in 1..=20 {
                assert_eq!(char_hypothesis(p, d).unwrap(), powers_span(p, d), "p = {p}, d = {d}");
            }
        }
        assert!(char_hypothesis(4, 3).is_err());
    }

    #[test]
    fn balance() {
        assert!(balanced(&build_ceva_extended(3, 2).unwrap()).unwrap());
        // Near-pencil: four collinear points and one off the line.
        let np = Configuration::from_ints(
            &Field::rationals(),
            2,
            &[
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![1, 1, 0],
                vec![1, 2, 0],
                vec![0, 0, 1],
            ],
        )
        .unwrap();
        assert!(!balanced(&np).unwrap());
        assert!(balanced(&build_generic(6, 2, 1).unwrap()).unwrap());
    }

    #[test]
    fn ceva_three_table() {
        // C_3: splitting (4, 7), unexpected in degrees 5 and 6.
        let c = build_ceva_extended(3, 2).unwrap();
        let t = degree_table(&c, 8, &DEFAULT_SEEDS).unwrap();
        assert_eq!(t.unexpected(), BTreeSet::from([5, 6]));
        assert_eq!(t.very_unexpected(), t.unexpected());
        let b = bounds_report(&c, &DEFAULT_SEEDS).unwrap();
        assert_eq!(b.degree, Some(5));
        assert!(b.all_hold());
        assert!(b.check("points").unwrap().sharp);
        assert!(b.check("lines").unwrap().sharp);
        assert_eq!(b.irreducible_proxy, Some(true));
    }

    #[test]
    fn pg_two_three() {
        let c = build_projective_space(3, 2).unwrap();
        let t = degree_table(&c, 10, &DEFAULT_SEEDS).unwrap();
        assert_eq!(t.very_unexpected(), (4..=8).collect());
    }

    #[test]
    fn generic_points_have_no_bounds() {
        let c = build_generic(6, 2, 3).unwrap();
        let b = bounds_report(&c, &DEFAULT_SEEDS).unwrap();
        assert!(!b.applicable);
        assert!(unexpected_degrees(&c, 6).unwrap().is_empty());
    }

    #[test]
    fn adding_points() {
        let c = coord3_plus(&[]);
        let p = ProjectivePoint::from_ints(&Field::rationals(), &[2, 3, 5]).unwrap();
        let r = add_point_splitting(&c, &p, &DEFAULT_SEEDS).unwrap();
        assert_eq!(r.before, SplittingType(vec![1, 1]));
        assert_eq!(r.l_p, 3);
        assert_eq!(r.predicted, Some(SplittingType(vec![1, 2])));
        assert_eq!(r.agrees, Some(true));
        let q = c.point(0).clone();
        assert!(matches!(
            add_point_splitting(&c, &q, &DEFAULT_SEEDS),
            Err(ArrError::Usage(_))
        ));
    }

    #[test]
    fn analysis_of_example_configuration() {
        let c = coord3_plus(&[1, 1, 1]);
        let r = analyze(&c, 4, &DEFAULT_SEEDS).unwrap();
        assert_eq!(r.splitting_type, SplittingType(vec![1, 2]));
        assert_eq!(r.alpha, Some(2));
        assert_eq!(r.free, Some(false));
        assert_eq!(r.c2, Some(3));
        assert!(r.unexpected_degrees.is_empty());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"splitting_type\":[1,2]"));
    }

    #[test]
    fn small_d_max_rejected() {
        assert!(matches!(
            degree_table(&coord3_plus(&[1, 1, 1]), 1, &DEFAULT_SEEDS),
            Err(ArrError::Usage(_))
        ));
    }
}
