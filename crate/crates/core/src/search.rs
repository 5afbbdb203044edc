//! Exhaustive rigidity searches.
//!
//! For a coset union `D` of index `d`, a function `f` with `D_f` inside `D`
//! and `|D_f| <= (q+1)/2` is additive after translating `f(0)` to zero, so
//! the search runs over the `q^n` linearized maps `sum c_i x^(p^i)` and keeps
//! those whose quotients `f(x)/x` all land in `D`. Surviving maps are then
//! classified as Frobenius-linear (`a x^(p^j)`) or exceptional. When the
//! prime is large enough relative to `(n, d, r)` an exceptional survivor with
//! few directions would contradict the rigidity theorem and is reported as a
//! violation.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::directions::{is_additive, LinearizedMap};
use crate::error::{Error, Result};
use crate::field::{build_field, Element, FieldCtx, FieldSpec};
use crate::mult::{CosetSpec, CosetUnion};
use crate::parallel::with_workers;

/// Default cap on the number of candidates a single search may visit.
pub const DEFAULT_SEARCH_CAP: u64 = 1 << 28;

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub cap: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { jobs: None, cap: DEFAULT_SEARCH_CAP }
    }
}

impl SearchOptions {
    pub fn with_jobs(jobs: usize) -> Self {
        SearchOptions { jobs: Some(jobs), ..Default::default() }
    }
}

fn search_space(q: u64, k: u32, cap: u64) -> Result<u64> {
    match arith::checked_pow(q, k) {
        Some(s) if s <= cap => Ok(s),
        Some(s) => Err(Error::SearchSpaceTooLarge { size: s as u128, cap: cap as u128 }),
        None => Err(Error::SearchSpaceTooLarge { size: u128::MAX, cap: cap as u128 }),
    }
}

/// `p (d - r)^2 >= (2n - 1)^2 r d^2`, in exact integer arithmetic.
/// Requires `n, d >= 2` and `1 <= r <= d - 1`.
pub fn check_p_bound(p: u64, n: u64, d: u64, r: u64) -> Result<bool> {
    if n < 2 || d < 2 || r < 1 || r > d - 1 {
        return Err(Error::ParamOutOfRange(format!("need n, d >= 2 and 1 <= r <= d - 1 (n={n}, d={d}, r={r})")));
    }
    Ok(p_bound_holds(p, 2 * n - 1, d, r))
}

/// `p (d - r)^2 >= factor^2 r d^2`.
pub(crate) fn p_bound_holds(p: u64, factor: u64, d: u64, r: u64) -> bool {
    let lhs = p as u128 * ((d - r) as u128).pow(2);
    let rhs = (factor as u128).pow(2) * r as u128 * (d as u128).pow(2);
    lhs >= rhs
}

/// `(2n - 1)^2 r d^2 / (d - r)^2` as a float, for reports.
pub fn p_bound_threshold(n: u64, d: u64, r: u64) -> f64 {
    let f = (2 * n - 1) as f64;
    f * f * r as f64 * (d * d) as f64 / ((d - r) * (d - r)) as f64
}

/// `x^(p^i - 1)` for every `i < n` and every `x`, laid out `[i][x]`.
fn quotient_weights(field: &FieldCtx) -> Vec<Vec<Element>> {
    (0..field.n())
        .map(|i| {
            let k = (field.p() as i64).pow(i) - 1;
            field.elements().map(|x| field.pow(x, k).expect("k >= 0")).collect()
        })
        .collect()
}

#[inline]
fn quotient(field: &FieldCtx, coeffs: &[Element], weights: &[Vec<Element>], x: usize) -> Element {
    let mut acc = Element::ZERO;
    for (c, w) in coeffs.iter().zip(weights) {
        if !c.is_zero() {
            acc = field.add(acc, field.mul(*c, w[x]));
        }
    }
    acc
}

fn decode(index: u64, q: u64, out: &mut [Element]) {
    let mut e = index;
    for slot in out.iter_mut() {
        *slot = Element((e % q) as u32);
        e /= q;
    }
}

/// Every nonzero linearized map whose quotients `f(x)/x` all lie in `set`,
/// in increasing order of `sum enc(c_i) q^i`. Candidates are rejected at the
/// first `x` (in encoding order) that leaves `set`.
pub fn enumerate_additive_in(set: &CosetUnion, opts: &SearchOptions) -> Result<Vec<LinearizedMap>> {
    let field = set.field().clone();
    let q = field.q() as u64;
    let n = field.n() as usize;
    search_space(q, field.n(), opts.cap)?;
    let weights = quotient_weights(&field);
    let block = q.pow(n as u32 - 1);

    let scan = |top: u64| -> Vec<LinearizedMap> {
        let mut found = Vec::new();
        let mut coeffs = vec![Element::ZERO; n];
        for low in 0..block {
            let index = top * block + low;
            if index == 0 {
                continue;
            }
            decode(index, q, &mut coeffs);
            let inside = (1..q as usize).all(|x| set.contains(quotient(&field, &coeffs, &weights, x)));
            if inside {
                found.push(LinearizedMap::new(field.clone(), coeffs.clone()).expect("valid coefficients"));
            }
        }
        found
    };

    with_workers(opts.jobs, || {
        let parts: Vec<Vec<LinearizedMap>> = (0..q).into_par_iter().map(scan).collect();
        parts.into_iter().flatten().collect()
    })
}

/// How a surviving additive map was classified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    /// `f(x) = a x^(p^j)`.
    FrobeniusLinear {
        a: u32,
        j: u32,
    },
    Exceptional,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Survivor {
    pub coeffs: Vec<u32>,
    pub classification: Classification,
    pub direction_count: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityHypotheses {
    /// `p >= (2n-1)^2 r d^2 / (d-r)^2`; false when `(n, d, r)` is outside
    /// the theorem's range.
    pub p_bound: bool,
    pub p_bound_threshold: Option<f64>,
    pub set_size: u64,
    /// `|D| <= (q+1)/2`.
    pub set_size_ok: bool,
    pub triple_quotient_size: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub p: u32,
    pub n: u32,
    pub q: u32,
    pub d: u32,
    pub cosets: Vec<u32>,
    pub r: u32,
    pub field: FieldSpec,
    pub hypotheses: RigidityHypotheses,
    pub search_space: u64,
    pub survivor_count: usize,
    pub exceptional_count: usize,
    pub survivors: Vec<Survivor>,
    pub violations: Vec<String>,
}

fn classify(map: &LinearizedMap) -> Classification {
    match map.monomial_part() {
        Some((a, j)) => Classification::FrobeniusLinear { a: a.0, j },
        None => Classification::Exceptional,
    }
}

/// Runs the additive search for `D = union_{m in M} g^m H` and checks the
/// rigidity conclusion on every survivor.
pub fn verify_thm_main(p: u64, n: u32, d: u32, cosets: &[u32], opts: &SearchOptions) -> Result<RigidityReport> {
    let field = build_field(p, n)?;
    let set = CosetUnion::new(field.clone(), d, cosets.iter().copied())?;
    verify_coset_union(&set, opts)
}

pub fn verify_coset_union(set: &CosetUnion, opts: &SearchOptions) -> Result<RigidityReport> {
    let field = set.field();
    let q = field.q() as u64;
    let (p, n, d, r) = (field.p() as u64, field.n() as u64, set.index() as u64, set.r() as u64);
    let search = search_space(q, field.n(), opts.cap)?;
    let p_bound = check_p_bound(p, n, d, r).unwrap_or(false);
    let threshold = (n >= 2 && d >= 2 && r < d).then(|| p_bound_threshold(n, d, r));
    let hypotheses = RigidityHypotheses {
        p_bound,
        p_bound_threshold: threshold,
        set_size: set.len(),
        set_size_ok: 2 * set.len() <= q + 1,
        triple_quotient_size: set.triple_quotient_size(),
    };

    let maps = enumerate_additive_in(set, opts)?;
    let mut survivors = Vec::with_capacity(maps.len());
    let mut violations = Vec::new();
    for map in &maps {
        let classification = classify(map);
        let direction_count = map.directions().len() as u32;
        if p_bound && classification == Classification::Exceptional && 2 * direction_count as u64 <= q + 1 {
            violations.push(format!(
                "THEOREM VIOLATION: exceptional additive map {:?} with {} directions inside D",
                map.coeff_encodings(),
                direction_count
            ));
        }
        survivors.push(Survivor { coeffs: map.coeff_encodings(), classification, direction_count });
    }
    let exceptional_count = survivors.iter().filter(|s| s.classification == Classification::Exceptional).count();
    Ok(RigidityReport {
        p: field.p(),
        n: field.n(),
        q: field.q(),
        d: set.index(),
        cosets: set.exponents().to_vec(),
        r: set.r(),
        field: field.spec(),
        hypotheses,
        search_space: search,
        survivor_count: survivors.len(),
        exceptional_count,
        survivors,
        violations,
    })
}

/// Outcome of the exhaustive check that few directions force additivity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionsTheoremReport {
    pub q: u32,
    pub p: u32,
    pub n: u32,
    /// `q^(q-1)`: every function with `f(0) = 0`.
    pub functions: u64,
    /// Largest admissible `|D_f|`, `floor((q+1)/2)`.
    pub bound: u32,
    /// Functions with `|D_f| <= (q+1)/2`.
    pub small_direction_count: u64,
    /// Of those, how many are additive.
    pub additive_count: u64,
    /// Non-additive functions with few directions.
    pub violations: u64,
}

struct DirectionsDfs<'a> {
    field: &'a FieldCtx,
    bound: usize,
    table: Vec<Element>,
    multiplicity: Vec<u32>,
    distinct: usize,
    small: u64,
    additive: u64,
    violations: u64,
}

impl DirectionsDfs<'_> {
    fn descend(&mut self, x: usize) {
        let q = self.field.q() as usize;
        if x == q {
            self.small += 1;
            if is_additive(self.field, &self.table).expect("table sized to q") {
                self.additive += 1;
            } else {
                self.violations += 1;
            }
            return;
        }
        let mut slopes = Vec::with_capacity(x);
        for y in 0..q as u32 {
            let fy = Element(y);
            slopes.clear();
            let mut ok = true;
            for prev in 0..x {
                let dx = self.field.sub(Element(x as u32), Element(prev as u32));
                let dy = self.field.sub(fy, self.table[prev]);
                let s = self.field.div(dy, dx).expect("distinct abscissae").0 as usize;
                slopes.push(s);
                self.multiplicity[s] += 1;
                if self.multiplicity[s] == 1 {
                    self.distinct += 1;
                    if self.distinct > self.bound {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.table[x] = fy;
                self.descend(x + 1);
            }
            for &s in &slopes {
                self.multiplicity[s] -= 1;
                if self.multiplicity[s] == 0 {
                    self.distinct -= 1;
                }
            }
        }
        self.table[x] = Element::ZERO;
    }
}

/// Visits every `f: F_q -> F_q` with `f(0) = 0` (branches are cut as soon as
/// the partial graph already determines more than `(q+1)/2` directions) and
/// counts those with few directions that fail to be additive.
pub fn verify_thm_directions_bruteforce(q: u64, cap: u64) -> Result<DirectionsTheoremReport> {
    let (p, n) = arith::prime_power(q).ok_or(Error::NonPrime(q))?;
    let functions = search_space(q, q as u32 - 1, cap)?;
    let field = build_field(p, n)?;
    let bound = q.div_ceil(2) as usize;
    let mut dfs = DirectionsDfs {
        field: &field,
        bound,
        table: vec![Element::ZERO; q as usize],
        multiplicity: vec![0; q as usize],
        distinct: 0,
        small: 0,
        additive: 0,
        violations: 0,
    };
    dfs.descend(1);
    Ok(DirectionsTheoremReport {
        q: q as u32,
        p: p as u32,
        n,
        functions,
        bound: bound as u32,
        small_direction_count: dfs.small,
        additive_count: dfs.additive,
        violations: dfs.violations,
    })
}

/// An additive, non-Frobenius-linear map together with the smallest coset
/// union containing its directions. The map is normalized to `f(1) = 1`,
/// which picks one representative per scaling class `f -> c f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalExample {
    pub d: u32,
    pub cosets: CosetSpec,
    pub coeffs: Vec<u32>,
    pub direction_count: u32,
    /// Smallest coefficient vector among the Frobenius conjugates of the map.
    pub frobenius_orbit_rep: Vec<u32>,
    pub p_bound: bool,
    pub few_directions: bool,
}

impl ExceptionalExample {
    pub fn map(&self, field: &Arc<FieldCtx>) -> LinearizedMap {
        LinearizedMap::new(field.clone(), self.coeffs.iter().map(|&c| Element(c)).collect()).expect("stored map")
    }

    pub fn coset_union(&self, field: &Arc<FieldCtx>) -> CosetUnion {
        CosetUnion::new(field.clone(), self.cosets.d, self.cosets.m.iter().copied()).expect("stored cosets")
    }

    /// Both hypotheses of the rigidity theorem hold, so this example should
    /// not exist.
    pub fn is_violation(&self) -> bool {
        self.p_bound && self.few_directions
    }
}

fn orbit_rep(map: &LinearizedMap) -> Vec<u32> {
    let mut best = map.coeff_encodings();
    best.reverse();
    let mut cur = map.clone();
    for _ in 1..map.field().n() {
        cur = cur.frobenius_conjugate();
        let mut key = cur.coeff_encodings();
        key.reverse();
        best = best.min(key);
    }
    best.reverse();
    best
}

/// Catalogs additive maps that are not Frobenius-linear yet have all their
/// directions inside a union of at most `r_max` cosets of the index-`d`
/// subgroup, for each `d` in `indices` dividing `q - 1`.
pub fn find_exceptional_examples(
    p: u64,
    n: u32,
    indices: &[u32],
    r_max: u32,
    opts: &SearchOptions,
) -> Result<Vec<ExceptionalExample>> {
    let field = build_field(p, n)?;
    find_exceptional_in(&field, indices, r_max, opts)
}

pub fn find_exceptional_in(
    field: &Arc<FieldCtx>,
    indices: &[u32],
    r_max: u32,
    opts: &SearchOptions,
) -> Result<Vec<ExceptionalExample>> {
    let q = field.q() as u64;
    let n = field.n() as usize;
    let per_index = search_space(q, field.n() - 1, opts.cap)?;
    let weights = quotient_weights(field);
    let mut indices: Vec<u32> =
        indices.iter().copied().filter(|&d| d >= 1 && field.group_order().is_multiple_of(d)).collect();
    indices.sort_unstable();
    indices.dedup();

    let mut out = Vec::new();
    for d in indices {
        let scan = |index: u64| -> Option<ExceptionalExample> {
            // c_1 .. c_{n-1} from the index, c_0 = 1 - sum of the rest
            let mut coeffs = vec![Element::ZERO; n];
            decode(index, q, &mut coeffs[1..]);
            let rest = coeffs[1..].iter().fold(Element::ZERO, |acc, &c| field.add(acc, c));
            coeffs[0] = field.sub(Element::ONE, rest);
            let map = LinearizedMap::new(field.clone(), coeffs.clone()).expect("valid");
            if map.monomial_part().is_some() {
                return None;
            }
            let mut mask = vec![false; d as usize];
            let mut used = 0;
            for x in 1..q as usize {
                let l = field.log(quotient(field, &coeffs, &weights, x)).ok()?;
                let m = (l % d) as usize;
                if !mask[m] {
                    mask[m] = true;
                    used += 1;
                    if used > r_max {
                        return None;
                    }
                }
            }
            let cosets: Vec<u32> = (0..d).filter(|&m| mask[m as usize]).collect();
            let r = cosets.len() as u64;
            let direction_count = map.directions().len() as u32;
            Some(ExceptionalExample {
                d,
                p_bound: check_p_bound(field.p() as u64, field.n() as u64, d as u64, r).unwrap_or(false),
                few_directions: 2 * direction_count as u64 <= q + 1,
                cosets: CosetSpec { d, m: cosets },
                frobenius_orbit_rep: orbit_rep(&map),
                coeffs: map.coeff_encodings(),
                direction_count,
            })
        };
        let found: Vec<ExceptionalExample> =
            with_workers(opts.jobs, || (0..per_index).into_par_iter().filter_map(scan).collect())?;
        out.extend(found);
    }
    Ok(out)
}

/// Exceptional maps found at one prime below the rigidity threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginRow {
    pub p: u64,
    pub exceptions: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub n: u32,
    pub d: u32,
    pub r: u32,
    pub threshold: f64,
    pub rows: Vec<MarginRow>,
    /// Largest prime below the threshold with an exceptional map that has
    /// few directions; says nothing about tightness beyond the primes tried.
    pub largest_exceptional_p: Option<u64>,
}

/// Scans primes `p < threshold`, `p <= p_max`, with `d | p^n - 1` and a
/// buildable field, counting exceptional maps with `|D_f| <= (q+1)/2` inside
/// some union of at most `r` cosets.
pub fn empirical_margin(n: u32, d: u32, r: u32, p_max: u64, opts: &SearchOptions) -> Result<MarginReport> {
    check_p_bound(2, n as u64, d as u64, r as u64)?;
    let threshold = p_bound_threshold(n as u64, d as u64, r as u64);
    let mut rows = Vec::new();
    for p in (2..=p_max).filter(|&p| arith::is_prime(p) && (p as f64) < threshold) {
        let Some(q) = arith::checked_pow(p, n) else { break };
        if (q - 1) % d as u64 != 0 {
            continue;
        }
        let found = match find_exceptional_examples(p, n, &[d], r, opts) {
            Ok(found) => found,
            Err(Error::FieldTooLarge { .. }) | Err(Error::SearchSpaceTooLarge { .. }) => break,
            Err(e) => return Err(e),
        };
        rows.push(MarginRow { p, exceptions: found.iter().filter(|e| e.few_directions).count() });
    }
    let largest_exceptional_p = rows.iter().filter(|row| row.exceptions > 0).map(|row| row.p).max();
    Ok(MarginReport { n, d, r, threshold, rows, largest_exceptional_p })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_bound_examples() {
        assert_eq!(check_p_bound(37, 2, 2, 1), Ok(true));
        assert_eq!(check_p_bound(36, 2, 2, 1), Ok(true));
        assert_eq!(check_p_bound(35, 2, 2, 1), Ok(false));
        assert_eq!(check_p_bound(5, 2, 6, 3), Ok(false));
        assert_eq!(check_p_bound(23, 2, 3, 1), Ok(true));
        assert_eq!(check_p_bound(83, 2, 7, 3), Ok(true));
        assert_eq!(check_p_bound(79, 2, 7, 3), Ok(false));
        assert!((p_bound_threshold(2, 2, 1) - 36.0).abs() < 1e-12);
        assert!((p_bound_threshold(2, 6, 3) - 108.0).abs() < 1e-12);
        assert!(check_p_bound(5, 1, 2, 1).is_err());
        assert!(check_p_bound(5, 2, 2, 2).is_err());
        assert!(check_p_bound(5, 2, 2, 0).is_err());
    }

    #[test]
    fn whole_group_survivors_are_the_invertible_maps() {
        let field = build_field(3, 2).unwrap();
        let all = CosetUnion::new(field.clone(), 1, [0]).unwrap();
        let found = enumerate_additive_in(&all, &SearchOptions::default()).unwrap();
        // injective iff trivial kernel
        let mut want = Vec::new();
        for c1 in field.elements() {
            for c0 in field.elements() {
                let map = LinearizedMap::new(field.clone(), vec![c0, c1]).unwrap();
                if field.nonzero().all(|x| !map.eval(x).is_zero()) {
                    want.push(map);
                }
            }
        }
        assert_eq!(found, want);
        // |GL_2(F_3)| = 48
        assert_eq!(found.len(), 48);
    }

    #[test]
    fn subgroup_survivors_are_frobenius_scalars() {
        let report = verify_thm_main(7, 2, 4, &[0], &SearchOptions::with_jobs(1)).unwrap();
        assert!(report.violations.is_empty());
        assert_eq!(report.exceptional_count, 0);
        for s in &report.survivors {
            assert!(matches!(s.classification, Classification::FrobeniusLinear { .. }));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let field = build_field(5, 2).unwrap();
        let h = CosetUnion::subgroup(field, 2).unwrap();
        let opts = SearchOptions { jobs: None, cap: 600 };
        assert!(matches!(enumerate_additive_in(&h, &opts), Err(Error::SearchSpaceTooLarge { size: 625, .. })));
        assert!(matches!(
            verify_thm_directions_bruteforce(11, DEFAULT_SEARCH_CAP),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
        assert!(matches!(verify_thm_directions_bruteforce(6, DEFAULT_SEARCH_CAP), Err(Error::NonPrime(6))));
    }

    #[test]
    fn directions_theorem_tiny_fields() {
        let r2 = verify_thm_directions_bruteforce(2, DEFAULT_SEARCH_CAP).unwrap();
        assert_eq!((r2.functions, r2.small_direction_count, r2.violations), (2, 2, 0));
        let r5 = verify_thm_directions_bruteforce(5, DEFAULT_SEARCH_CAP).unwrap();
        assert_eq!(r5.functions, 625);
        assert_eq!(r5.violations, 0);
        assert_eq!(r5.small_direction_count, 5);
    }

    #[test]
    fn orbit_rep_is_conjugation_invariant() {
        let field = build_field(5, 2).unwrap();
        let map = LinearizedMap::new(field, vec![Element(3), Element(11)]).unwrap();
        assert_eq!(orbit_rep(&map), orbit_rep(&map.frobenius_conjugate()));
    }
}
