//! Cliques of size `q` in Cayley graphs on `F_{q^2}`.
//!
//! The connection set `S` is a union of cosets of the index-`d` subgroup
//! `H` of `F_{q^2}^*`, with `d | q + 1`. Then `F_q^* <= H`, so `S` is closed
//! under negation and the graph is undirected. A clique through 0 and 1 of
//! size `q` is a set `A` with `A - A` inside `S + {0}`; the subfield `F_q` is
//! one whenever `F_q^*` lies in `S`.
//!
//! A clique is turned into the graph of a function on `F_q` by writing
//! `F_{q^2} = F_q + F_q v` for some `v` outside `S`; its directions then
//! satisfy `1 + D_f v` inside `S`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::directions::{directions_of_function, is_additive, DirectionSetSpec};
use crate::error::{Error, Result};
use crate::field::{build_field, Element, FieldCtx};
use crate::mult::CosetUnion;
use crate::parallel::with_workers;
use crate::search::p_bound_holds;

/// Largest base `q` the clique search accepts by default.
pub const DEFAULT_CLIQUE_MAX_Q: u32 = 17;

#[derive(Clone, Debug)]
pub struct CliqueInstance {
    p: u32,
    n: u32,
    q: u32,
    big: Arc<FieldCtx>,
    s: CosetUnion,
}

impl CliqueInstance {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// The base `q = p^n`.
    pub fn q(&self) -> u32 {
        self.q
    }

    /// `F_{q^2}`.
    pub fn big_field(&self) -> &Arc<FieldCtx> {
        &self.big
    }

    pub fn connection_set(&self) -> &CosetUnion {
        &self.s
    }

    pub fn d(&self) -> u32 {
        self.s.index()
    }

    pub fn r(&self) -> u32 {
        self.s.r()
    }

    /// `F_q^*` lies in `S`, which happens exactly when `0` is in `M`.
    pub fn fq_star_in_s(&self) -> bool {
        self.s.exponents().first() == Some(&0)
    }

    /// `r <= d / 2`.
    pub fn r_le_half(&self) -> bool {
        2 * self.r() <= self.d()
    }

    #[inline]
    pub fn adjacent(&self, x: Element, y: Element) -> bool {
        x != y && self.s.contains(self.big.sub(x, y))
    }

    /// Every edge `{x, y}` with `x < y`, by encoding.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let q2 = self.big.q();
        (0..q2)
            .flat_map(move |x| (x + 1..q2).filter(move |&y| self.adjacent(Element(x), Element(y))).map(move |y| (x, y)))
    }

    /// The elements of the subfield `F_q`, sorted.
    pub fn subfield(&self) -> Vec<Element> {
        self.big.subfield_elements(self.n).expect("n divides 2n")
    }

    /// Smallest nonzero element outside `S`, if any.
    pub fn default_v(&self) -> Option<Element> {
        self.big.nonzero().find(|&x| !self.s.contains(x))
    }
}

/// Builds the Cayley graph on `F_{q^2}`, `q = p^n`, with connection set
/// `union_{m in M} g^m H`, `[F_{q^2}^* : H] = d`, `d | q + 1`.
pub fn make_instance(p: u64, n: u32, d: u32, cosets: &[u32]) -> Result<CliqueInstance> {
    if n == 0 {
        return Err(Error::DegreeZero);
    }
    let big = build_field(p, 2 * n)?;
    let q = big.p().pow(n);
    if d == 0 || (q + 1) % d != 0 {
        return Err(Error::IndexNotDividingQPlus1 { d: d as u64, q_plus_one: q as u64 + 1 });
    }
    let s = CosetUnion::new(big.clone(), d, cosets.iter().copied())?;
    Ok(CliqueInstance { p: big.p(), n, q, big, s })
}

#[derive(Clone, Copy, Debug)]
pub struct CliqueOptions {
    pub jobs: Option<usize>,
    pub max_q: u32,
}

impl Default for CliqueOptions {
    fn default() -> Self {
        CliqueOptions { jobs: None, max_q: DEFAULT_CLIQUE_MAX_Q }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Common neighbours of 0 and 1.
    pub candidates: usize,
    /// Search-tree nodes visited.
    pub nodes: u64,
}

struct Enumerator<'a> {
    adj: &'a [Bitset],
    k: usize,
    nodes: u64,
    found: Vec<Vec<usize>>,
}

impl Enumerator<'_> {
    /// Number of colours in a greedy colouring of `p`, an upper bound on
    /// its clique number.
    fn colour_bound(&self, p: &Bitset) -> usize {
        let mut rest = p.clone();
        let mut colours = 0;
        while !rest.is_empty() {
            colours += 1;
            let mut class = rest.clone();
            while let Some(v) = class.first() {
                rest.remove(v);
                class.remove(v);
                class.difference_with(&self.adj[v]);
            }
        }
        colours
    }

    fn expand(&mut self, chosen: &mut Vec<usize>, mut p: Bitset) {
        self.nodes += 1;
        if chosen.len() == self.k {
            self.found.push(chosen.clone());
            return;
        }
        let need = self.k - chosen.len();
        if p.count() < need || self.colour_bound(&p) < need {
            return;
        }
        while let Some(v) = p.first() {
            if p.count() < need {
                break;
            }
            chosen.push(v);
            self.expand(chosen, p.intersection(&self.adj[v]));
            chosen.pop();
            p.remove(v);
        }
    }
}

/// Every `A` with `|A| = q`, `0, 1 in A` and `A - A` inside `S + {0}`, each
/// sorted by encoding, in lexicographic order.
pub fn cliques_of_size_q_through_0_1(
    inst: &CliqueInstance,
    opts: &CliqueOptions,
) -> Result<(Vec<Vec<Element>>, SearchStats)> {
    if inst.q > opts.max_q {
        let size = inst.q as u128 * inst.q as u128;
        return Err(Error::SearchSpaceTooLarge { size, cap: opts.max_q as u128 * opts.max_q as u128 });
    }
    if !inst.adjacent(Element::ZERO, Element::ONE) {
        return Ok((Vec::new(), SearchStats::default()));
    }
    let big = &inst.big;
    let cand: Vec<Element> =
        big.elements().filter(|&x| inst.adjacent(x, Element::ZERO) && inst.adjacent(x, Element::ONE)).collect();
    let m = cand.len();
    let adj: Vec<Bitset> = cand
        .iter()
        .map(|&x| {
            let mut row = Bitset::new(m);
            for (j, &y) in cand.iter().enumerate() {
                if inst.adjacent(x, y) {
                    row.insert(j);
                }
            }
            row
        })
        .collect();
    let k = inst.q as usize - 2;
    let mut stats = SearchStats { candidates: m, nodes: 0 };
    let mut cliques: Vec<Vec<usize>> = if k == 0 {
        vec![Vec::new()]
    } else {
        // one branch per first (smallest) vertex of the clique
        let branches: Vec<(Vec<Vec<usize>>, u64)> = with_workers(opts.jobs, || {
            (0..m)
                .into_par_iter()
                .map(|v| {
                    let mut p = adj[v].clone();
                    for u in 0..=v {
                        p.remove(u);
                    }
                    let mut e = Enumerator { adj: &adj, k, nodes: 0, found: Vec::new() };
                    e.expand(&mut vec![v], p);
                    (e.found, e.nodes)
                })
                .collect()
        })?;
        let mut all = Vec::new();
        for (found, nodes) in branches {
            stats.nodes += nodes;
            all.extend(found);
        }
        all
    };
    let mut out: Vec<Vec<Element>> = cliques
        .drain(..)
        .map(|c| {
            let mut a: Vec<Element> = c.into_iter().map(|i| cand[i]).collect();
            a.push(Element::ZERO);
            a.push(Element::ONE);
            a.sort_unstable();
            a
        })
        .collect();
    out.sort();
    Ok((out, stats))
}

/// Which rigidity statement, if any, forces every clique to be `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Governing {
    /// `S = H` is a proper subgroup.
    Subgroup,
    /// `q = p` prime, `F_p^*` in `S`, `r <= d/2`: follows from the
    /// directions theorem since additive maps of `F_p` are linear.
    PrimeBase,
    /// `n, d >= 2`, `r <= d/2`, `F_q^*` in `S` and the prime bound.
    CosetUnion,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CliqueMode {
    /// Cliques other than `F_q` are violations when a statement governs.
    Verify,
    /// Cliques other than `F_q` are data.
    Catalog,
}

/// Outcome of pushing one clique through the function-graph reduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionGraph {
    pub v: u32,
    /// `f(x)` for every `x` of `F_q`, as encodings in the standalone field
    /// `F_q` (see [`SubfieldEmbedding`]).
    pub table: Vec<u32>,
    pub directions: DirectionSetSpec,
    pub direction_count: u32,
    /// `r (q+1) / d`: `F_q^*`-cosets in `S`, each meeting `1 + F_q v` at most
    /// once.
    pub coset_bound: u32,
    /// `1 + D_f v` lies in `S`.
    pub inclusion_ok: bool,
    pub within_coset_bound: bool,
    /// `|D_f| <= (q+1)/2`.
    pub few_directions: bool,
    pub additive: bool,
    pub f_one_is_zero: bool,
}

impl FunctionGraph {
    pub fn passed(&self) -> bool {
        self.inclusion_ok && self.within_coset_bound && self.few_directions && self.additive && self.f_one_is_zero
    }
}

/// An isomorphism between the standalone field `F_q` (its own minimal
/// modulus) and the subfield of `F_{q^2}`: `t` goes to the smallest root of
/// that modulus in the big field.
#[derive(Clone, Debug)]
pub struct SubfieldEmbedding {
    small: Arc<FieldCtx>,
    images: Vec<Element>,
    preimages: Vec<u32>,
}

impl SubfieldEmbedding {
    pub fn new(big: &FieldCtx, n: u32) -> Result<Self> {
        let small = build_field(big.p() as u64, n)?;
        let sub = big.subfield_elements(n)?;
        let modulus = small.spec().modulus;
        let eval = |x: Element| {
            modulus.iter().rev().fold(Element::ZERO, |acc, &c| big.add(big.mul(acc, x), big.from_int(c as i64)))
        };
        let beta = *sub.iter().find(|&&x| eval(x).is_zero()).ok_or_else(|| Error::NotFound("subfield root".into()))?;
        let images: Vec<Element> = small
            .elements()
            .map(|x| {
                small
                    .coeffs(x)
                    .iter()
                    .rev()
                    .fold(Element::ZERO, |acc, &c| big.add(big.mul(acc, beta), big.from_int(c as i64)))
            })
            .collect();
        let mut preimages = vec![u32::MAX; big.q() as usize];
        for (i, y) in images.iter().enumerate() {
            preimages[y.0 as usize] = i as u32;
        }
        Ok(SubfieldEmbedding { small, images, preimages })
    }

    pub fn small(&self) -> &Arc<FieldCtx> {
        &self.small
    }

    pub fn embed(&self, x: Element) -> Element {
        self.images[x.0 as usize]
    }

    pub fn preimage(&self, y: Element) -> Option<Element> {
        match self.preimages[y.0 as usize] {
            u32::MAX => None,
            i => Some(Element(i)),
        }
    }
}

/// Writes each `a in A` as `x + f(x) v` and checks the consequences:
/// `1 + D_f v` inside `S`, `|D_f|` bounded by the number of `F_q^*`-cosets
/// in `S` and by `(q+1)/2`, `f` additive with `f(1) = 0`.
pub fn clique_to_function_graph(inst: &CliqueInstance, a: &[Element], v: Element) -> Result<FunctionGraph> {
    let emb = SubfieldEmbedding::new(&inst.big, inst.n)?;
    clique_to_function_graph_with(inst, &emb, a, v)
}

pub fn clique_to_function_graph_with(
    inst: &CliqueInstance,
    emb: &SubfieldEmbedding,
    a: &[Element],
    v: Element,
) -> Result<FunctionGraph> {
    let big = &inst.big;
    big.element(v.0 as u64)?;
    if v.is_zero() || inst.s.contains(v) {
        return Err(Error::VInS);
    }
    if big.in_subfield(v, inst.n) {
        return Err(Error::PreconditionViolated("v lies in F_q, so 1 and v are dependent".into()));
    }
    let small = emb.small();
    let q = inst.q as usize;
    // pi^{-1}: (x, y) -> x + y v, inverted over all q^2 pairs
    let mut coords = vec![(0u32, 0u32); big.q() as usize];
    for x in small.elements() {
        for y in small.elements() {
            let z = big.add(emb.embed(x), big.mul(emb.embed(y), v));
            coords[z.0 as usize] = (x.0, y.0);
        }
    }
    let mut table = vec![None; q];
    for &pt in a {
        big.element(pt.0 as u64)?;
        let (x, y) = coords[pt.0 as usize];
        match table[x as usize] {
            Some(prev) if prev != y => return Err(Error::NotAGraph { x }),
            _ => table[x as usize] = Some(y),
        }
    }
    let table: Vec<Element> = table
        .into_iter()
        .enumerate()
        .map(|(x, y)| y.map(Element).ok_or_else(|| Error::PreconditionViolated(format!("no point above x = {x}"))))
        .collect::<Result<_>>()?;
    let dirs = directions_of_function(small, &table)?;
    let inclusion_ok = dirs.slopes().iter().all(|&s| inst.s.contains(big.add(Element::ONE, big.mul(emb.embed(s), v))));
    let coset_bound = inst.r() * (inst.q + 1) / inst.d();
    let count = dirs.len() as u32;
    Ok(FunctionGraph {
        v: v.0,
        table: table.iter().map(|e| e.0).collect(),
        directions: dirs.spec(),
        direction_count: count,
        coset_bound,
        inclusion_ok,
        within_coset_bound: count <= coset_bound,
        few_directions: 2 * count <= inst.q + 1,
        additive: is_additive(small, &table)?,
        f_one_is_zero: table[1].is_zero(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueReport {
    pub p: u32,
    pub n: u32,
    pub q: u32,
    pub d: u32,
    pub cosets: Vec<u32>,
    pub r: u32,
    pub fq_star_in_s: bool,
    pub r_le_half: bool,
    /// `p (d-r)^2 >= (4n-1)^2 r d^2`.
    pub p_bound: bool,
    pub governing: Governing,
    pub requested_mode: CliqueMode,
    pub mode: CliqueMode,
    pub cliques: Vec<Vec<u32>>,
    pub subfield_found: bool,
    /// Cliques other than `F_q`.
    pub exceptions: Vec<Vec<u32>>,
    /// `v` used for the function-graph checks, when `S` misses something.
    pub v: Option<u32>,
    pub pipeline: Vec<FunctionGraph>,
    pub pipeline_errors: Vec<String>,
    pub stats: SearchStats,
    pub violations: Vec<String>,
}

fn governing(inst: &CliqueInstance, p_bound: bool) -> Governing {
    let (d, r) = (inst.d(), inst.r());
    if inst.s.exponents() == [0] && d >= 2 {
        Governing::Subgroup
    } else if inst.n == 1 && inst.fq_star_in_s() && inst.r_le_half() {
        Governing::PrimeBase
    } else if inst.n >= 2 && d >= 2 && r >= 1 && inst.r_le_half() && inst.fq_star_in_s() && p_bound {
        Governing::CosetUnion
    } else {
        Governing::None
    }
}

/// Enumerates the cliques and checks them against whichever statement
/// governs the instance. With `F_q^*` in `S` and `r <= d/2` every clique is
/// also pushed through [`clique_to_function_graph`]; a failed check there is
/// a violation too, since the reduction needs nothing else.
pub fn verify_thm_main2(inst: &CliqueInstance, mode: CliqueMode, opts: &CliqueOptions) -> Result<CliqueReport> {
    let (d, r) = (inst.d() as u64, inst.r() as u64);
    let p_bound = r < d && p_bound_holds(inst.p as u64, 4 * inst.n as u64 - 1, d, r);
    let governing = governing(inst, p_bound);
    let effective = if governing == Governing::None { CliqueMode::Catalog } else { mode };
    let (cliques, stats) = cliques_of_size_q_through_0_1(inst, opts)?;
    let subfield = inst.subfield();
    let subfield_found = cliques.contains(&subfield);
    let exceptions: Vec<Vec<u32>> =
        cliques.iter().filter(|a| **a != subfield).map(|a| a.iter().map(|e| e.0).collect()).collect();

    let mut violations = Vec::new();
    if effective == CliqueMode::Verify {
        for a in &exceptions {
            violations.push(format!("THEOREM VIOLATION ({governing:?}): clique {a:?} is not F_q"));
        }
        if inst.fq_star_in_s() && !subfield_found {
            violations.push("F_q is a clique but was not found".to_string());
        }
    }

    let mut pipeline = Vec::new();
    let mut pipeline_errors = Vec::new();
    let v = inst.default_v();
    if let (Some(v), true) = (v, inst.fq_star_in_s()) {
        let emb = SubfieldEmbedding::new(&inst.big, inst.n)?;
        for a in &cliques {
            match clique_to_function_graph_with(inst, &emb, a, v) {
                Ok(fg) => {
                    if inst.r_le_half() && !fg.passed() && effective == CliqueMode::Verify {
                        violations
                            .push(format!("PIPELINE VIOLATION: clique {:?} fails the function-graph checks", fg.table));
                    }
                    pipeline.push(fg);
                }
                Err(e) => {
                    if inst.r_le_half() && effective == CliqueMode::Verify {
                        violations.push(format!("PIPELINE VIOLATION: {e}"));
                    }
                    pipeline_errors.push(e.to_string());
                }
            }
        }
    }

    Ok(CliqueReport {
        p: inst.p,
        n: inst.n,
        q: inst.q,
        d: inst.d(),
        cosets: inst.s.exponents().to_vec(),
        r: inst.r(),
        fq_star_in_s: inst.fq_star_in_s(),
        r_le_half: inst.r_le_half(),
        p_bound,
        governing,
        requested_mode: mode,
        mode: effective,
        cliques: cliques.iter().map(|a| a.iter().map(|e| e.0).collect()).collect(),
        subfield_found,
        exceptions,
        v: v.map(|e| e.0),
        pipeline,
        pipeline_errors,
        stats,
        violations,
    })
}
