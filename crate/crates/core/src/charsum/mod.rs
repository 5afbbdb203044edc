//! Multiplicative character sums over the prime field and their square-root
//! bounds.
//!
//! Every sum runs over `lambda in F_p` and is accumulated as a histogram of
//! character exponents: `counts[k]` is the number of terms equal to
//! `theta^k`. The complex value, the audit against the bound and the exact
//! cyclotomic form are all read off that histogram.

mod cyclotomic;
pub mod random;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use cyclotomic::{cyclotomic_polynomial, CyclotomicInt, EXACT_MAX_ORDER};

use crate::error::{Error, Result};
use crate::field::{Element, FieldCtx};
use crate::mult::{root_of_unity, CharacterRef};

/// Slack allowed when comparing a floating sum against its bound.
pub const AUDIT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumKind {
    /// `sum chi_1(lambda - xi_1) chi_2(lambda - xi_2)`.
    Weil,
    /// `sum chi((a u - b lambda v) / (u - lambda v))`.
    Quotient,
    /// `sum chi((b - lambda) / (a - lambda))` over `F_{p^(2n)}`.
    SubfieldQuotient,
}

impl SumKind {
    pub fn name(self) -> &'static str {
        match self {
            SumKind::Weil => "weil",
            SumKind::Quotient => "cor22",
            SumKind::SubfieldQuotient => "cor23",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Some hypothesis fails; the sum is still reported.
    NotApplicable,
}

/// One evaluated sum with everything needed to reproduce and judge it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumAudit {
    pub kind: SumKind,
    pub p: u32,
    /// Degree of the field the characters live on.
    pub n: u32,
    pub d: u32,
    pub powers: Vec<u32>,
    /// Element encodings, keyed by their role.
    pub inputs: BTreeMap<String, u32>,
    /// Orders of the multiplicative groups the triviality tests ran on.
    pub subgroup_orders: Vec<u64>,
    pub hypotheses: BTreeMap<String, bool>,
    /// `counts[k]` = number of terms equal to `theta^k`.
    pub counts: Vec<u64>,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub bound: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

impl SumAudit {
    #[allow(clippy::too_many_arguments)]
    fn finish(
        kind: SumKind,
        field: &FieldCtx,
        d: u32,
        powers: Vec<u32>,
        inputs: BTreeMap<String, u32>,
        subgroup_orders: Vec<u64>,
        hypotheses: BTreeMap<String, bool>,
        counts: Vec<u64>,
        bound: f64,
    ) -> Self {
        let sum: Complex64 = counts.iter().enumerate().map(|(k, &c)| root_of_unity(d, k as i64) * c as f64).sum();
        let abs = sum.norm();
        let verdict = if !hypotheses.values().all(|&h| h) {
            Verdict::NotApplicable
        } else if abs <= bound + AUDIT_TOL {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        SumAudit {
            kind,
            p: field.p(),
            n: field.n(),
            d,
            powers,
            inputs,
            subgroup_orders,
            hypotheses,
            counts,
            re: sum.re,
            im: sum.im,
            abs,
            bound,
            margin: bound - abs,
            verdict,
        }
    }

    pub fn sum(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.values().all(|&h| h)
    }

    /// The sum as an exact cyclotomic integer (orders up to
    /// [`EXACT_MAX_ORDER`]).
    pub fn exact_sum(&self) -> Result<CyclotomicInt> {
        let counts: Vec<i64> = self.counts.iter().map(|&c| c as i64).collect();
        CyclotomicInt::from_powers(self.d, &counts)
    }

    /// `|sum|^2` as an exact cyclotomic integer.
    pub fn exact_abs_squared(&self) -> Result<CyclotomicInt> {
        Ok(self.exact_sum()?.norm_squared())
    }
}

fn accumulate(d: u32, terms: impl Iterator<Item = Option<u32>>) -> Vec<u64> {
    let mut counts = vec![0u64; d as usize];
    for e in terms.flatten() {
        counts[e as usize] += 1;
    }
    counts
}

fn prime_field_elements(field: &FieldCtx) -> impl Iterator<Item = Element> + '_ {
    (0..field.p() as i64).map(|k| field.from_int(k))
}

fn sqrt_bound(factor: u32, p: u32) -> f64 {
    factor as f64 * (p as f64).sqrt()
}

/// Characters `chi_1 = chi^j1`, `chi_2 = chi^j2` of a common base order `d`
/// on `F_{p^n}`, and two shifts.
#[derive(Clone, Debug)]
pub struct WeilInstance {
    pub field: Arc<FieldCtx>,
    pub xi1: Element,
    pub xi2: Element,
    pub d: u32,
    pub j1: u32,
    pub j2: u32,
}

impl WeilInstance {
    pub fn new(field: Arc<FieldCtx>, xi1: Element, xi2: Element, d: u32, j1: u32, j2: u32) -> Result<Self> {
        field.element(xi1.0 as u64)?;
        field.element(xi2.0 as u64)?;
        CharacterRef::new(field.clone(), d, 0)?;
        Ok(WeilInstance { field, xi1, xi2, d, j1: j1 % d, j2: j2 % d })
    }

    /// `xi_1 = xi_2^(p^r)` for some `r < n`.
    pub fn galois_conjugate(&self) -> bool {
        (0..self.field.n()).any(|r| self.field.frobenius(self.xi2, r) == self.xi1)
    }

    fn character(&self, j: u32) -> CharacterRef {
        CharacterRef::new(self.field.clone(), self.d, j).expect("validated index")
    }

    /// Whether `chi^j` is nontrivial on `F_p[xi]^*`, and the order of that
    /// group.
    fn nontrivial_on_generated(&self, j: u32, xi: Element) -> (bool, u64) {
        let e = self.field.minimal_subfield_degree(xi);
        let order = (self.field.p() as u64).pow(e) - 1;
        let trivial = self.character(j).is_trivial_on_subfield(e).expect("e divides n");
        (!trivial, order)
    }

    /// Valid when the shifts are not conjugate and one of the characters is
    /// nontrivial on the field its shift generates.
    pub fn is_valid(&self) -> bool {
        let (c1, _) = self.nontrivial_on_generated(self.j1, self.xi1);
        let (c2, _) = self.nontrivial_on_generated(self.j2, self.xi2);
        !self.galois_conjugate() && (c1 || c2)
    }
}

/// `sum_{lambda in F_p} chi_1(lambda - xi_1) chi_2(lambda - xi_2)` against
/// `(2n - 1) sqrt(p)`.
pub fn weil_pair_sum(inst: &WeilInstance) -> SumAudit {
    let field = &inst.field;
    let (c1, o1) = inst.nontrivial_on_generated(inst.j1, inst.xi1);
    let (c2, o2) = inst.nontrivial_on_generated(inst.j2, inst.xi2);
    let chi1 = inst.character(inst.j1);
    let chi2 = inst.character(inst.j2);
    let d = inst.d;
    let counts = accumulate(
        d,
        prime_field_elements(field).map(|l| {
            let e1 = chi1.exponent(field.sub(l, inst.xi1))?;
            let e2 = chi2.exponent(field.sub(l, inst.xi2))?;
            Some((e1 + e2) % d)
        }),
    );
    let inputs = BTreeMap::from([("xi1".to_string(), inst.xi1.0), ("xi2".to_string(), inst.xi2.0)]);
    let hypotheses = BTreeMap::from([
        ("not_galois_conjugate".to_string(), !inst.galois_conjugate()),
        ("character_nontrivial_on_generated_field".to_string(), c1 || c2),
    ]);
    SumAudit::finish(
        SumKind::Weil,
        field,
        d,
        vec![inst.j1, inst.j2],
        inputs,
        vec![o1, o2],
        hypotheses,
        counts,
        sqrt_bound(2 * field.n() - 1, field.p()),
    )
}

/// `sum_{lambda in F_p} chi^j((a u - b lambda v) / (u - lambda v))` against
/// `(2n - 1) sqrt(p)`. The denominator vanishes for some `lambda` exactly
/// when `u / v` lies in `F_p`, which is rejected.
pub fn quotient_sum_cor22(
    field: &Arc<FieldCtx>,
    d: u32,
    j: u32,
    a: Element,
    b: Element,
    u: Element,
    v: Element,
) -> Result<SumAudit> {
    for (name, x) in [("a", a), ("b", b), ("u", u), ("v", v)] {
        field.element(x.0 as u64)?;
        if x.is_zero() {
            return Err(Error::DegenerateInput(format!("{name} must be nonzero")));
        }
    }
    let ratio = field.div(u, v)?;
    if field.in_subfield(ratio, 1) {
        return Err(Error::DegenerateInput("u / v lies in F_p, so u - lambda v vanishes".into()));
    }
    let chi = CharacterRef::new(field.clone(), d, j)?;
    let ab = field.div(a, b)?;
    let norm_exp = (field.q() as i64 - 1) / (field.p() as i64 - 1);
    let counts = accumulate(
        d,
        prime_field_elements(field).map(|l| {
            let num = field.sub(field.mul(a, u), field.mul(field.mul(b, l), v));
            let den = field.sub(u, field.mul(l, v));
            chi.exponent(field.div(num, den).expect("denominator is nonzero"))
        }),
    );
    let inputs = BTreeMap::from([
        ("a".to_string(), a.0),
        ("b".to_string(), b.0),
        ("u".to_string(), u.0),
        ("v".to_string(), v.0),
    ]);
    let hypotheses = BTreeMap::from([
        ("character_nontrivial".to_string(), !chi.is_trivial()),
        ("chi_a_over_b_ne_1".to_string(), chi.exponent(ab) != Some(0)),
        ("a_over_b_norm_ne_1".to_string(), field.pow(ab, norm_exp)? != Element::ONE),
        ("u_over_v_outside_prime_field".to_string(), true),
    ]);
    Ok(SumAudit::finish(
        SumKind::Quotient,
        field,
        d,
        vec![chi.power()],
        inputs,
        vec![field.group_order() as u64],
        hypotheses,
        counts,
        sqrt_bound(2 * field.n() - 1, field.p()),
    ))
}

/// `sum_{lambda in F_p} chi^j((b - lambda) / (a - lambda))` on
/// `F_{p^(2n)}`, against `(4n - 1) sqrt(p)`. The term with `a = lambda`
/// contributes 0.
pub fn subfield_quotient_sum_cor23(field: &Arc<FieldCtx>, d: u32, j: u32, a: Element, b: Element) -> Result<SumAudit> {
    if !field.n().is_multiple_of(2) {
        return Err(Error::ParamOutOfRange(format!("field degree {} is odd", field.n())));
    }
    field.element(a.0 as u64)?;
    field.element(b.0 as u64)?;
    if a.is_zero() {
        return Err(Error::DegenerateInput("a must be nonzero".into()));
    }
    let half = field.n() / 2;
    let chi = CharacterRef::new(field.clone(), d, j)?;
    let counts = accumulate(
        d,
        prime_field_elements(field).map(|l| {
            let den = field.sub(a, l);
            if den.is_zero() {
                return None;
            }
            chi.exponent(field.div(field.sub(b, l), den).expect("nonzero"))
        }),
    );
    let inputs = BTreeMap::from([("a".to_string(), a.0), ("b".to_string(), b.0)]);
    let hypotheses = BTreeMap::from([
        ("character_nontrivial".to_string(), !chi.is_trivial()),
        ("a_in_half_degree_subfield".to_string(), field.in_subfield(a, half)),
        ("b_generates_field".to_string(), field.minimal_subfield_degree(b) == field.n()),
    ]);
    Ok(SumAudit::finish(
        SumKind::SubfieldQuotient,
        field,
        d,
        vec![chi.power()],
        inputs,
        vec![field.group_order() as u64],
        hypotheses,
        counts,
        sqrt_bound(4 * half - 1, field.p()),
    ))
}

/// `L1 = sum_j |sum_k theta^(-j m_k)|` against `d sqrt(r)`, and
/// `L2 = sum_j |sum_k theta^(-j m_k)|^2`, which equals `d r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouAudit {
    pub d: u32,
    #[serde(rename = "M")]
    pub m: Vec<u32>,
    pub r: u32,
    pub l1: f64,
    pub l1_bound: f64,
    pub l2: f64,
    pub l2_expected: u64,
    pub l1_ok: bool,
    pub l2_ok: bool,
}

impl RouAudit {
    pub fn passed(&self) -> bool {
        self.l1_ok && self.l2_ok
    }
}

pub fn rou_l1_audit(d: u32, m: &[u32]) -> Result<RouAudit> {
    if m.is_empty() {
        return Err(Error::EmptyExponentSet);
    }
    let mut sorted = m.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateExponent(w[0]));
        }
    }
    if let Some(&big) = sorted.iter().find(|&&x| x >= d) {
        return Err(Error::ExponentOutOfRange { m: big, d });
    }
    let inner: Vec<Complex64> =
        (0..d as i64).map(|j| sorted.iter().map(|&mk| root_of_unity(d, -j * mk as i64)).sum()).collect();
    let r = sorted.len() as u32;
    let l1: f64 = inner.iter().map(|z| z.norm()).sum();
    let l2: f64 = inner.iter().map(|z| z.norm_sqr()).sum();
    let l1_bound = d as f64 * (r as f64).sqrt();
    let l2_expected = d as u64 * r as u64;
    Ok(RouAudit {
        d,
        m: sorted,
        r,
        l1,
        l1_bound,
        l2,
        l2_expected,
        l1_ok: l1 <= l1_bound + AUDIT_TOL,
        l2_ok: (l2 - l2_expected as f64).abs() <= 1e-6,
    })
}

/// All elements `sum c_i basis_i`, `c_i in F_p`, sorted by encoding.
fn span(field: &FieldCtx, basis: &[Element]) -> Vec<Element> {
    let mut out = vec![Element::ZERO];
    for &b in basis {
        let mut next = Vec::with_capacity(out.len() * field.p() as usize);
        for &x in &out {
            for c in 0..field.p() as i64 {
                next.push(field.add(x, field.mul(field.from_int(c), b)));
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

/// First element (by encoding) of the `F_p`-span of `basis` that lies in no
/// proper subfield of `F_{p^(2n)}`. The span must be `n`-dimensional,
/// contain 1 and differ from `F_{p^n}`; `p` odd and `n >= 2`.
pub fn subspace_generator(field: &FieldCtx, basis: &[Element]) -> Result<Element> {
    let degree = field.n();
    if field.p() == 2 || !degree.is_multiple_of(2) || degree < 4 {
        return Err(Error::PreconditionViolated(format!(
            "need odd p and even field degree at least 4 (p={}, degree={degree})",
            field.p()
        )));
    }
    let half = degree / 2;
    if basis.len() != half as usize {
        return Err(Error::PreconditionViolated(format!("need {half} basis vectors, got {}", basis.len())));
    }
    for &b in basis {
        field.element(b.0 as u64)?;
    }
    let mut v = span(field, basis);
    v.dedup();
    if v.len() as u64 != (field.p() as u64).pow(half) {
        return Err(Error::PreconditionViolated("basis is linearly dependent".into()));
    }
    if v.binary_search(&Element::ONE).is_err() {
        return Err(Error::PreconditionViolated("1 is not in the span".into()));
    }
    if v.iter().all(|&x| field.in_subfield(x, half)) {
        return Err(Error::PreconditionViolated("span is the half-degree subfield".into()));
    }
    v.into_iter()
        .find(|&x| field.minimal_subfield_degree(x) == degree)
        .ok_or_else(|| Error::NotFound("no generator in the span".into()))
}

/// The distinct 2-dimensional `F_p`-subspaces containing 1, each given by
/// the basis `[1, w]` with `w` the smallest element of the subspace outside
/// `F_p`. Ordered by `w`.
pub fn planes_through_one(field: &FieldCtx) -> Vec<[Element; 2]> {
    let mut seen = vec![false; field.q() as usize];
    let mut out = Vec::new();
    for w in field.elements() {
        if field.in_subfield(w, 1) || seen[w.0 as usize] {
            continue;
        }
        for x in span(field, &[Element::ONE, w]) {
            seen[x.0 as usize] = true;
        }
        out.push([Element::ONE, w]);
    }
    out
}
