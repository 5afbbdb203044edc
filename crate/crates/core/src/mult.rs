//! Multiplicative structure of `F_q^*`: unions of cosets of the index-`d`
//! subgroup `H = <g^d>`, multiplicative characters pinned by `chi(g) = theta`
//! with `theta = exp(2 pi i / d)`, and the character-sum expansion of a coset
//! union's indicator.
//!
//! A [`CosetUnion`] stores only its exponent set `M`; membership of `x` is
//! `log(x) mod d in M`. Characters are evaluated as exact exponents mod `d`;
//! complex values appear only where a caller asks for them.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{Element, FieldCtx};

/// `D = union over m in M of g^m H`, where `H` has index `d` in `F_q^*`.
#[derive(Clone)]
pub struct CosetUnion {
    field: Arc<FieldCtx>,
    d: u32,
    exponents: Vec<u32>,
    mask: Vec<bool>,
}

/// Wire form of a coset union.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetSpec {
    pub d: u32,
    #[serde(rename = "M")]
    pub m: Vec<u32>,
}

impl fmt::Debug for CosetUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CosetUnion(F_{}, d={}, M={:?})", self.field.q(), self.d, self.exponents)
    }
}

impl PartialEq for CosetUnion {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.d == other.d && self.exponents == other.exponents
    }
}

impl Eq for CosetUnion {}

fn check_index(field: &FieldCtx, d: u32) -> Result<()> {
    let order = field.group_order();
    if d == 0 || !order.is_multiple_of(d) {
        return Err(Error::IndexNotDividing { d: d as u64, order: order as u64 });
    }
    Ok(())
}

impl CosetUnion {
    pub fn new(field: Arc<FieldCtx>, d: u32, exponents: impl IntoIterator<Item = u32>) -> Result<Self> {
        check_index(&field, d)?;
        let mut mask = vec![false; d as usize];
        let mut sorted = Vec::new();
        for m in exponents {
            if m >= d {
                return Err(Error::ExponentOutOfRange { m, d });
            }
            if mask[m as usize] {
                return Err(Error::DuplicateExponent(m));
            }
            mask[m as usize] = true;
            sorted.push(m);
        }
        if sorted.is_empty() {
            return Err(Error::EmptyExponentSet);
        }
        sorted.sort_unstable();
        Ok(CosetUnion { field, d, exponents: sorted, mask })
    }

    /// The index-`d` subgroup itself.
    pub fn subgroup(field: Arc<FieldCtx>, d: u32) -> Result<Self> {
        Self::new(field, d, [0])
    }

    /// `{x^k : x in F_q^*}`, the subgroup of index `gcd(k, q - 1)`.
    pub fn power_residues(field: Arc<FieldCtx>, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::ParamOutOfRange("power must be at least 1".into()));
        }
        let d = arith::gcd(k, field.group_order() as u64) as u32;
        Self::subgroup(field, d)
    }

    /// Smallest union of index-`d` cosets containing every element of `set`.
    pub fn closure_of(field: Arc<FieldCtx>, d: u32, set: impl IntoIterator<Item = Element>) -> Result<Self> {
        check_index(&field, d)?;
        let mut mask = vec![false; d as usize];
        for x in set {
            mask[(field.log(x).map_err(|_| Error::ZeroInSet)? % d) as usize] = true;
        }
        let exps: Vec<u32> = (0..d).filter(|&m| mask[m as usize]).collect();
        Self::new(field, d, exps)
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    /// Index `d` of the subgroup `H`.
    pub fn index(&self) -> u32 {
        self.d
    }

    /// Sorted exponent set `M`.
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Number of cosets, `r = |M|`.
    pub fn r(&self) -> u32 {
        self.exponents.len() as u32
    }

    /// `|D| = r (q - 1) / d`.
    pub fn len(&self) -> u64 {
        self.r() as u64 * (self.field.group_order() / self.d) as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spec(&self) -> CosetSpec {
        CosetSpec { d: self.d, m: self.exponents.clone() }
    }

    #[inline]
    pub fn contains(&self, x: Element) -> bool {
        match self.field.log(x) {
            Ok(l) => self.mask[(l % self.d) as usize],
            Err(_) => false,
        }
    }

    /// Membership by discrete log, for callers that already hold `log(x)`.
    #[inline]
    pub fn contains_log(&self, log: u32) -> bool {
        self.mask[(log % self.d) as usize]
    }

    /// The `m` with `x in g^m H`.
    pub fn coset_of(&self, x: Element) -> Result<u32> {
        Ok(self.field.log(x)? % self.d)
    }

    /// `D / c`: every exponent shifted by `-log(c) mod d`.
    pub fn scale(&self, c: Element) -> Result<Self> {
        let shift = self.field.log(c)? % self.d;
        let exps = self.exponents.iter().map(|&m| (m + self.d - shift) % self.d);
        Self::new(self.field.clone(), self.d, exps)
    }

    /// Elements of `D` in increasing encoding order.
    pub fn elements(&self) -> Vec<Element> {
        self.field.nonzero().filter(|&x| self.contains(x)).collect()
    }

    pub fn is_subset_of(&self, other: &CosetUnion) -> bool {
        if *self.field != *other.field {
            return false;
        }
        // g^(m + d1 k) runs over the residues m + gcd(d1, d2) Z mod d2
        let step = arith::gcd(self.d as u64, other.d as u64) as u32;
        self.exponents.iter().all(|&m| (0..other.d / step).all(|k| other.mask[((m + k * step) % other.d) as usize]))
    }

    /// `|D D^-1 D^-1|`, computed on exponents mod `d`.
    pub fn triple_quotient_size(&self) -> u64 {
        let d = self.d as usize;
        let mut seen = vec![false; d];
        for &a in &self.exponents {
            for &b in &self.exponents {
                for &c in &self.exponents {
                    seen[(a as usize + 2 * d - b as usize - c as usize) % d] = true;
                }
            }
        }
        seen.iter().filter(|&&s| s).count() as u64 * (self.field.group_order() / self.d) as u64
    }

    /// Precomputed character-sum expansion of the indicator of `D`.
    pub fn psi_expansion(&self) -> PsiExpansion {
        PsiExpansion::new(self)
    }
}

/// `|{a b^-1 c^-1 : a, b, c in set}|` for an explicit set of nonzero elements.
pub fn triple_quotient_size(field: &FieldCtx, set: &[Element]) -> Result<u64> {
    let group = field.group_order() as usize;
    let mut logs = Vec::with_capacity(set.len());
    for &x in set {
        logs.push(field.log(x).map_err(|_| Error::ZeroInSet)? as usize);
    }
    if logs.is_empty() {
        return Err(Error::ParamOutOfRange("empty set".into()));
    }
    logs.sort_unstable();
    logs.dedup();
    let mut quotients = vec![false; group];
    for &a in &logs {
        for &b in &logs {
            quotients[(a + group - b) % group] = true;
        }
    }
    let mut triple = vec![false; group];
    for (e, _) in quotients.iter().enumerate().filter(|(_, &s)| s) {
        for &c in &logs {
            triple[(e + group - c) % group] = true;
        }
    }
    Ok(triple.iter().filter(|&&s| s).count() as u64)
}

/// The character `chi^j`, where `chi` has order `d` and `chi(g) = theta`.
#[derive(Clone)]
pub struct CharacterRef {
    field: Arc<FieldCtx>,
    d: u32,
    j: u32,
}

impl fmt::Debug for CharacterRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi^{} (order {} on F_{})", self.j, self.d, self.field.q())
    }
}

impl CharacterRef {
    pub fn new(field: Arc<FieldCtx>, d: u32, j: u32) -> Result<Self> {
        check_index(&field, d)?;
        Ok(CharacterRef { field, d, j: j % d })
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn order_of_base(&self) -> u32 {
        self.d
    }

    pub fn power(&self) -> u32 {
        self.j
    }

    pub fn is_trivial(&self) -> bool {
        self.j == 0
    }

    /// `chi^j(x) = theta^exponent`, or `None` at zero (where `chi^j(0) = 0`,
    /// the trivial power included).
    #[inline]
    pub fn exponent(&self, x: Element) -> Option<u32> {
        let l = self.field.log(x).ok()?;
        Some(((l as u64 % self.d as u64) * self.j as u64 % self.d as u64) as u32)
    }

    pub fn eval(&self, x: Element) -> Complex64 {
        match self.exponent(x) {
            Some(e) => root_of_unity(self.d, e as i64),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// The complex conjugate character `chi^(d - j)`.
    pub fn conj(&self) -> Self {
        CharacterRef { field: self.field.clone(), d: self.d, j: (self.d - self.j) % self.d }
    }

    /// Whether `chi^j` is identically 1 on `F_{p^e}^*` (`e | n`). Tested on
    /// the generator `g^((q-1)/(p^e-1))` of that subgroup.
    pub fn is_trivial_on_subfield(&self, e: u32) -> Result<bool> {
        let gen = self.field.subfield_generator(e)?;
        Ok(self.exponent(gen) == Some(0))
    }
}

/// `exp(2 pi i k / d)`.
pub fn root_of_unity(d: u32, k: i64) -> Complex64 {
    let k = k.rem_euclid(d as i64);
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)
}

/// `psi(x) = (1/d) sum_j (sum_k theta^(-j m_k)) chi^j(x)`, with the inner
/// weights precomputed.
#[derive(Clone, Debug)]
pub struct PsiExpansion {
    d: u32,
    weights: Vec<Complex64>,
    roots: Vec<Complex64>,
}

impl PsiExpansion {
    fn new(set: &CosetUnion) -> Self {
        let d = set.d;
        let roots: Vec<Complex64> = (0..d).map(|k| root_of_unity(d, k as i64)).collect();
        let weights = (0..d)
            .map(|j| {
                set.exponents
                    .iter()
                    .map(|&m| roots[((d as u64 - (j as u64 * m as u64) % d as u64) % d as u64) as usize])
                    .sum()
            })
            .collect();
        PsiExpansion { d, weights, roots }
    }

    /// `sum_k theta^(-j m_k)` for each `j`.
    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// Evaluates the expansion at an element with discrete log `log`.
    pub fn eval_log(&self, log: u32) -> Complex64 {
        let d = self.d as u64;
        let l = log as u64 % d;
        let total: Complex64 =
            self.weights.iter().enumerate().map(|(j, w)| w * self.roots[(j as u64 * l % d) as usize]).sum();
        total / self.d as f64
    }
}

/// `psi(x)` for nonzero `x`; agrees with the indicator of `set` up to
/// rounding.
pub fn psi_indicator(set: &CosetUnion, x: Element) -> Result<Complex64> {
    let l = set.field.log(x)?;
    Ok(set.psi_expansion().eval_log(l))
}

/// One row of a psi audit: the element, `psi(x)` and true membership.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiAuditRow {
    pub x: u32,
    pub re: f64,
    pub im: f64,
    pub member: bool,
}

/// `psi` at every nonzero element, in encoding order.
pub fn psi_audit(set: &CosetUnion) -> Vec<PsiAuditRow> {
    let expansion = set.psi_expansion();
    set.field
        .nonzero()
        .map(|x| {
            let v = expansion.eval_log(set.field.log(x).expect("nonzero"));
            PsiAuditRow { x: x.0, re: v.re, im: v.im, member: set.contains(x) }
        })
        .collect()
}
