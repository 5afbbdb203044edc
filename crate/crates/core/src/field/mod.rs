//! Explicit finite fields `F_{p^n}` with full discrete-log tables.
//!
//! An element is stored by its canonical encoding: the coefficient vector
//! `(c_0, ..., c_{n-1})` of `sum c_i t^i` read as the base-`p` integer
//! `sum c_i p^i`. The modulus is the monic irreducible of degree `n` whose
//! lower coefficients have the smallest encoding, and the primitive root `g`
//! is the generator of `F_q^*` with the smallest encoding, so two builds of
//! the same `(p, n)` are identical.
//!
//! Multiplication, inversion and powers go through the exp/log tables.
//! Addition in odd characteristic uses Zech logarithms
//! (`zech[k] = log(1 + g^k)`); in characteristic two it is XOR on encodings.

mod poly;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

pub use poly::{is_irreducible, min_irreducible};

/// Largest field size `build_field` accepts unless told otherwise.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 22;

const NO_LOG: u32 = u32::MAX;

/// A field element by canonical encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub u32);

impl Element {
    pub const ZERO: Element = Element(0);
    pub const ONE: Element = Element(1);

    #[inline]
    pub fn encoding(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Wire form of a field: enough to rebuild and cross-check it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    /// Coefficients `c_0, ..., c_n` of the modulus, leading 1 included.
    pub modulus: Vec<u32>,
    /// Encoding of the primitive root.
    pub g: u32,
}

/// A fully materialized `F_{p^n}`. Immutable after construction.
pub struct FieldCtx {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: Element,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    log_minus_one: u32,
    frob_shift: Vec<u64>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .field("g", &self.generator)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n
    }
}

impl Eq for FieldCtx {}

/// Builds `F_{p^n}` under the default size cap.
pub fn build_field(p: u64, n: u32) -> Result<Arc<FieldCtx>> {
    FieldCtx::with_cap(p, n, DEFAULT_FIELD_CAP).map(Arc::new)
}

/// Builds the field of order `q`, which must be a prime power.
pub fn build_field_of_order(q: u64) -> Result<Arc<FieldCtx>> {
    let (p, n) = arith::prime_power(q).ok_or(Error::NonPrime(q))?;
    build_field(p, n)
}

impl FieldCtx {
    pub fn with_cap(p: u64, n: u32, cap: u64) -> Result<FieldCtx> {
        if !arith::is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if n == 0 {
            return Err(Error::DegreeZero);
        }
        let cap = cap.min(u32::MAX as u64);
        let q = match arith::checked_pow(p, n) {
            Some(q) if q <= cap => q,
            Some(q) => return Err(Error::FieldTooLarge { q, cap }),
            None => return Err(Error::FieldTooLarge { q: u64::MAX, cap }),
        };

        let modulus: Vec<u32> = min_irreducible(p, n).into_iter().map(|c| c as u32).collect();
        let arith = DigitArith { p: p as u32, n: n as usize, modulus: &modulus };

        let order = q - 1;
        let cofactors: Vec<u64> = arith::prime_factors(order).into_iter().map(|l| order / l).collect();
        let generator = (1..q as u32)
            .find(|&enc| {
                let digits = arith.digits(enc);
                cofactors.iter().all(|&c| arith.pow(&digits, c) != arith.one())
            })
            .expect("F_q^* is cyclic");

        let q32 = q as u32;
        let group = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * group];
        let mut log = vec![NO_LOG; q as usize];
        let g_digits = arith.digits(generator);
        let mut cur = arith.one();
        for e in 0..group {
            let enc = arith.encode(&cur);
            exp[e] = enc;
            exp[e + group] = enc;
            log[enc as usize] = e as u32;
            cur = arith.mul(&cur, &g_digits);
        }
        debug_assert!(log[1..].iter().all(|&l| l != NO_LOG));

        let zech = (0..group)
            .map(|k| {
                let x = exp[k];
                let c0 = x % p as u32;
                let y = x - c0 + (c0 + 1) % p as u32;
                if y == 0 {
                    NO_LOG
                } else {
                    log[y as usize]
                }
            })
            .collect();
        let log_minus_one = log[(p - 1) as usize];
        let mut frob_shift = Vec::with_capacity(n as usize);
        let mut shift = 1u64;
        for _ in 0..n {
            frob_shift.push(shift);
            shift = shift * p % order.max(1);
        }

        Ok(FieldCtx {
            p: p as u32,
            n,
            q: q32,
            modulus,
            generator: Element(generator),
            exp,
            log,
            zech,
            log_minus_one,
            frob_shift,
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Order of the multiplicative group, `q - 1`.
    #[inline]
    pub fn group_order(&self) -> u32 {
        self.q - 1
    }

    /// Lower coefficients `c_0, ..., c_{n-1}` of the monic modulus.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn generator(&self) -> Element {
        self.generator
    }

    pub fn spec(&self) -> FieldSpec {
        let mut modulus = self.modulus.clone();
        modulus.push(1);
        FieldSpec { p: self.p, n: self.n, modulus, g: self.generator.0 }
    }

    /// Checks that `spec` describes this field exactly.
    pub fn matches(&self, spec: &FieldSpec) -> bool {
        self.spec() == *spec
    }

    pub fn element(&self, encoding: u64) -> Result<Element> {
        if encoding < self.q as u64 {
            Ok(Element(encoding as u32))
        } else {
            Err(Error::ElementOutOfRange { value: encoding, q: self.q as u64 })
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, k: i64) -> Element {
        Element(k.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Element> {
        if coeffs.len() > self.n as usize {
            return Err(Error::ParamOutOfRange(format!("{} coefficients for a degree-{} field", coeffs.len(), self.n)));
        }
        let mut enc: u64 = 0;
        for &c in coeffs.iter().rev() {
            if c >= self.p {
                return Err(Error::ElementOutOfRange { value: c as u64, q: self.p as u64 });
            }
            enc = enc * self.p as u64 + c as u64;
        }
        Ok(Element(enc as u32))
    }

    /// Coefficient vector `(c_0, ..., c_{n-1})`.
    pub fn coeffs(&self, x: Element) -> Vec<u32> {
        let mut e = x.0;
        (0..self.n)
            .map(|_| {
                let c = e % self.p;
                e /= self.p;
                c
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.q).map(Element)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Element> {
        (1..self.q).map(Element)
    }

    #[inline]
    pub fn add(&self, a: Element, b: Element) -> Element {
        if self.p == 2 {
            return Element(a.0 ^ b.0);
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let group = self.q - 1;
        let mut k = lb + group - la;
        if k >= group {
            k -= group;
        }
        match self.zech[k as usize] {
            NO_LOG => Element::ZERO,
            z => Element(self.exp[(la + z) as usize]),
        }
    }

    #[inline]
    pub fn neg(&self, a: Element) -> Element {
        if a.0 == 0 {
            return a;
        }
        Element(self.exp[(self.log[a.0 as usize] + self.log_minus_one) as usize])
    }

    #[inline]
    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        if a.0 == 0 || b.0 == 0 {
            return Element::ZERO;
        }
        Element(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Element) -> Result<Element> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let group = self.q - 1;
        Ok(Element(self.exp[((group - self.log[a.0 as usize]) % group) as usize]))
    }

    #[inline]
    pub fn div(&self, a: Element, b: Element) -> Result<Element> {
        if b.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        if a.0 == 0 {
            return Ok(Element::ZERO);
        }
        let group = self.q - 1;
        Ok(Element(self.exp[(self.log[a.0 as usize] + group - self.log[b.0 as usize]) as usize]))
    }

    /// `a^k`; negative `k` requires `a != 0`.
    pub fn pow(&self, a: Element, k: i64) -> Result<Element> {
        if a.0 == 0 {
            return match k {
                0 => Ok(Element::ONE),
                k if k > 0 => Ok(Element::ZERO),
                _ => Err(Error::DivisionByZero),
            };
        }
        let group = (self.q - 1) as i128;
        let e = (self.log[a.0 as usize] as i128 * k as i128).rem_euclid(group);
        Ok(Element(self.exp[e as usize]))
    }

    /// `x^(p^j)`, with `j` taken mod `n`.
    #[inline]
    pub fn frobenius(&self, x: Element, j: u32) -> Element {
        if x.0 == 0 {
            return x;
        }
        let shift = self.frob_shift[(j % self.n) as usize];
        let e = self.log[x.0 as usize] as u64 * shift % (self.q - 1) as u64;
        Element(self.exp[e as usize])
    }

    /// Discrete logarithm to base `g`, in `[0, q - 2]`.
    #[inline]
    pub fn log(&self, x: Element) -> Result<u32> {
        if x.0 == 0 {
            Err(Error::LogOfZero)
        } else {
            Ok(self.log[x.0 as usize])
        }
    }

    /// `g^e` for any exponent.
    #[inline]
    pub fn exp(&self, e: u64) -> Element {
        Element(self.exp[(e % (self.q - 1) as u64) as usize])
    }

    /// Divisors `d | n` such that `x` lies in `F_{p^d}`. Always contains `n`.
    pub fn subfield_profile(&self, x: Element) -> Vec<u32> {
        arith::divisors(self.n as u64).into_iter().map(|d| d as u32).filter(|&d| self.frobenius(x, d) == x).collect()
    }

    /// Degree of `F_p[x]` over `F_p`.
    pub fn minimal_subfield_degree(&self, x: Element) -> u32 {
        self.subfield_profile(x)[0]
    }

    pub fn in_subfield(&self, x: Element, degree: u32) -> bool {
        self.n.is_multiple_of(degree) && self.frobenius(x, degree) == x
    }

    /// Generator of `F_{p^e}^*` for `e | n`, namely `g^((q-1)/(p^e-1))`.
    pub fn subfield_generator(&self, e: u32) -> Result<Element> {
        if e == 0 || !self.n.is_multiple_of(e) {
            return Err(Error::ParamOutOfRange(format!("{e} does not divide {}", self.n)));
        }
        let sub = (self.p as u64).pow(e) - 1;
        Ok(self.exp((self.q as u64 - 1) / sub))
    }

    /// Elements of the subfield `F_{p^e}` in increasing encoding order.
    pub fn subfield_elements(&self, e: u32) -> Result<Vec<Element>> {
        let gen = self.subfield_generator(e)?;
        let size = (self.p as u64).pow(e) - 1;
        let step = self.log[gen.0 as usize] as u64;
        let mut out: Vec<Element> = (0..size).map(|k| self.exp(k * step)).collect();
        out.push(Element::ZERO);
        out.sort_unstable();
        Ok(out)
    }

    /// Human-readable polynomial form, e.g. `3t^2+t+4`.
    pub fn format(&self, x: Element) -> String {
        let coeffs = self.coeffs(x);
        let mut terms = Vec::new();
        for (i, &c) in coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let term = match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}t^{i}"),
            };
            terms.push(term);
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    /// Digit-wise addition, independent of the Zech table.
    #[cfg(test)]
    pub(crate) fn add_by_digits(&self, a: Element, b: Element) -> Element {
        let ca = self.coeffs(a);
        let cb = self.coeffs(b);
        let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % self.p).collect();
        self.from_coeffs(&sum).expect("digits reduced")
    }
}

/// Coefficient-vector arithmetic modulo the field polynomial, used only while
/// building the tables.
struct DigitArith<'a> {
    p: u32,
    n: usize,
    modulus: &'a [u32],
}

impl DigitArith<'_> {
    fn one(&self) -> Vec<u32> {
        let mut v = vec![0; self.n];
        v[0] = 1;
        v
    }

    fn digits(&self, mut enc: u32) -> Vec<u32> {
        (0..self.n)
            .map(|_| {
                let c = enc % self.p;
                enc /= self.p;
                c
            })
            .collect()
    }

    fn encode(&self, v: &[u32]) -> u32 {
        v.iter().rev().fold(0u32, |acc, &c| acc * self.p + c)
    }

    fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        let n = self.n;
        let mut wide = vec![0u64; 2 * n - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                wide[i + j] = (wide[i + j] + ai as u64 * bj as u64) % p;
            }
        }
        // t^n = -(c_0 + c_1 t + ... + c_{n-1} t^{n-1})
        for k in (n..2 * n - 1).rev() {
            let c = wide[k];
            if c == 0 {
                continue;
            }
            wide[k] = 0;
            for (i, &mi) in self.modulus.iter().enumerate() {
                let idx = k - n + i;
                wide[idx] = (wide[idx] + (p - c) * mi as u64) % p;
            }
        }
        wide.truncate(n);
        wide.into_iter().map(|c| c as u32).collect()
    }

    fn pow(&self, a: &[u32], mut e: u64) -> Vec<u32> {
        let mut acc = self.one();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}
