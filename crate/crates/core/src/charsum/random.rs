//! Seeded random instances for the character-sum audits.
//!
//! Instances are drawn field by field: first a field `(p, n)` for every
//! instance, then each instance is completed from its own derived seed, so
//! the output depends only on the master seed and the count, never on the
//! number of worker threads.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{quotient_sum_cor22, subfield_quotient_sum_cor23, weil_pair_sum, SumAudit, SumKind, WeilInstance};
use crate::arith;
use crate::error::{Error, Result};
use crate::field::{build_field, Element, FieldCtx};
use crate::mult::CharacterRef;

/// Field ranges for random instances. Only fields with `q <= max_q` are
/// drawn, so the discrete-log tables stay small.
#[derive(Clone, Copy, Debug)]
pub struct SamplerConfig {
    pub max_p: u64,
    /// Largest degree of the base field (for the subfield sums, of the
    /// half-degree subfield).
    pub max_n: u32,
    pub max_q: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { max_p: 97, max_n: 4, max_q: 1 << 20 }
    }
}

const MAX_ATTEMPTS: usize = 10_000;

/// `(p, degree)` pairs for the requested kind of sum.
pub fn admissible_fields(kind: SumKind, cfg: &SamplerConfig) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in (2..=cfg.max_p).filter(|&p| arith::is_prime(p)) {
        for n in 1..=cfg.max_n {
            let degree = match kind {
                SumKind::SubfieldQuotient => 2 * n,
                _ => n,
            };
            let Some(q) = arith::checked_pow(p, degree) else { continue };
            if q > cfg.max_q || q < 3 {
                continue;
            }
            // u / v outside F_p needs a proper extension, and the norm
            // condition on a / b is unsatisfiable in characteristic 2
            if kind == SumKind::Quotient && (n < 2 || p == 2) {
                continue;
            }
            out.push((p, degree));
        }
    }
    out
}

fn random_nonzero(field: &FieldCtx, rng: &mut ChaCha8Rng) -> Element {
    Element(rng.gen_range(1..field.q()))
}

fn random_index(field: &FieldCtx, rng: &mut ChaCha8Rng) -> u32 {
    let divisors: Vec<u32> =
        arith::divisors(field.group_order() as u64).into_iter().filter(|&d| d >= 2).map(|d| d as u32).collect();
    *divisors.choose(rng).expect("q >= 3")
}

fn weil_instance(field: &Arc<FieldCtx>, rng: &mut ChaCha8Rng) -> Result<SumAudit> {
    for _ in 0..MAX_ATTEMPTS {
        let d = random_index(field, rng);
        let (j1, j2) = (rng.gen_range(0..d), rng.gen_range(0..d));
        let xi1 = Element(rng.gen_range(0..field.q()));
        let xi2 = Element(rng.gen_range(0..field.q()));
        let inst = WeilInstance::new(field.clone(), xi1, xi2, d, j1, j2)?;
        if inst.is_valid() {
            return Ok(weil_pair_sum(&inst));
        }
    }
    Err(Error::NotFound(format!("no valid pair-sum instance on F_{}", field.q())))
}

fn quotient_instance(field: &Arc<FieldCtx>, rng: &mut ChaCha8Rng) -> Result<SumAudit> {
    let norm_exp = (field.q() as i64 - 1) / (field.p() as i64 - 1);
    for _ in 0..MAX_ATTEMPTS {
        let d = random_index(field, rng);
        let j = rng.gen_range(1..d);
        let chi = CharacterRef::new(field.clone(), d, j)?;
        let (a, b) = (random_nonzero(field, rng), random_nonzero(field, rng));
        let (u, v) = (random_nonzero(field, rng), random_nonzero(field, rng));
        let ab = field.div(a, b)?;
        if chi.exponent(ab) == Some(0) || field.pow(ab, norm_exp)? == Element::ONE {
            continue;
        }
        if field.in_subfield(field.div(u, v)?, 1) {
            continue;
        }
        return quotient_sum_cor22(field, d, j, a, b, u, v);
    }
    Err(Error::NotFound(format!("no valid quotient-sum instance on F_{}", field.q())))
}

fn subfield_instance(field: &Arc<FieldCtx>, rng: &mut ChaCha8Rng) -> Result<SumAudit> {
    let half = field.n() / 2;
    let sub: Vec<Element> = field.subfield_elements(half)?.into_iter().filter(|x| !x.is_zero()).collect();
    for _ in 0..MAX_ATTEMPTS {
        let d = random_index(field, rng);
        let j = rng.gen_range(1..d);
        let a = *sub.choose(rng).expect("nonempty subfield");
        let b = Element(rng.gen_range(0..field.q()));
        if field.minimal_subfield_degree(b) != field.n() {
            continue;
        }
        return subfield_quotient_sum_cor23(field, d, j, a, b);
    }
    Err(Error::NotFound(format!("no valid subfield-sum instance on F_{}", field.q())))
}

/// `count` audits of valid instances of `kind`, in draw order.
pub fn random_audits(kind: SumKind, count: usize, seed: u64, cfg: &SamplerConfig) -> Result<Vec<SumAudit>> {
    let fields = admissible_fields(kind, cfg);
    if fields.is_empty() {
        return Err(Error::ParamOutOfRange("no admissible field in the sampler range".into()));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<((u64, u32), u64)> =
        (0..count).map(|_| (*fields.choose(&mut master).expect("nonempty"), master.gen())).collect();

    let mut by_field: BTreeMap<(u64, u32), Vec<usize>> = BTreeMap::new();
    for (i, (f, _)) in draws.iter().enumerate() {
        by_field.entry(*f).or_default().push(i);
    }

    let mut out: Vec<Option<SumAudit>> = vec![None; count];
    for ((p, degree), members) in by_field {
        let field = build_field(p, degree)?;
        let audits: Vec<Result<SumAudit>> = members
            .par_iter()
            .map(|&i| {
                let mut rng = ChaCha8Rng::seed_from_u64(draws[i].1);
                match kind {
                    SumKind::Weil => weil_instance(&field, &mut rng),
                    SumKind::Quotient => quotient_instance(&field, &mut rng),
                    SumKind::SubfieldQuotient => subfield_instance(&field, &mut rng),
                }
            })
            .collect();
        for (&i, audit) in members.iter().zip(audits) {
            out[i] = Some(audit?);
        }
    }
    Ok(out.into_iter().map(|a| a.expect("every draw filled")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charsum::Verdict;

    #[test]
    fn sampler_ranges() {
        let cfg = SamplerConfig::default();
        let weil = admissible_fields(SumKind::Weil, &cfg);
        assert!(weil.contains(&(97, 3)) && weil.contains(&(31, 4)) && !weil.contains(&(37, 4)));
        assert!(!weil.contains(&(2, 1)));
        assert!(admissible_fields(SumKind::Quotient, &cfg).iter().all(|&(_, n)| n >= 2));
        let sub = admissible_fields(SumKind::SubfieldQuotient, &cfg);
        assert!(sub.iter().all(|&(_, n)| n % 2 == 0) && sub.contains(&(97, 2)));
    }

    #[test]
    fn seeded_batches_are_reproducible_and_valid() {
        let cfg = SamplerConfig { max_p: 13, max_n: 2, max_q: 200 };
        for kind in [SumKind::Weil, SumKind::Quotient, SumKind::SubfieldQuotient] {
            let a = random_audits(kind, 40, 7, &cfg).unwrap();
            let b = random_audits(kind, 40, 7, &cfg).unwrap();
            assert_eq!(a, b);
            assert!(a.iter().all(|x| x.hypotheses_hold() && x.verdict == Verdict::Pass), "{kind:?}");
        }
    }
}
