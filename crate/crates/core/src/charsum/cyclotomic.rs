//! Exact arithmetic in `Z[theta]`, `theta = exp(2 pi i / d)`, for small `d`.
//!
//! Values are kept reduced modulo the cyclotomic polynomial `Phi_d`, so two
//! cyclotomic integers are equal exactly when their coefficient vectors are.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::mult::root_of_unity;

/// Largest order supported by the exact mode.
pub const EXACT_MAX_ORDER: u32 = 12;

/// Integer coefficients of `Phi_d`, lowest degree first.
pub fn cyclotomic_polynomial(d: u32) -> Vec<i64> {
    // x^d - 1 divided by Phi_e for every proper divisor e
    let mut poly = vec![0i64; d as usize + 1];
    poly[0] = -1;
    poly[d as usize] = 1;
    for e in arith::divisors(d as u64) {
        if e as u32 == d {
            continue;
        }
        poly = divide_monic(&poly, &cyclotomic_polynomial(e as u32));
    }
    poly
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (i, &b) in den.iter().enumerate() {
            rem[k + i] -= c * b;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// An element of `Z[theta_d]` in the basis `1, theta, ..., theta^(phi(d)-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclotomicInt {
    pub d: u32,
    pub coeffs: Vec<i64>,
}

impl CyclotomicInt {
    /// `sum_k counts[k] theta^k`, reduced.
    pub fn from_powers(d: u32, counts: &[i64]) -> Result<Self> {
        if d == 0 || d > EXACT_MAX_ORDER {
            return Err(Error::ParamOutOfRange(format!("exact mode supports orders 1..={EXACT_MAX_ORDER}, got {d}")));
        }
        let mut full = vec![0i64; d as usize];
        for (k, &c) in counts.iter().enumerate() {
            full[k % d as usize] += c;
        }
        Ok(Self::reduce(d, full))
    }

    pub fn from_integer(d: u32, k: i64) -> Result<Self> {
        Self::from_powers(d, &[k])
    }

    fn reduce(d: u32, mut full: Vec<i64>) -> Self {
        let phi = cyclotomic_polynomial(d);
        let deg = phi.len() - 1;
        for k in (deg..full.len()).rev() {
            let c = full[k];
            if c != 0 {
                for (i, &b) in phi.iter().enumerate() {
                    full[k - deg + i] -= c * b;
                }
            }
        }
        full.truncate(deg);
        CyclotomicInt { d, coeffs: full }
    }

    /// Complex conjugate: `theta^k -> theta^(d-k)`.
    pub fn conj(&self) -> Self {
        let d = self.d as usize;
        let mut full = vec![0i64; d];
        for (k, &c) in self.coeffs.iter().enumerate() {
            full[(d - k) % d] += c;
        }
        Self::reduce(self.d, full)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "mixed cyclotomic orders");
        let d = self.d as usize;
        let mut full = vec![0i64; d];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                full[(i + j) % d] += a * b;
            }
        }
        Self::reduce(self.d, full)
    }

    /// `|z|^2 = z * conj(z)`.
    pub fn norm_squared(&self) -> Self {
        self.mul(&self.conj())
    }

    /// The rational integer this equals, if any.
    pub fn as_integer(&self) -> Option<i64> {
        if self.coeffs.iter().skip(1).all(|&c| c == 0) {
            Some(self.coeffs.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.coeffs.iter().enumerate().map(|(k, &c)| root_of_unity(self.d, k as i64) * c as f64).sum()
    }
}
