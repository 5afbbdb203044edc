//! Dense polynomials over a prime field, just enough to pick a modulus.
//!
//! Coefficients are stored little-endian (`v[i]` is the coefficient of
//! `t^i`) and always reduced into `[0, p)`.

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime and a != 0
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Remainder of `a` modulo a nonzero `f`.
fn rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let df = f.len() - 1;
    let lead_inv = inv_mod(f[df], p);
    while r.len() > df {
        let top = r.len() - 1;
        let c = r[top] * lead_inv % p;
        let shift = top - df;
        for (i, &fi) in f.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * fi % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    rem(&out, f, p)
}

fn pow_mod(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = rem(a, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &base, f, p);
        }
        base = mul_mod(&base, &base, f, p);
        e >>= 1;
    }
    acc
}

fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Ben-Or test: a monic `f` of degree `n` is irreducible iff
/// `gcd(f, t^(p^i) - t) = 1` for every `1 <= i <= n/2`.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let t = vec![0u64, 1];
    let mut h = t.clone();
    for _ in 0..n / 2 {
        h = pow_mod(&h, p, f, p);
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        let g = gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// The monic irreducible of degree `n` over `F_p` whose lower coefficients
/// `(c_0, ..., c_{n-1})` have the smallest encoding `sum c_i p^i`.
/// Returns the lower coefficients only.
pub fn min_irreducible(p: u64, n: u32) -> Vec<u64> {
    let n = n as usize;
    let total = p.pow(n as u32);
    for enc in 0..total {
        let mut f = Vec::with_capacity(n + 1);
        let mut e = enc;
        for _ in 0..n {
            f.push(e % p);
            e /= p;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            f.pop();
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn has_root(f: &[u64], p: u64) -> bool {
        (0..p).any(|x| {
            let mut acc = 0u64;
            for &c in f.iter().rev() {
                acc = (acc * x + c) % p;
            }
            acc == 0
        })
    }

    #[test]
    fn quadratics_and_cubics_match_root_test() {
        for &p in &[2u64, 3, 5, 7, 11] {
            for deg in 2..=3usize {
                for enc in 0..p.pow(deg as u32) {
                    let mut f: Vec<u64> = (0..deg).map(|i| enc / p.pow(i as u32) % p).collect();
                    f.push(1);
                    assert_eq!(is_irreducible(&f, p), !has_root(&f, p), "p={p} f={f:?}");
                }
            }
        }
    }

    #[test]
    fn quartic_with_quadratic_factors_is_reducible() {
        // (t^2 + 1)^2 = t^4 + 2t^2 + 1 over F_3 has no roots
        let f = vec![1, 0, 2, 0, 1];
        assert!(!has_root(&f, 3));
        assert!(!is_irreducible(&f, 3));
        // t^4 + t + 1 over F_2 is irreducible
        assert!(is_irreducible(&[1, 1, 0, 0, 1], 2));
    }

    #[test]
    fn minimal_choices() {
        assert_eq!(min_irreducible(5, 1), vec![0]);
        assert_eq!(min_irreducible(5, 2), vec![2, 0]);
        assert_eq!(min_irreducible(2, 2), vec![1, 1]);
        assert_eq!(min_irreducible(2, 3), vec![1, 1, 0]);
    }
}
