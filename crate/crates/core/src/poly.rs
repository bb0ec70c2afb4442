//! Dense polynomials over a prime field, coefficients stored constant term first.
//!
//! Only the handful of routines needed for building and testing field moduli.

pub(crate) fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn inv_mod_p(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo a non-zero `m`.
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod_p(m[dm], p);
    while r.len() > dm {
        let k = r.len() - 1 - dm;
        let c = r[r.len() - 1] * lead_inv % p;
        if c != 0 {
            for (j, &mj) in m.iter().enumerate() {
                r[k + j] = (r[k + j] + p - c * mj % p) % p;
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

pub(crate) fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn powmod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(&acc, &b, m, p);
        }
        b = mulmod(&b, &b, m, p);
        exp >>= 1;
    }
    acc
}

/// Monic gcd.
pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(&lead) = x.last() {
        let inv = inv_mod_p(lead, p);
        for c in x.iter_mut() {
            *c = *c * inv % p;
        }
    }
    x
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm, if `gcd(a, m) = 1`.
pub(crate) fn inv_mod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    // invariant: s_i * a == r_i (mod m)
    let mut r0 = m.to_vec();
    let mut r1 = rem(a, m, p);
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    if r0.len() != 1 {
        return None;
    }
    let c = inv_mod_p(r0[0], p);
    let out: Vec<u64> = s0.iter().map(|x| x * c % p).collect();
    Some(rem(&out, m, p))
}

pub(crate) fn divrem(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod_p(m[dm], p);
    if r.len() <= dm {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - dm];
    while r.len() > dm {
        let k = r.len() - 1 - dm;
        let c = r[r.len() - 1] * lead_inv % p;
        q[k] = c;
        if c != 0 {
            for (j, &mj) in m.iter().enumerate() {
                r[k + j] = (r[k + j] + p - c * mj % p) % p;
            }
        }
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

/// Ben-Or irreducibility test for a monic polynomial of degree >= 1.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = vec![0, 1];
    let mut h = x.clone();
    for _ in 1..=n / 2 {
        h = powmod(&h, p, f, p);
        let g = gcd(f, &sub(&h, &x, p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducible_quadratics_mod_3() {
        // x^2 + 1, x^2 + x + 2, x^2 + 2x + 2 are the irreducible monic quadratics over F_3
        let irr: Vec<Vec<u64>> = (0..9u64)
            .map(|i| vec![i / 3, i % 3, 1])
            .filter(|f| is_irreducible(f, 3))
            .collect();
        assert_eq!(irr, vec![vec![1, 0, 1], vec![2, 1, 1], vec![2, 2, 1]]);
    }

    #[test]
    fn inverse_mod_modulus() {
        let m = vec![1, 0, 1];
        let a = vec![1, 1];
        let inv = inv_mod(&a, &m, 3).unwrap();
        assert_eq!(mulmod(&a, &inv, &m, 3), vec![1]);
        assert!(inv_mod(&[0, 0, 1], &[0, 0, 1], 3).is_none());
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors(177148), vec![2, 67, 661]);
        assert_eq!(prime_factors(126), vec![2, 3, 7]);
        assert!(is_prime(661) && !is_prime(9));
    }
}
