//! Elementary integer number theory on machine words.
//!
//! Everything here works on `u64` and is sized for desk-scale moduli
//! (conductors in the low thousands, residue fields up to a few million
//! elements). Cyclotomic polynomials are the one exception and are kept as
//! `BigInt` coefficient vectors.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Extended Euclid on signed values: returns `(g, x, y)` with `a x + b y = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd((a % m) as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

/// Prime factorisation by trial division, primes in increasing order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

pub fn totient(n: u64) -> u64 {
    factor(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Exponent of `p` in `n` (`n > 0`).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n.is_multiple_of(p) && n > 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Multiplicative order of `a` modulo `m`; `None` if `a` is not a unit.
pub fn mult_order(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if gcd(a % m, m) != 1 {
        return None;
    }
    let lam = carmichael(m);
    let mut ord = lam;
    for (p, _) in factor(lam) {
        while ord.is_multiple_of(p) && pow_mod(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    Some(ord)
}

/// Carmichael function (exponent of `(Z/m)^×`).
pub fn carmichael(m: u64) -> u64 {
    factor(m).into_iter().fold(1, |acc, (p, e)| {
        let l = if p == 2 {
            match e {
                1 => 1,
                2 => 2,
                _ => 1 << (e - 2),
            }
        } else {
            (p - 1) * p.pow(e - 1)
        };
        lcm(acc, l)
    })
}

/// Smallest primitive root modulo an odd prime power `p^e`.
pub fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let pe = p.pow(e);
    let phi = (p - 1) * p.pow(e - 1);
    let fs = prime_divisors(phi);
    (2..pe)
        .find(|&g| gcd(g, p) == 1 && fs.iter().all(|&q| pow_mod(g, phi / q, pe) != 1))
        .unwrap_or(1)
}

/// Chinese remainder for pairwise coprime moduli.
pub fn crt(residues: &[(u64, u64)]) -> (u64, u64) {
    let mut x: u64 = 0;
    let mut m: u64 = 1;
    for &(r, n) in residues {
        // x' ≡ x mod m, x' ≡ r mod n
        let inv = inv_mod(m % n, n).expect("crt moduli must be coprime");
        let diff = (r % n + n - x % n) % n;
        let t = mul_mod(diff, inv, n);
        x += m * t;
        m *= n;
        x %= m;
    }
    (x, m)
}

/// Units of `Z/m` in increasing order.
pub fn units(m: u64) -> Vec<u64> {
    if m == 1 {
        return vec![0];
    }
    (1..m).filter(|&a| gcd(a, m) == 1).collect()
}

/// Integer coefficients (low degree first) of the `m`-th cyclotomic polynomial.
pub fn cyclotomic_poly(m: u64) -> Vec<BigInt> {
    // Φ_m = ∏_{d|m} (x^d - 1)^{μ(m/d)}; multiply the numerators, divide the
    // denominators out exactly.
    let mut num: Vec<BigInt> = vec![BigInt::one()];
    let mut dens: Vec<u64> = Vec::new();
    for d in divisors(m) {
        match mobius(m / d) {
            1 => num = poly_mul_xd_minus_one(&num, d as usize),
            -1 => dens.push(d),
            _ => {}
        }
    }
    for d in dens {
        num = poly_div_xd_minus_one(&num, d as usize);
    }
    num
}

fn poly_mul_xd_minus_one(p: &[BigInt], d: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + d];
    for (i, c) in p.iter().enumerate() {
        out[i + d] += c;
        out[i] -= c;
    }
    out
}

fn poly_div_xd_minus_one(p: &[BigInt], d: usize) -> Vec<BigInt> {
    // exact division of p by x^d - 1: q_i = -(p_i - q_{i-d}) read from the
    // top: p = q (x^d - 1)  =>  q_{i} = p_{i+d} + q_{i+d}
    let n = p.len() - d;
    let mut q = vec![BigInt::zero(); n];
    for i in (0..n).rev() {
        let mut v = p[i + d].clone();
        if i + d < n {
            v += &q[i + d];
        }
        q[i] = v;
    }
    q
}

pub fn mobius(n: u64) -> i32 {
    let f = factor(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Value of the cyclotomic polynomial at 1: `p` if `m = p^k`, else 1 (and 0 for m = 1).
pub fn cyclotomic_at_one(m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let f = factor(m);
    if f.len() == 1 {
        f[0].0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials_small() {
        let to_i = |v: Vec<BigInt>| v.into_iter().map(|c| i64::try_from(c).unwrap()).collect::<Vec<_>>();
        assert_eq!(to_i(cyclotomic_poly(1)), vec![-1, 1]);
        assert_eq!(to_i(cyclotomic_poly(3)), vec![1, 1, 1]);
        assert_eq!(to_i(cyclotomic_poly(4)), vec![1, 0, 1]);
        assert_eq!(to_i(cyclotomic_poly(6)), vec![1, -1, 1]);
        assert_eq!(to_i(cyclotomic_poly(12)), vec![1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2
        let c105 = to_i(cyclotomic_poly(105));
        assert_eq!(c105.len() as u64, totient(105) + 1);
        assert!(c105.contains(&-2));
    }

    #[test]
    fn cyclotomic_value_at_one_matches_sum() {
        for m in 2..=60u64 {
            let s: BigInt = cyclotomic_poly(m).iter().sum();
            assert_eq!(s, BigInt::from(cyclotomic_at_one(m)), "m = {m}");
        }
    }

    #[test]
    fn orders_and_roots() {
        assert_eq!(mult_order(2, 11), Some(10));
        assert_eq!(mult_order(3, 8), Some(2));
        assert_eq!(mult_order(2, 8), None);
        assert_eq!(primitive_root_prime_power(5, 1), 2);
        assert_eq!(primitive_root_prime_power(7, 2), 3);
        assert_eq!(carmichael(24), 2);
        assert_eq!(totient(60), 16);
        assert_eq!(crt(&[(2, 3), (3, 5)]), (8, 15));
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }
}
