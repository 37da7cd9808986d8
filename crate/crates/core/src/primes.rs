//! Small number theory: primality, prime powers, Möbius function.

/// Prime factorization by trial division, as (prime, exponent) pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
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

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// Returns `(p, k)` with `q = p^k` when `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    match factorize(q).as_slice() {
        [(p, k)] => Some((*p, *k)),
        _ => None,
    }
}

pub fn is_prime_power(q: u64) -> bool {
    prime_power(q).is_some()
}

/// Prime powers in `[lo, hi]`, increasing.
pub fn prime_powers_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&q| is_prime_power(q)).collect()
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Number of closed points of exact degree `d` on a variety with `count(q^e)` points over each
/// extension, via Möbius inversion.
pub fn closed_point_count(q: u64, d: u64, count: impl Fn(u128) -> u128) -> u128 {
    let mut total: i128 = 0;
    for e in divisors(d) {
        total += mobius(d / e) as i128 * count((q as u128).pow(e as u32)) as i128;
    }
    (total / d as i128) as u128
}

/// Closed points of degree `d` on the projective line over `F_q`.
pub fn p1_closed_points(q: u64, d: u64) -> u128 {
    closed_point_count(q, d, |m| m + 1)
}

/// Closed points of degree `d` on the projective plane over `F_q`.
pub fn p2_closed_points(q: u64, d: u64) -> u128 {
    closed_point_count(q, d, |m| m * m + m + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_powers_between(1, 20), vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19]);
        assert_eq!(prime_power(64), Some((2, 6)));
        assert_eq!(prime_power(12), None);
        assert!(!is_prime_power(1));
    }

    #[test]
    fn mobius_values() {
        let got: Vec<i64> = (1..=10).map(mobius).collect();
        assert_eq!(got, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }

    #[test]
    fn closed_point_counts() {
        assert_eq!(p1_closed_points(2, 2), 1);
        assert_eq!(p1_closed_points(3, 1), 4);
        assert_eq!(p2_closed_points(2, 1), 7);
        // Degree 2 and 3 monic polynomials over F_p are irreducible iff rootless.
        for p in [2u64, 3, 5, 7] {
            for d in [2u32, 3] {
                let mut rootless = 0u128;
                for code in 0..p.pow(d) {
                    let coeffs: Vec<u64> = (0..d).map(|i| code / p.pow(i) % p).collect();
                    let has_root = (0..p).any(|x| {
                        let mut v = 1u64;
                        for c in coeffs.iter().rev() {
                            v = (v * x + c) % p;
                        }
                        v == 0
                    });
                    if !has_root {
                        rootless += 1;
                    }
                }
                assert_eq!(p1_closed_points(p, d as u64), rootless);
            }
        }
    }
}
