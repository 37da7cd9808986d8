//! Arithmetic in finite fields `F_{p^n}`.
//!
//! An element is the integer whose base-`p` digits are its coefficients in the polynomial basis
//! `1, x, .., x^{n-1}`, so the prime field occupies `0..p`.

use crate::primes;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fields up to this size get logarithm tables.
const TABLE_LIMIT: u64 = 1 << 20;
/// Fields of odd characteristic up to this size get an addition table.
const ADD_TABLE_LIMIT: u64 = 1 << 11;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("{p}^{n} exceeds the supported field size")]
    TooLarge { p: u64, n: u32 },
}

/// Characteristic, degree and the defining polynomial (ascending coefficients, monic).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDesc {
    pub p: u64,
    pub n: u32,
    pub modulus: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct Field {
    pub desc: FieldDesc,
    pub size: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Vec<u32>,
}

pub fn make_field(p: u64, n: u32) -> Result<Field, FieldError> {
    if !primes::is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if n == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let size = p.checked_pow(n).filter(|&s| s < 1 << 62).ok_or(FieldError::TooLarge { p, n })?;
    let modulus = least_irreducible(p, n as usize);
    let mut f = Field { desc: FieldDesc { p, n, modulus }, size, exp: Vec::new(), log: Vec::new(), add: Vec::new() };
    if size <= TABLE_LIMIT {
        f.build_tables();
    }
    Ok(f)
}

impl Field {
    pub fn p(&self) -> u64 {
        self.desc.p
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        1
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, k: i64) -> u64 {
        k.rem_euclid(self.desc.p as i64) as u64
    }

    pub fn digits(&self, a: u64) -> Vec<u64> {
        let p = self.desc.p;
        let mut a = a;
        (0..self.desc.n)
            .map(|_| {
                let d = a % p;
                a /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &x| acc * self.desc.p + x % self.desc.p)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let p = self.desc.p;
        if p == 2 {
            return a ^ b;
        }
        if self.desc.n == 1 {
            return (a + b) % p;
        }
        if !self.add.is_empty() {
            return self.add[(a * self.size + b) as usize] as u64;
        }
        self.add_digits(a, b)
    }

    fn add_digits(&self, mut a: u64, mut b: u64) -> u64 {
        let p = self.desc.p;
        let (mut out, mut place) = (0, 1);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        let p = self.desc.p;
        if p == 2 {
            return a;
        }
        let d: Vec<u64> = self.digits(a).iter().map(|&x| (p - x) % p).collect();
        self.from_digits(&d)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.desc.n == 1 {
            return ((a as u128 * b as u128) % self.desc.p as u128) as u64;
        }
        if !self.log.is_empty() {
            let e = self.log[a as usize] as u64 + self.log[b as usize] as u64;
            return self.exp[(e % (self.size - 1)) as usize] as u64;
        }
        self.mul_poly(a, b)
    }

    fn mul_poly(&self, a: u64, b: u64) -> u64 {
        let p = self.desc.p;
        let r = poly_mod(&poly_mul(&self.digits(a), &self.digits(b), p), &self.desc.modulus, p);
        self.from_digits(&r)
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        if a == 0 {
            return u64::from(e == 0);
        }
        if !self.log.is_empty() {
            let l = (self.log[a as usize] as u128 * e as u128) % (self.size - 1) as u128;
            return self.exp[l as usize] as u64;
        }
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        if !self.log.is_empty() {
            let l = self.log[a as usize] as u64;
            return self.exp[((self.size - 1 - l) % (self.size - 1)) as usize] as u64;
        }
        self.pow(a, self.size - 2)
    }

    pub fn div(&self, a: u64, b: u64) -> u64 {
        self.mul(a, self.inv(b))
    }

    /// `x ↦ x^p`.
    pub fn frobenius(&self, a: u64) -> u64 {
        self.pow(a, self.desc.p)
    }

    /// A generator of the multiplicative group.
    pub fn generator(&self) -> u64 {
        if !self.exp.is_empty() {
            return self.exp[1 % self.exp.len()] as u64;
        }
        find_generator(self)
    }

    /// Elements of the subfield with `m` elements, `m` a power of `p` dividing the size properly.
    pub fn subfield(&self, m: u64) -> Vec<u64> {
        assert!((self.size - 1) % (m - 1) == 0, "F_{m} is not a subfield");
        let g = self.pow(self.generator(), (self.size - 1) / (m - 1));
        let mut out = vec![0];
        let mut x = 1;
        for _ in 0..m - 1 {
            out.push(x);
            x = self.mul(x, g);
        }
        out.sort_unstable();
        out
    }

    fn build_tables(&mut self) {
        let g = find_generator(self);
        let n = self.size as usize;
        let mut exp = vec![0u32; n - 1];
        let mut log = vec![0u32; n];
        let mut x = 1u64;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x as u32;
            log[x as usize] = i as u32;
            x = self.mul(x, g);
        }
        self.exp = exp;
        self.log = log;
        if self.desc.p != 2 && self.desc.n > 1 && self.size <= ADD_TABLE_LIMIT {
            let s = self.size;
            self.add = (0..s * s).map(|k| self.add_digits(k / s, k % s) as u32).collect();
        }
    }
}

fn find_generator(f: &Field) -> u64 {
    let order = f.size - 1;
    let factors: Vec<u64> = primes::factorize(order).into_iter().map(|(r, _)| r).collect();
    (1..f.size)
        .find(|&g| factors.iter().all(|&r| pow_slow(f, g, order / r) != 1))
        .expect("the multiplicative group is cyclic")
}

fn pow_slow(f: &Field, a: u64, mut e: u64) -> u64 {
    let (mut base, mut acc) = (a, 1);
    while e > 0 {
        if e & 1 == 1 {
            acc = f.mul_any(acc, base);
        }
        base = f.mul_any(base, base);
        e >>= 1;
    }
    acc
}

impl Field {
    fn mul_any(&self, a: u64, b: u64) -> u64 {
        if self.desc.n == 1 {
            ((a as u128 * b as u128) % self.desc.p as u128) as u64
        } else {
            self.mul_poly(a, b)
        }
    }
}

fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
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
    poly_trim(out)
}

fn poly_mod(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = poly_trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = r[r.len() - 1] * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (poly_trim(a.to_vec()), poly_trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_mod(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// `x^(p^k) mod f`.
fn frobenius_power(f: &[u64], p: u64, k: u32) -> Vec<u64> {
    let mut x = poly_mod(&[0, 1], f, p);
    for _ in 0..k {
        let mut base = x.clone();
        let mut acc = vec![1u64];
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mod(&poly_mul(&acc, &base, p), f, p);
            }
            base = poly_mod(&poly_mul(&base, &base, p), f, p);
            e >>= 1;
        }
        x = acc;
    }
    x
}

/// Rabin's irreducibility test for a monic `f` of degree `n`.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() as u32 - 1;
    if n == 1 {
        return true;
    }
    let sub = |a: &[u64]| {
        let mut v = a.to_vec();
        v.resize(v.len().max(2), 0);
        v[1] = (v[1] + p - 1) % p;
        poly_trim(v)
    };
    if !sub(&frobenius_power(f, p, n)).is_empty() {
        return false;
    }
    primes::factorize(n as u64).iter().all(|&(r, _)| {
        let g = poly_gcd(f, &sub(&frobenius_power(f, p, n / r as u32)), p);
        g.len() == 1
    })
}

/// Least monic irreducible of degree `n`, comparing coefficients from `x^{n-1}` down to `1`.
fn least_irreducible(p: u64, n: usize) -> Vec<u64> {
    let mut code = 0u64;
    loop {
        let mut f: Vec<u64> = Vec::with_capacity(n + 1);
        let mut c = code;
        for _ in 0..n {
            f.push(c % p);
            c /= p;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
        code += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_conventions() {
        let f = make_field(2, 1).unwrap();
        assert_eq!(f.desc.modulus, vec![0, 1]);
        assert_eq!(f.size, 2);
        assert_eq!(make_field(4, 1).unwrap_err(), FieldError::NotPrime(4));
    }

    #[test]
    fn frobenius_fixes_f9() {
        let f = make_field(3, 2).unwrap();
        for a in 0..9 {
            assert_eq!(f.pow(a, 9), a);
        }
        assert_eq!(f.desc.modulus, vec![1, 0, 1]);
    }

    #[test]
    fn f256_generator_order() {
        let f = make_field(2, 8).unwrap();
        let g = f.generator();
        assert_eq!(f.pow(g, 255), 1);
        assert!([3u64, 5, 17].iter().all(|&r| f.pow(g, 255 / r) != 1));
    }

    #[test]
    fn table_and_polynomial_products_agree() {
        for (p, n) in [(2u64, 6u32), (3, 4), (5, 2), (7, 3)] {
            let f = make_field(p, n).unwrap();
            for a in (0..f.size).step_by(7) {
                for b in (0..f.size).step_by(5) {
                    let expect = if a == 0 || b == 0 { 0 } else { f.mul_poly(a, b) };
                    assert_eq!(f.mul(a, b), expect);
                }
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                assert_eq!(f.add(a, f.neg(a)), 0);
            }
        }
    }

    #[test]
    fn large_field_without_tables() {
        let f = make_field(2, 30).unwrap();
        let a = 123_456_789;
        assert_eq!(f.mul(a, f.inv(a)), 1);
        assert_eq!(f.pow(a, f.size), a);
    }

    #[test]
    fn irreducibility_oracle() {
        // Over F_2 the irreducible quartics are exactly x^4+x+1, x^4+x^3+1 and x^4+x^3+x^2+x+1.
        let mut found = Vec::new();
        for code in 0..16u64 {
            let f: Vec<u64> = (0..4).map(|i| code >> i & 1).chain([1]).collect();
            if is_irreducible(&f, 2) {
                found.push(f);
            }
        }
        assert_eq!(found, vec![vec![1, 1, 0, 0, 1], vec![1, 0, 0, 1, 1], vec![1, 1, 1, 1, 1]]);
    }

    #[test]
    fn subfields() {
        let f = make_field(2, 6).unwrap();
        assert_eq!(f.subfield(4).len(), 4);
        assert_eq!(f.subfield(8).len(), 8);
        assert!(f.subfield(2) == vec![0, 1]);
    }
}
