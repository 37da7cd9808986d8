//! Square integer matrices and integer polynomials.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Mul;

/// Square integer matrix stored row-major. Acts on column vectors.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zero(n: usize) -> Self {
        IntMatrix { n, data: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        IntMatrix { n, data: rows.concat() }
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(cols: &[Vec<i64>]) -> Self {
        Self::from_rows(cols).transpose()
    }

    /// Row-major data; `None` if the length is not a perfect square.
    pub fn from_row_major(data: Vec<i64>) -> Option<Self> {
        let n = (data.len() as f64).sqrt().round() as usize;
        (n * n == data.len()).then_some(IntMatrix { n, data })
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let mut m = Self::zero(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = x;
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row_major(&self) -> &[i64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn trace(&self) -> i64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.n);
        self.data.chunks(self.n).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == (i == j) as i64))
    }

    pub fn scale(&self, k: i64) -> Self {
        IntMatrix { n: self.n, data: self.data.iter().map(|x| x * k).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        IntMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        IntMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Sub-matrix keeping the listed indices for both rows and columns.
    pub fn principal_minor(&self, keep: &[usize]) -> Self {
        let mut m = Self::zero(keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        rational_rank(&self.data.chunks(self.n).map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    /// Characteristic polynomial det(xI − M), coefficients in ascending degree order.
    pub fn charpoly(&self) -> Vec<i64> {
        // Faddeev–LeVerrier; all divisions are exact.
        let n = self.n;
        let a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut coeffs = vec![0i128; n + 1];
        coeffs[n] = 1;
        let mut m = vec![0i128; n * n];
        for k in 1..=n {
            // m <- A*m + c_{n-k+1} I
            let mut next = vec![0i128; n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0i128;
                    for l in 0..n {
                        s += a[i * n + l] * m[l * n + j];
                    }
                    next[i * n + j] = s;
                }
                next[i * n + i] += coeffs[n - k + 1];
            }
            m = next;
            let mut tr = 0i128;
            for i in 0..n {
                for l in 0..n {
                    tr += a[i * n + l] * m[l * n + i];
                }
            }
            coeffs[n - k] = -tr / k as i128;
        }
        coeffs.into_iter().map(|c| c as i64).collect()
    }

    /// Inverse of a matrix with determinant ±1, computed over the rationals.
    pub fn unimodular_inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut aug: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..2 * n)
                    .map(|j| {
                        if j < n {
                            Rational::from(self.get(i, j) as i128)
                        } else {
                            Rational::from((j - n == i) as i128)
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !aug[r][col].is_zero())?;
            aug.swap(col, piv);
            let inv = aug[col][col].recip();
            for x in aug[col].iter_mut() {
                *x = x.mul(inv);
            }
            for r in 0..n {
                if r != col && !aug[r][col].is_zero() {
                    let f = aug[r][col];
                    for j in 0..2 * n {
                        let v = aug[col][j].mul(f);
                        aug[r][j] = aug[r][j].sub(v);
                    }
                }
            }
        }
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let v = aug[i][n + j];
                if v.den != 1 {
                    return None;
                }
                out.set(i, j, v.num as i64);
            }
        }
        Some(out)
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = IntMatrix::zero(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.data[i * n + l];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[l * n + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for row in self.data.chunks(self.n) {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Rational {
    num: i128,
    den: i128,
}

impl From<i128> for Rational {
    fn from(v: i128) -> Self {
        Rational { num: v, den: 1 }
    }
}

impl Rational {
    fn new(num: i128, den: i128) -> Self {
        let g = gcd_i128(num.abs(), den.abs()).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Rational { num: s * num / g, den: s * den / g }
    }
    fn is_zero(self) -> bool {
        self.num == 0
    }
    fn recip(self) -> Self {
        Rational::new(self.den, self.num)
    }
    fn mul(self, o: Self) -> Self {
        Rational::new(self.num * o.num, self.den * o.den)
    }
    fn sub(self, o: Self) -> Self {
        Rational::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd_i128(b, a % b)
    }
}

/// Rank over the rationals of a (not necessarily square) integer matrix, by fraction-free
/// elimination.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, piv);
        for r in rank + 1..m.len() {
            if m[r][col] != 0 {
                let (a, b) = (m[rank][col], m[r][col]);
                for j in col..ncols {
                    m[r][j] = m[r][j] * a - m[rank][j] * b;
                }
                let g = m[r].iter().fold(0, |g, &x| gcd_i128(g, x.abs()));
                if g > 1 {
                    m[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Integer polynomials in ascending coefficient order.
pub mod poly {
    pub fn trim(mut p: Vec<i64>) -> Vec<i64> {
        while p.len() > 1 && *p.last().unwrap() == 0 {
            p.pop();
        }
        p
    }

    pub fn mul(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    /// Exact division by a monic divisor; `None` when the remainder is nonzero.
    pub fn div_exact(a: &[i64], b: &[i64]) -> Option<Vec<i64>> {
        let b = trim(b.to_vec());
        assert_eq!(*b.last().unwrap(), 1, "divisor must be monic");
        let mut rem = trim(a.to_vec());
        if rem.len() < b.len() {
            return (rem.iter().all(|&c| c == 0)).then(|| vec![0]);
        }
        let mut quot = vec![0; rem.len() - b.len() + 1];
        for k in (0..quot.len()).rev() {
            let c = rem[k + b.len() - 1];
            quot[k] = c;
            for (j, y) in b.iter().enumerate() {
                rem[k + j] -= c * y;
            }
        }
        rem.iter().all(|&c| c == 0).then(|| trim(quot))
    }

    /// The n-th cyclotomic polynomial.
    pub fn cyclotomic(n: u64) -> Vec<i64> {
        let mut p = vec![0i64; n as usize + 1];
        p[0] = -1;
        p[n as usize] = 1;
        for d in 1..n {
            if n % d == 0 {
                p = div_exact(&p, &cyclotomic(d)).expect("cyclotomic divides x^n - 1");
            }
        }
        p
    }

    /// Factors `p` into cyclotomic polynomials Φ_n with n ≤ `max_n`; returns the list of
    /// indices with multiplicity, or `None` if a non-cyclotomic factor remains.
    pub fn cyclotomic_factors(p: &[i64], max_n: u64) -> Option<Vec<u64>> {
        let mut rest = trim(p.to_vec());
        let mut found = Vec::new();
        for n in 1..=max_n {
            let phi = cyclotomic(n);
            while let Some(q) = div_exact(&rest, &phi) {
                if rest.len() == 1 {
                    break;
                }
                rest = q;
                found.push(n);
            }
        }
        (rest == vec![1]).then_some(found)
    }
}
