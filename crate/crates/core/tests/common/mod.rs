#![allow(dead_code)]

use delpezzo::field::{self, Field};
use delpezzo::genpos::Witness;
use delpezzo::weyl::{self, Catalog};
use std::sync::OnceLock;
use std::time::Duration;

pub const SEED: u64 = 1;
pub const BUDGET: usize = 200_000;

pub fn catalog() -> &'static (Catalog, Duration) {
    static C: OnceLock<(Catalog, Duration)> = OnceLock::new();
    C.get_or_init(|| {
        let t = std::time::Instant::now();
        let c = weyl::discover_catalog(SEED, BUDGET).expect("budget suffices for seed 1");
        (c, t.elapsed())
    })
}

/// Determinant by expansion over subsets of columns, `O(2^n n)`.
pub fn det_oracle(f: &Field, m: &[Vec<u64>]) -> u64 {
    let n = m.len();
    let mut dp = vec![0u64; 1 << n];
    dp[0] = 1;
    for mask in 0usize..(1 << n) {
        if dp[mask] == 0 {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for col in 0..n {
            if mask & (1 << col) != 0 || m[row][col] == 0 {
                continue;
            }
            let inversions = (mask >> (col + 1)).count_ones();
            let mut term = f.mul(dp[mask], m[row][col]);
            if inversions % 2 == 1 {
                term = f.neg(term);
            }
            let next = mask | (1 << col);
            dp[next] = f.add(dp[next], term);
        }
    }
    dp[(1 << n) - 1]
}

fn monomials(deg: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=deg {
        for b in 0..=deg - a {
            out.push([a, b, deg - a - b]);
        }
    }
    out
}

fn eval(f: &Field, p: &[u64; 3], e: [u32; 3]) -> u64 {
    (0..3).map(|i| f.pow(p[i], e[i] as u64)).fold(1, |acc, x| f.mul(acc, x))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Re-checks a witness from its serialized form: field, orbit degrees, distinctness and all three
/// general-position conditions via determinants.
pub fn verify_witness(w: &Witness) -> Result<(), String> {
    let f = field::make_field(w.field.p, w.field.n).map_err(|e| e.to_string())?;
    if f.desc.modulus != w.field.modulus {
        return Err("modulus differs".into());
    }
    let mut degrees: Vec<usize> = Vec::new();
    let mut pts: Vec<[u64; 3]> = Vec::new();
    for c in &w.centers {
        let rep: Vec<u64> = c.coordinates.iter().map(|d| f.from_digits(d)).collect();
        let mut cur = [rep[0], rep[1], rep[2]];
        let start = normalized(&f, cur);
        let mut orbit = vec![start];
        loop {
            cur = cur.map(|x| f.pow(x, w.q));
            let n = normalized(&f, cur);
            if n == start {
                break;
            }
            orbit.push(n);
        }
        if orbit.len() != c.degree {
            return Err(format!("center has orbit of size {} but degree {}", orbit.len(), c.degree));
        }
        degrees.push(orbit.len());
        pts.extend(orbit);
    }
    degrees.sort_unstable();
    if degrees != w.profile {
        return Err("profile mismatch".into());
    }
    for i in 0..pts.len() {
        for j in 0..i {
            if pts[i] == pts[j] {
                return Err("repeated point".into());
            }
        }
    }
    for s in subsets(pts.len(), 3) {
        let m: Vec<Vec<u64>> = s.iter().map(|&i| pts[i].to_vec()).collect();
        if det_oracle(&f, &m) == 0 {
            return Err(format!("collinear {s:?}"));
        }
    }
    let conic = monomials(2);
    for s in subsets(pts.len(), 6) {
        let m: Vec<Vec<u64>> = s.iter().map(|&i| conic.iter().map(|&e| eval(&f, &pts[i], e)).collect()).collect();
        if det_oracle(&f, &m) == 0 {
            return Err(format!("on a conic {s:?}"));
        }
    }
    if pts.len() == 8 {
        let cubic = monomials(3);
        for s in 0..8 {
            let mut m: Vec<Vec<u64>> =
                pts.iter().map(|p| cubic.iter().map(|&e| eval(&f, p, e)).collect()).collect();
            let chart = pts[s].iter().position(|&x| x != 0).expect("nonzero");
            for var in (0..3).filter(|&v| v != chart) {
                m.push(
                    cubic
                        .iter()
                        .map(|&e| {
                            if e[var] == 0 {
                                return 0;
                            }
                            let mut d = e;
                            d[var] -= 1;
                            f.mul(f.from_int(e[var] as i64), eval(&f, &pts[s], d))
                        })
                        .collect(),
                );
            }
            if det_oracle(&f, &m) == 0 {
                return Err(format!("singular cubic at {s}"));
            }
        }
    }
    Ok(())
}

fn normalized(f: &Field, p: [u64; 3]) -> [u64; 3] {
    let lead = *p.iter().find(|&&x| x != 0).expect("nonzero point");
    let inv = f.inv(lead);
    p.map(|x| f.mul(x, inv))
}
