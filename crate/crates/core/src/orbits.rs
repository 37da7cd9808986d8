//! Orbits of an isometry on the exceptional classes, their intersection patterns, and the
//! invariants derived from them.

use crate::lattice::{LatticeContext, PicClass};
use crate::primes;
use crate::weyl::LatticeAut;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

/// Orbit size `m` and intersections `a_i = L·τ^i(L)` for `i = 1..m-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitPattern {
    pub size: usize,
    pub intersections: Vec<i64>,
}

impl OrbitPattern {
    pub fn is_palindromic(&self) -> bool {
        self.intersections.iter().eq(self.intersections.iter().rev())
    }

    /// All members pairwise skew.
    pub fn is_internally_skew(&self) -> bool {
        self.intersections.iter().all(|&a| a == 0)
    }

    /// `[2m | 0..0 1 0..0]`: the orbit of both components of `m` conjugate singular fibers.
    pub fn fiber_pattern(m: usize) -> OrbitPattern {
        let mut a = vec![0; 2 * m - 1];
        a[m - 1] = 1;
        OrbitPattern { size: 2 * m, intersections: a }
    }
}

impl fmt::Display for OrbitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.intersections.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}|{}]", self.size, a.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternCount {
    pub pattern: OrbitPattern,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct Orbit {
    /// Lexicographically least member.
    pub representative: PicClass,
    pub pattern: OrbitPattern,
    /// Line-table indices, starting at the representative and following τ.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct OrbitDecomposition {
    pub orbits: Vec<Orbit>,
}

impl OrbitDecomposition {
    pub fn count_of(&self, pattern: &OrbitPattern) -> usize {
        self.orbits.iter().filter(|o| &o.pattern == pattern).count()
    }
}

/// Permutation induced on the line table: `perm[i]` is the index of `τ(L_i)`.
pub fn line_permutation(a: &LatticeAut) -> Vec<usize> {
    let table = a.ctx.line_table();
    table
        .classes
        .iter()
        .map(|l| table.position(&a.apply(l)).expect("isometries fixing K permute the lines"))
        .collect()
}

pub fn line_orbits(a: &LatticeAut) -> OrbitDecomposition {
    let perm = line_permutation(a);
    let lines = &a.ctx.line_table().classes;
    let mut seen = vec![false; perm.len()];
    let mut orbits = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut members = vec![start];
        seen[start] = true;
        let mut j = perm[start];
        while j != start {
            seen[j] = true;
            members.push(j);
            j = perm[j];
        }
        let rep = &lines[start];
        let intersections = members[1..].iter().map(|&m| a.ctx.inner(rep, &lines[m])).collect();
        orbits.push(Orbit {
            representative: rep.clone(),
            pattern: OrbitPattern { size: members.len(), intersections },
            members,
        });
    }
    OrbitDecomposition { orbits }
}

/// Orbits of `a` on the roots, with patterns computed as for lines.
pub fn root_orbit_patterns(a: &LatticeAut) -> Vec<PatternCount> {
    let roots = a.ctx.roots();
    let index: std::collections::HashMap<&PicClass, usize> = roots.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut seen = vec![false; roots.len()];
    let mut patterns = Vec::new();
    for start in 0..roots.len() {
        if seen[start] {
            continue;
        }
        let mut inter = Vec::new();
        seen[start] = true;
        let mut cur = a.apply(&roots[start]);
        loop {
            let j = index[&cur];
            if j == start {
                break;
            }
            seen[j] = true;
            inter.push(a.ctx.inner(&roots[start], &cur));
            cur = a.apply(&cur);
        }
        patterns.push(OrbitPattern { size: inter.len() + 1, intersections: inter });
    }
    tally(patterns)
}

fn tally(mut patterns: Vec<OrbitPattern>) -> Vec<PatternCount> {
    patterns.sort();
    let mut out: Vec<PatternCount> = Vec::new();
    for p in patterns {
        match out.last_mut() {
            Some(last) if last.pattern == p => last.count += 1,
            _ => out.push(PatternCount { pattern: p, count: 1 }),
        }
    }
    out
}

pub fn pattern_multiset(d: &OrbitDecomposition) -> Vec<PatternCount> {
    tally(d.orbits.iter().map(|o| o.pattern.clone()).collect())
}

/// Trace and rank of the fixed sublattice.
pub fn invariants(a: &LatticeAut) -> (i64, usize) {
    let n = a.mat.size();
    let shifted = a.mat.sub(&crate::matrix::IntMatrix::identity(n));
    (a.mat.trace(), n - shifted.rank())
}

/// Largest number of lines in a union of whole orbits that are pairwise skew.
pub fn index(a: &LatticeAut) -> usize {
    index_of(&line_orbits(a), a)
}

/// Index computed from an already known orbit decomposition of `a`.
pub fn index_of(d: &OrbitDecomposition, a: &LatticeAut) -> usize {
    let table = intersections(&a.ctx);
    let mut nodes: Vec<&Orbit> = d.orbits.iter().filter(|o| o.pattern.is_internally_skew()).collect();
    nodes.sort_by(|x, y| y.members.len().cmp(&x.members.len()));
    let n = nodes.len();
    let words = n.div_ceil(64).max(1);
    let mut adj = vec![vec![0u64; words]; n];
    for i in 0..n {
        for j in i + 1..n {
            let skew = nodes[i]
                .members
                .iter()
                .all(|&x| nodes[j].members.iter().all(|&y| table[x][y] == 0));
            if skew {
                adj[i][j / 64] |= 1 << (j % 64);
                adj[j][i / 64] |= 1 << (i % 64);
            }
        }
    }
    let weights: Vec<usize> = nodes.iter().map(|o| o.members.len()).collect();
    // Pairwise skew lines span a negative definite sublattice, and the form has signature
    // (1, rank − 1).
    let cap = a.ctx.rank - 1;
    let mut search = CliqueSearch { adj: &adj, weights: &weights, best: 0, cap };
    let mut all = vec![0u64; words];
    for i in 0..n {
        all[i / 64] |= 1 << (i % 64);
    }
    search.expand(all, 0);
    search.best
}

struct CliqueSearch<'a> {
    adj: &'a [Vec<u64>],
    weights: &'a [usize],
    best: usize,
    cap: usize,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, mut cand: Vec<u64>, current: usize) {
        if current > self.best {
            self.best = current;
        }
        loop {
            if self.best >= self.cap {
                return;
            }
            let bound: usize = bits(&cand).map(|v| self.weights[v]).sum();
            if current + bound <= self.best {
                return;
            }
            let Some(v) = bits(&cand).next() else { return };
            cand[v / 64] &= !(1 << (v % 64));
            let next: Vec<u64> = cand.iter().zip(&self.adj[v]).map(|(a, b)| a & b).collect();
            self.expand(next, current + self.weights[v]);
        }
    }
}

fn bits(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &word)| {
        let mut x = word;
        std::iter::from_fn(move || {
            if x == 0 {
                return None;
            }
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(w * 64 + b)
        })
    })
}

/// Intersection numbers between lines, shared across bases of the same degree.
fn intersections(ctx: &LatticeContext) -> &'static Vec<Vec<i8>> {
    static TABLES: [OnceLock<Vec<Vec<i8>>>; 7] = [const { OnceLock::new() }; 7];
    TABLES[ctx.degree as usize - 1].get_or_init(|| {
        let lines = ctx.exceptional_classes();
        lines.iter().map(|x| lines.iter().map(|y| ctx.inner(x, y) as i8).collect()).collect()
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{0} is not a prime power")]
pub struct NotPrimePower(pub u64);

/// `q² + a q + 1`, the number of rational points for Frobenius trace `a`.
pub fn point_count(trace: i64, q: u64) -> Result<i64, NotPrimePower> {
    if !primes::is_prime_power(q) {
        return Err(NotPrimePower(q));
    }
    let q = q as i64;
    Ok(q * q + trace * q + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice;
    use crate::matrix::IntMatrix;
    use crate::weyl::{central_involution, reflection};

    #[test]
    fn identity_orbits() {
        let ctx = lattice::standard(1);
        let id = LatticeAut::identity(&ctx);
        let d = line_orbits(&id);
        assert_eq!(d.orbits.len(), 240);
        assert!(d.orbits.iter().all(|o| o.pattern.size == 1 && o.pattern.intersections.is_empty()));
        assert_eq!(invariants(&id), (9, 9));
        assert_eq!(index(&id), 8);
    }

    #[test]
    fn reflection_index() {
        // s_{E1-E2} swaps two skew lines; E1..E8 remain a stable skew set.
        let ctx = lattice::standard(1);
        let r = PicClass(vec![0, 1, -1, 0, 0, 0, 0, 0, 0]);
        let s = reflection(&ctx, &r).unwrap();
        assert_eq!(index(&s), 8);
        assert_eq!(invariants(&s), (7, 8));
    }

    #[test]
    fn central_involution_orbits() {
        let ctx = lattice::standard(1);
        let d = line_orbits(&central_involution(&ctx));
        // L ↦ −2K − L pairs each line with the unique line meeting it three times.
        assert_eq!(pattern_multiset(&d), vec![PatternCount {
            pattern: OrbitPattern { size: 2, intersections: vec![3] },
            count: 120
        }]);
    }

    #[test]
    fn point_counts() {
        assert_eq!(point_count(9, 2), Ok(23));
        assert_eq!(point_count(-2, 3), Ok(4));
        assert_eq!(point_count(8, 5), Ok(25 + 40 + 1));
        assert_eq!(point_count(1, 6), Err(NotPrimePower(6)));
    }

    #[test]
    fn degree_two_permutation() {
        let ctx = lattice::standard(2);
        let mut m = IntMatrix::identity(8);
        // swap E1, E2
        m.set(1, 1, 0);
        m.set(2, 2, 0);
        m.set(1, 2, 1);
        m.set(2, 1, 1);
        let a = crate::weyl::validate_aut(&ctx, m).unwrap();
        let d = line_orbits(&a);
        assert_eq!(d.orbits.iter().map(|o| o.members.len()).sum::<usize>(), 56);
        assert_eq!(index(&a), 7);
    }
}
