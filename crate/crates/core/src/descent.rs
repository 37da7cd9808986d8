//! Bertini twists, blowing a fixed line down to degree 2 and back up, and the point-count
//! arithmetic that decides when a degree-2 surface has a rational point off its bad locus.

use crate::lattice::{self, BasisKind, PicClass};
use crate::matrix::IntMatrix;
use crate::orbits::{self, PatternCount};
use crate::primes;
use crate::tables;
use crate::weyl::{self, central_involution, element_order, Catalog, LatticeAut, WeylError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DescentError {
    #[error("expected a degree-1 automorphism, got degree {0}")]
    NotDegreeOne(u32),
    #[error("expected a degree-2 automorphism, got degree {0}")]
    NotDegreeTwo(u32),
    #[error("catalog has {0} of 112 classes")]
    IncompleteCatalog(usize),
    #[error("the class is not fixed by the automorphism")]
    NotFixed,
    #[error("the class is not exceptional")]
    NotExceptional,
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

/// Frobenius data of a degree-2 surface.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Deg2Signature {
    pub trace: i64,
    pub orbit_patterns: Vec<PatternCount>,
    pub order: u64,
}

/// `B ∘ a` with `B(x) = 2(x·K)K − x`.
pub fn bertini(a: &LatticeAut) -> Result<LatticeAut, DescentError> {
    if a.ctx.degree != 1 {
        return Err(DescentError::NotDegreeOne(a.ctx.degree));
    }
    Ok(central_involution(&a.ctx).compose(a))
}

/// For each catalog entry, the entry holding its Bertini twist.
pub fn twist_pairs(catalog: &Catalog) -> Result<Vec<(usize, usize)>, DescentError> {
    if !catalog.is_complete() {
        return Err(DescentError::IncompleteCatalog(catalog.entries.len()));
    }
    (0..catalog.entries.len())
        .map(|id| {
            let t = bertini(&catalog.representative(id))?;
            let partner = catalog.find(&weyl::signature(&t)).expect("complete catalog contains every class");
            Ok((id, partner))
        })
        .collect()
}

/// Blows down the fixed line `e` of `a`, returning the induced degree-2 automorphism.
pub fn contract(a: &LatticeAut, e: &PicClass) -> Result<(Deg2Signature, LatticeAut), DescentError> {
    if a.ctx.degree != 1 {
        return Err(DescentError::NotDegreeOne(a.ctx.degree));
    }
    if e.0.len() != a.ctx.rank {
        return Err(DescentError::NotExceptional);
    }
    let e = a.ctx.to_standard(e);
    let a = a.in_basis(BasisKind::Standard);
    let lines = a.ctx.line_table();
    let Some(pos) = lines.position(&e) else {
        return Err(DescentError::NotExceptional);
    };
    if a.apply(&e) != e {
        return Err(DescentError::NotFixed);
    }
    // Move e to E8; the conjugate then preserves span(H, E1..E7) = E8⊥.
    let w = &to_last_line()[pos];
    let moved = w.compose(&a).compose(&w.inverse());
    let b = moved.mat.principal_minor(&(0..8).collect::<Vec<_>>());
    let b = weyl::validate_aut(&lattice::standard(2), b)?;
    Ok((deg2_signature(&b)?, b))
}

/// For every line `L` (by position in the standard table), a Weyl element `w` with `w(L) = E8`.
fn to_last_line() -> &'static Vec<LatticeAut> {
    static W: OnceLock<Vec<LatticeAut>> = OnceLock::new();
    W.get_or_init(|| {
        let ctx = lattice::standard(1);
        let table = ctx.line_table();
        let mut simple: Vec<PicClass> = (1..8)
            .map(|i| {
                let mut v = vec![0; 9];
                v[i] = 1;
                v[i + 1] = -1;
                PicClass(v)
            })
            .collect();
        simple.push(PicClass(vec![1, -1, -1, -1, 0, 0, 0, 0, 0]));
        let gens: Vec<LatticeAut> = simple.iter().map(|r| weyl::reflection(&ctx, r).expect("root")).collect();
        let mut out: Vec<Option<LatticeAut>> = vec![None; table.len()];
        let start = table.position(&ctx.basis(8)).expect("E8 is a line");
        out[start] = Some(LatticeAut::identity(&ctx));
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let w = out[i].clone().expect("visited");
            for s in &gens {
                let j = table.position(&s.apply(&table.classes[i])).expect("line");
                if out[j].is_none() {
                    out[j] = Some(w.compose(s));
                    queue.push_back(j);
                }
            }
        }
        out.into_iter().map(|w| w.expect("W(E8) is transitive on lines")).collect()
    })
}

/// Extends a degree-2 automorphism to the blow-up in a rational point, fixing the new line `E8`.
pub fn extend_blowup(b: &LatticeAut) -> Result<LatticeAut, DescentError> {
    if b.ctx.degree != 2 {
        return Err(DescentError::NotDegreeTwo(b.ctx.degree));
    }
    let mut m = IntMatrix::identity(9);
    for i in 0..8 {
        for j in 0..8 {
            m.set(i, j, b.mat.get(i, j));
        }
    }
    Ok(weyl::validate_aut(&lattice::standard(1), m)?)
}

/// The line created by [`extend_blowup`].
pub fn new_line() -> PicClass {
    lattice::standard(1).basis(8)
}

pub fn deg2_signature(b: &LatticeAut) -> Result<Deg2Signature, DescentError> {
    if b.ctx.degree != 2 {
        return Err(DescentError::NotDegreeTwo(b.ctx.degree));
    }
    Ok(Deg2Signature {
        trace: b.mat.trace(),
        orbit_patterns: orbits::pattern_multiset(&orbits::line_orbits(b)),
        order: element_order(b)?,
    })
}

/// `a q + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearBound {
    pub q: i64,
    pub constant: i64,
}

impl LinearBound {
    pub fn eval(&self, q: u64) -> i64 {
        self.q * q as i64 + self.constant
    }
}

impl fmt::Display for LinearBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&tables::linear(self.q, self.constant))
    }
}

/// Upper bound on the rational points lying on lines. A rational line carries `q + 1` points;
/// a point on a line of a larger orbit lies on all its conjugates, so on at most
/// `min a_i` of them pairwise.
pub fn line_point_bound(sig: &Deg2Signature) -> LinearBound {
    let mut bound = LinearBound { q: 0, constant: 0 };
    for pc in &sig.orbit_patterns {
        let n = pc.count as i64;
        if pc.pattern.size == 1 {
            bound.q += n;
            bound.constant += n;
        } else {
            bound.constant += n * pc.pattern.intersections.iter().copied().min().unwrap_or(0);
        }
    }
    bound
}

/// Upper bound on rational points of the ramification curve: `⌊q + 1 + 6√q⌋` for odd `q` and
/// `2(q + 1)` for even `q`.
pub fn ramification_bound(q: u64) -> u64 {
    if q % 2 == 0 {
        2 * (q + 1)
    } else {
        // ⌊6√q⌋ = ⌊√(36q)⌋
        q + 1 + (36 * q).isqrt()
    }
}

/// `#Y(F_q) − L_t(q) − F(q) − 1`; a rational point off the bad locus exists when this is ≥ 0.
pub fn existence_margin(sig: &Deg2Signature, q: u64) -> i64 {
    let qi = q as i64;
    let points = qi * qi + sig.trace * qi + 1;
    points - line_point_bound(sig).eval(q) - ramification_bound(q) as i64 - 1
}

/// Prime powers satisfying the inequality, split at the last failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanResult {
    /// Least `q₀` such that every scanned prime power `q ≥ q₀` satisfies the inequality.
    pub threshold: u64,
    /// Prime powers below the threshold that satisfy it anyway.
    pub sporadic: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExistenceResult {
    pub threshold: u64,
    pub sporadic: Vec<u64>,
    /// The same scan over odd prime powers only.
    pub odd: ScanResult,
    /// Powers of 2 that satisfy the inequality.
    pub even_passing: Vec<u64>,
    /// Largest prime power scanned.
    pub cap: u64,
}

impl ScanResult {
    pub fn holds(&self, q: u64) -> bool {
        q >= self.threshold || self.sporadic.contains(&q)
    }
}

impl ExistenceResult {
    pub fn holds(&self, q: u64) -> bool {
        q >= self.threshold || self.sporadic.contains(&q)
    }
}

/// Prime powers `q` up to which the scan runs.
///
/// With `M = max(0, A − a + 8)` and `c = max(0, B + 3)` for `L = Aq + B` and trace `a`, and using
/// `F(q) ≤ 2q + 2 + 6q`, the margin is at least `q² − Mq − (B + 2)`, which is positive once
/// `q ≥ M + c + 1`. The cap also covers `10·(max coefficient)²`.
pub fn scan_cap(sig: &Deg2Signature) -> u64 {
    let l = line_point_bound(sig);
    let m = (l.q - sig.trace + 8).max(0) as u64;
    let c = (l.constant + 3).max(0) as u64;
    let coeff = l.q.abs().max(l.constant.abs()).max(sig.trace.abs()).max(1) as u64;
    (m + c + 1).max(10 * coeff * coeff)
}

pub fn existence_threshold(sig: &Deg2Signature) -> ExistenceResult {
    let cap = scan_cap(sig);
    let holds: Vec<(u64, bool)> =
        primes::prime_powers_between(2, cap).into_iter().map(|q| (q, existence_margin(sig, q) >= 0)).collect();
    let all = scan(&holds);
    let odd_only: Vec<(u64, bool)> = holds.iter().copied().filter(|&(q, _)| q % 2 == 1).collect();
    let even_passing = holds.iter().filter(|&&(q, ok)| ok && q % 2 == 0).map(|&(q, _)| q).collect();
    ExistenceResult { threshold: all.threshold, sporadic: all.sporadic, odd: scan(&odd_only), even_passing, cap }
}

fn scan(holds: &[(u64, bool)]) -> ScanResult {
    let last_fail = holds.iter().rposition(|&(_, ok)| !ok);
    let threshold = match last_fail {
        None => holds.first().map_or(2, |&(q, _)| q),
        Some(i) => holds.get(i + 1).map_or(u64::MAX, |&(q, _)| q),
    };
    let sporadic = holds.iter().filter(|&&(q, ok)| ok && q < threshold).map(|&(q, _)| q).collect();
    ScanResult { threshold, sporadic }
}

/// A conjugacy class of degree-2 Frobenius elements, found by contracting catalog entries.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Deg2Class {
    pub signature: Deg2Signature,
    pub representative: IntMatrix,
    /// Catalog entry of the blow-up in a rational point.
    pub blowup: usize,
}

/// Every degree-2 class reachable by contracting a fixed line of a catalog entry, sorted by
/// signature.
pub fn degree_two_classes(catalog: &Catalog) -> Vec<Deg2Class> {
    let mut found: BTreeMap<Deg2Signature, Deg2Class> = BTreeMap::new();
    let mut blowups: HashMap<Deg2Signature, usize> = HashMap::new();
    for id in 0..catalog.entries.len() {
        let a = catalog.representative(id);
        let perm = orbits::line_permutation(&a);
        let lines = &a.ctx.line_table().classes;
        for (i, &j) in perm.iter().enumerate() {
            if i != j {
                continue;
            }
            let (sig, b) = contract(&a, &lines[i]).expect("fixed line");
            let blowup = *blowups.entry(sig.clone()).or_insert_with(|| {
                let up = extend_blowup(&b).expect("degree 2");
                catalog.find(&weyl::signature(&up)).expect("catalog entry")
            });
            found.entry(sig.clone()).or_insert(Deg2Class { signature: sig, representative: b.mat, blowup });
        }
    }
    found.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic_bundle::ConicType;

    #[test]
    fn bertini_basics() {
        let ctx = lattice::standard(1);
        let b = bertini(&LatticeAut::identity(&ctx)).unwrap();
        assert_eq!(b.mat.trace(), -7);
        assert!(bertini(&b).unwrap().is_identity());
        let two = LatticeAut::identity(&lattice::standard(2));
        assert_eq!(bertini(&two), Err(DescentError::NotDegreeOne(2)));
    }

    #[test]
    fn contract_identity() {
        let ctx = lattice::standard(1);
        let id = LatticeAut::identity(&ctx);
        let (sig, b) = contract(&id, &new_line()).unwrap();
        assert_eq!(sig.trace, 8);
        assert!(b.is_identity());
        assert_eq!(line_point_bound(&sig), LinearBound { q: 56, constant: 56 });
        let up = extend_blowup(&b).unwrap();
        assert_eq!(up.mat.trace(), 9);
    }

    #[test]
    fn contract_errors() {
        let ctx = lattice::standard(1);
        let id = LatticeAut::identity(&ctx);
        assert_eq!(contract(&id, &ctx.basis(0)).unwrap_err(), DescentError::NotExceptional);
        let s = weyl::reflection(&ctx, &PicClass(vec![0, 0, 0, 0, 0, 0, 0, 1, -1])).unwrap();
        assert_eq!(contract(&s, &new_line()).unwrap_err(), DescentError::NotFixed);
    }

    #[test]
    fn contract_moves_arbitrary_lines() {
        let ctx = lattice::standard(1);
        let b = central_involution(&ctx);
        let s = weyl::reflection(&ctx, &PicClass(vec![0, 1, -1, 0, 0, 0, 0, 0, 0])).unwrap();
        // s fixes every line orthogonal to E1 - E2, e.g. H - E3 - E4.
        let e = PicClass(vec![1, 0, 0, -1, -1, 0, 0, 0, 0]);
        let (sig, _) = contract(&s, &e).unwrap();
        assert_eq!(sig.trace, 6);
        assert!(contract(&b, &e).is_err());
    }

    #[test]
    fn type_97_contracts_to_trace_4() {
        // Bertini twist of the type-1 conic bundle fixes a unique line.
        let a = bertini(&ConicType::new(1).representative().lift()).unwrap().in_basis(BasisKind::Standard);
        let perm = orbits::line_permutation(&a);
        let fixed: Vec<usize> = (0..240).filter(|&i| perm[i] == i).collect();
        assert!(!fixed.is_empty());
        let (sig, _) = contract(&a, &a.ctx.line_table().classes[fixed[0]]).unwrap();
        assert_eq!(sig.trace, 4);
        assert_eq!(line_point_bound(&sig), LinearBound { q: 12, constant: 14 });
    }

    #[test]
    fn ramification_values() {
        assert_eq!(ramification_bound(9), 28);
        assert_eq!(ramification_bound(8), 18);
        assert_eq!(ramification_bound(7), 23);
        // Oracle with floating point away from perfect squares.
        for q in primes::prime_powers_between(3, 2000).into_iter().filter(|q| q % 2 == 1) {
            let f = (q as f64 + 1.0 + 6.0 * (q as f64).sqrt()).floor() as u64;
            assert_eq!(ramification_bound(q), f, "q = {q}");
        }
    }

    #[test]
    fn identity_existence_scan() {
        let id = LatticeAut::identity(&lattice::standard(2));
        let r = existence_threshold(&deg2_signature(&id).unwrap());
        assert_eq!(r.odd, ScanResult { threshold: 53, sporadic: vec![] });
        let row = tables::existence_row(91).unwrap();
        for q in primes::prime_powers_between(2, r.cap).into_iter().filter(|q| q % 2 == 1) {
            assert_eq!(r.odd.holds(q), row.exists(q), "q = {q}");
        }
        assert_eq!(r.threshold, 53);
        assert_eq!(r.even_passing.first(), Some(&64));
        assert!(r.holds(64) && !r.holds(49) && !r.holds(32));
    }

    #[test]
    fn scan_helper() {
        assert_eq!(scan(&[(2, false), (3, true), (4, false), (5, true)]), ScanResult {
            threshold: 5,
            sporadic: vec![3]
        });
        assert_eq!(scan(&[(2, true), (3, true)]), ScanResult { threshold: 2, sporadic: vec![] });
    }
}
