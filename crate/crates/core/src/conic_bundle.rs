//! Frobenius elements preserving a conic bundle on a degree-1 del Pezzo surface.
//!
//! Classes are written in the conic basis `C, F, E_1..E_7`, so coordinate 0 is `C`, coordinate 1
//! is `F` and coordinate `i + 1` is `E_i`.

use crate::lattice::{self, BasisKind, PicClass};
use crate::matrix::IntMatrix;
use crate::orbits::OrbitPattern;
use crate::primes;
use crate::weyl::{element_order, LatticeAut, WeylError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Number of singular fibers of a degree-1 conic bundle.
pub const FIBERS: usize = 7;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConicError {
    #[error("the automorphism does not fix the fiber class")]
    FiberNotFixed,
    #[error("the two components of singular fiber {0} lie in different orbits")]
    NotMinimal(usize),
    #[error("the automorphism is not in W(D7): {0}")]
    NotInD7(String),
    #[error("case {case} is incompatible with type {t}: {reason}")]
    IncompatibleCase { t: u8, case: CaseLabel, reason: &'static str },
    #[error("invalid singular-fiber configuration {0:?}")]
    InvalidPartition(Vec<usize>),
    #[error("no finite bound on the F coefficient; supply one")]
    UnboundedSearch,
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error("the automorphism must be written in the conic basis")]
    WrongBasis,
}

/// `ι_I σ`: first permute the singular fibers by `σ`, then swap the components of the fibers in `I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct D7Element {
    /// Fibers whose components are swapped, 1-based, sorted.
    pub flips: Vec<usize>,
    /// `perm[i - 1] = σ(i)`, 1-based.
    pub perm: Vec<usize>,
}

impl D7Element {
    pub fn new(flips: &[usize], perm: Vec<usize>) -> Self {
        let mut flips = flips.to_vec();
        flips.sort_unstable();
        D7Element { flips, perm }
    }

    /// Builds `σ` from cycles in 1-based notation.
    pub fn from_cycles(flips: &[usize], cycles: &[&[usize]]) -> Self {
        let mut perm: Vec<usize> = (1..=FIBERS).collect();
        for cycle in cycles {
            for (k, &i) in cycle.iter().enumerate() {
                perm[i - 1] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::new(flips, perm)
    }

    pub fn is_flipped(&self, i: usize) -> bool {
        self.flips.binary_search(&i).is_ok()
    }

    /// Matrix on conic coordinates.
    pub fn lift(&self) -> LatticeAut {
        let ctx = lattice::conic();
        let mut cols = vec![vec![0i64; 9]; 9];
        cols[0][0] = 1;
        cols[0][1] = self.flips.len() as i64 / 2;
        for &i in &self.flips {
            cols[0][i + 1] = -1;
        }
        cols[1][1] = 1;
        for j in 1..=FIBERS {
            let k = self.perm[j - 1];
            if self.is_flipped(k) {
                cols[j + 1][1] = 1;
                cols[j + 1][k + 1] = -1;
            } else {
                cols[j + 1][k + 1] = 1;
            }
        }
        LatticeAut { ctx, mat: IntMatrix::from_columns(&cols) }
    }
}

impl fmt::Display for D7Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flips: String = self.flips.iter().map(|i| i.to_string()).collect();
        write!(f, "ι_{{{flips}}}")?;
        let mut seen = [false; FIBERS + 1];
        let mut any = false;
        for start in 1..=FIBERS {
            if seen[start] || self.perm[start - 1] == start {
                continue;
            }
            any = true;
            let mut i = start;
            write!(f, "(")?;
            while !seen[i] {
                seen[i] = true;
                write!(f, "{i}")?;
                i = self.perm[i - 1];
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "id")?;
        }
        Ok(())
    }
}

fn conic_form(a: &LatticeAut) -> Result<LatticeAut, ConicError> {
    if a.ctx.degree != 1 {
        return Err(ConicError::WrongBasis);
    }
    Ok(a.in_basis(BasisKind::Conic))
}

fn fiber_class() -> PicClass {
    lattice::conic().basis(1)
}

fn component(i: usize) -> PicClass {
    lattice::conic().basis(i + 1)
}

fn complement(i: usize) -> PicClass {
    fiber_class().sub(&component(i))
}

/// Reads `(I, σ)` from an automorphism that fixes `F` and permutes the fiber components.
pub fn d7_normal_form(a: &LatticeAut) -> Result<D7Element, ConicError> {
    let a = conic_form(a)?;
    if a.apply(&fiber_class()) != fiber_class() {
        return Err(ConicError::NotInD7("F is moved".into()));
    }
    let mut perm = vec![0; FIBERS];
    let mut flips = Vec::new();
    for j in 1..=FIBERS {
        let img = a.apply(&component(j));
        let hit = (1..=FIBERS).find_map(|k| {
            if img == component(k) {
                Some((k, false))
            } else if img == complement(k) {
                Some((k, true))
            } else {
                None
            }
        });
        let Some((k, flipped)) = hit else {
            return Err(ConicError::NotInD7(format!("E_{j} is not sent to a fiber component")));
        };
        perm[j - 1] = k;
        if flipped {
            flips.push(k);
        }
    }
    let el = D7Element::new(&flips, perm);
    if el.lift().mat != a.mat {
        return Err(ConicError::NotInD7("action on C does not match".into()));
    }
    Ok(el)
}

/// Singular-fiber configurations, indexed by type.
pub const FIBER_DEGREES: [&[usize]; 7] = [
    &[1, 1, 1, 1, 1, 2],
    &[1, 1, 2, 3],
    &[1, 2, 2, 2],
    &[1, 1, 1, 4],
    &[1, 6],
    &[2, 5],
    &[3, 4],
];

/// Orders of the Frobenius action, indexed by type.
pub const PUBLISHED_ORDERS: [u64; 7] = [4, 12, 4, 8, 12, 20, 24];

/// Transition thresholds `k_t` as published, indexed by type.
pub const PUBLISHED_K: [u64; 7] = [23, 9, 4, 13, 4, 2, 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConicType {
    pub t: u8,
    /// Degrees of the closed points under the singular fibers, ascending.
    pub fiber_degrees: Vec<usize>,
}

impl ConicType {
    pub fn new(t: u8) -> Self {
        assert!((1..=7).contains(&t), "conic types are 1..=7");
        ConicType { t, fiber_degrees: FIBER_DEGREES[t as usize - 1].to_vec() }
    }

    pub fn from_degrees(degrees: &[usize]) -> Result<Self, ConicError> {
        let mut d = degrees.to_vec();
        d.sort_unstable();
        FIBER_DEGREES
            .iter()
            .position(|p| *p == d.as_slice())
            .map(|i| ConicType::new(i as u8 + 1))
            .ok_or(ConicError::InvalidPartition(d))
    }

    /// Number of singular fibers over rational points.
    pub fn rational_fibers(&self) -> usize {
        self.fiber_degrees.iter().filter(|&&d| d == 1).count()
    }

    /// One fiber cycle per closed point, on consecutive indices, each swapped at its first fiber.
    pub fn representative(&self) -> D7Element {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut next = 1;
        for &d in &self.fiber_degrees {
            cycles.push((next..next + d).collect());
            next += d;
        }
        let flips: Vec<usize> = cycles.iter().map(|c| c[0]).collect();
        let refs: Vec<&[usize]> = cycles.iter().map(|c| c.as_slice()).collect();
        D7Element::from_cycles(&flips, &refs)
    }

    /// Number of flips in `τ^{n/2}` predicted for this type.
    pub fn half_power_flips(&self) -> usize {
        match self.t {
            1 | 2 | 6 => 2,
            4 | 7 => 4,
            _ => 6,
        }
    }
}

pub fn conic_type(a: &LatticeAut) -> Result<ConicType, ConicError> {
    let a = conic_form(a)?;
    if a.apply(&fiber_class()) != fiber_class() {
        return Err(ConicError::FiberNotFixed);
    }
    let mut degrees = Vec::new();
    let mut done = [false; FIBERS + 1];
    for i in 1..=FIBERS {
        if done[i] {
            continue;
        }
        let start = component(i);
        let mut orbit = vec![start.clone()];
        let mut cur = a.apply(&start);
        while cur != start {
            orbit.push(cur.clone());
            cur = a.apply(&cur);
        }
        if !orbit.contains(&complement(i)) {
            return Err(ConicError::NotMinimal(i));
        }
        let m = orbit.len() / 2;
        let ctx = lattice::conic();
        let pattern = OrbitPattern {
            size: orbit.len(),
            intersections: orbit[1..].iter().map(|x| ctx.inner(&start, x)).collect(),
        };
        assert_eq!(pattern, OrbitPattern::fiber_pattern(m), "fiber orbit has unexpected pattern");
        for x in &orbit {
            if let Some(k) = (1..=FIBERS).find(|&k| *x == component(k)) {
                done[k] = true;
            }
        }
        degrees.push(m);
    }
    ConicType::from_degrees(&degrees)
}

/// Normal form of `τ^{n/2}`; asserts the shape predicted for the type of `a`.
pub fn half_power_form(a: &LatticeAut) -> Result<D7Element, ConicError> {
    let t = conic_type(a)?;
    let n = element_order(a)?;
    assert!(n % 2 == 0, "types 1..7 have even order");
    let h = d7_normal_form(&a.pow(n / 2))?;
    assert!(h.perm.iter().enumerate().all(|(i, &p)| p == i + 1), "τ^(n/2) permutes fibers");
    assert_eq!(h.flips.len(), t.half_power_flips(), "τ^(n/2) for type {}", t.t);
    Ok(h)
}

/// Conic-basis class `cC + fF − Σ b_i E_i` from the multiplicities `b`.
pub fn class(c: i64, f: i64, b: &[i64; FIBERS]) -> PicClass {
    let mut v = vec![c, f];
    v.extend(b.iter().map(|x| -x));
    PicClass(v)
}

/// `cC + fF` minus the listed components, each once.
pub fn class_minus(c: i64, f: i64, minus: &[usize]) -> PicClass {
    let mut b = [0; FIBERS];
    for &i in minus {
        b[i - 1] += 1;
    }
    class(c, f, &b)
}

/// All `D = cC + aF − Σ b_n E_n` with `a ≥ 0`, `0 ≤ b_n ≤ c`, `D² = s`, `D·K = k` and
/// `D·P ≥ min` for each constraint. Sorted, duplicate free.
///
/// `D² = 2ca − Σ b_n²` determines `a` once the `b_n` are chosen, so for `c ≥ 1` the search over
/// the box `0 ≤ b_n ≤ c` is exhaustive. For `c = 0` a bound on `a` must be supplied.
pub fn negative_class_solver(
    c: i64,
    s: i64,
    k: i64,
    constraints: &[(PicClass, i64)],
    a_bound: Option<i64>,
) -> Result<Vec<PicClass>, ConicError> {
    let ctx = lattice::conic();
    if c <= 0 && a_bound.is_none() {
        return Err(ConicError::UnboundedSearch);
    }
    let mut out = Vec::new();
    let side = (c + 1) as u64;
    for code in 0..side.pow(FIBERS as u32) {
        let mut b = [0i64; FIBERS];
        let mut x = code;
        for slot in b.iter_mut() {
            *slot = (x % side) as i64;
            x /= side;
        }
        let sumsq: i64 = b.iter().map(|v| v * v).sum();
        let candidates: Vec<i64> = if c > 0 {
            let num = s + sumsq;
            if num < 0 || num % (2 * c) != 0 {
                continue;
            }
            vec![num / (2 * c)]
        } else {
            (0..=a_bound.unwrap()).collect()
        };
        for a in candidates {
            let d = class(c, a, &b);
            if ctx.square(&d) == s
                && ctx.inner(&d, &ctx.canonical) == k
                && constraints.iter().all(|(p, min)| ctx.inner(&d, p) >= *min)
            {
                out.push(d);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    C1,
    C2a,
    C2b,
    C2c,
    C3,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 5] = [CaseLabel::C1, CaseLabel::C2a, CaseLabel::C2b, CaseLabel::C2c, CaseLabel::C3];
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::C1 => "(1)",
            CaseLabel::C2a => "(2a)",
            CaseLabel::C2b => "(2b)",
            CaseLabel::C2c => "(2c)",
            CaseLabel::C3 => "(3)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseInventory {
    pub case_label: CaseLabel,
    pub minus2_classes: Vec<PicClass>,
    pub minus1_section_classes: Vec<PicClass>,
    pub special_bisections: Vec<PicClass>,
}

pub fn case_2a_curves() -> Vec<PicClass> {
    vec![
        class_minus(1, 0, &[1, 2]),
        class_minus(1, 0, &[3, 4]),
        class_minus(1, 0, &[5, 6]),
        class_minus(1, 2, &[1, 2, 3, 4, 5, 6]),
        class_minus(1, 1, &[1, 3, 5, 7]),
        class_minus(1, 1, &[1, 4, 6, 7]),
        class_minus(1, 1, &[2, 3, 6, 7]),
        class_minus(1, 1, &[2, 4, 5, 7]),
    ]
}

pub fn case_2b_curves() -> Vec<PicClass> {
    vec![
        class_minus(1, 0, &[1, 2]),
        class_minus(1, 0, &[3, 4]),
        class_minus(1, 2, &[2, 3, 4, 5, 6, 7]),
        class_minus(1, 1, &[1, 5, 6, 7]),
    ]
}

pub fn case_2c_curves() -> Vec<PicClass> {
    vec![class(2, 1, &[1, 1, 1, 1, 1, 1, 0]), class(2, 2, &[1, 1, 1, 1, 1, 1, 2])]
}

/// Sections `D² = D·K = −1` meeting every listed curve non-negatively.
pub fn sections_against(curves: &[PicClass]) -> Vec<PicClass> {
    let constraints: Vec<(PicClass, i64)> = curves.iter().map(|c| (c.clone(), 0)).collect();
    negative_class_solver(1, -1, -1, &constraints, None).expect("c = 1 is bounded")
}

pub fn case_inventory(t: &ConicType, case_label: CaseLabel) -> Result<CaseInventory, ConicError> {
    let incompatible = |reason| Err(ConicError::IncompatibleCase { t: t.t, case: case_label, reason });
    let empty = CaseInventory {
        case_label,
        minus2_classes: vec![],
        minus1_section_classes: vec![],
        special_bisections: vec![],
    };
    match case_label {
        CaseLabel::C1 => {
            let ctx = lattice::conic();
            let a = ctx.canonical.neg().sub(&fiber_class());
            Ok(CaseInventory { special_bisections: vec![a], ..empty })
        }
        CaseLabel::C2a if ![4, 7].contains(&t.t) => incompatible("case (2a) forces type 4 or 7"),
        CaseLabel::C2b if ![3, 5].contains(&t.t) => incompatible("case (2b) forces type 3 or 5"),
        CaseLabel::C2c if [6, 7].contains(&t.t) => incompatible("case (2c) needs a rational singular fiber"),
        CaseLabel::C2a | CaseLabel::C2b | CaseLabel::C2c => {
            let curves = match case_label {
                CaseLabel::C2a => case_2a_curves(),
                CaseLabel::C2b => case_2b_curves(),
                _ => case_2c_curves(),
            };
            let sections = sections_against(&curves);
            Ok(CaseInventory { minus2_classes: curves, minus1_section_classes: sections, ..empty })
        }
        CaseLabel::C3 => Ok(empty),
    }
}

/// Range of `q` for which a case is settled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseBound {
    /// Every prime power except the listed ones.
    AllExcept(Vec<u64>),
    AtLeast(u64),
}

impl CaseBound {
    pub fn holds(&self, q: u64) -> bool {
        match self {
            CaseBound::AllExcept(e) => !e.contains(&q),
            CaseBound::AtLeast(b) => q >= *b,
        }
    }
}

impl fmt::Display for CaseBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseBound::AllExcept(e) if e.is_empty() => write!(f, "all q"),
            CaseBound::AllExcept(e) => {
                let e: Vec<String> = e.iter().map(|x| x.to_string()).collect();
                write!(f, "all q except q = {}", e.join(", "))
            }
            CaseBound::AtLeast(b) => write!(f, "q >= {b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub t: u8,
    pub rational_fibers: usize,
    pub per_case: BTreeMap<CaseLabel, CaseBound>,
    pub k: u64,
    pub published_k: u64,
    pub discrepancy: bool,
}

pub fn transition_threshold(t: &ConicType) -> ThresholdReport {
    let m = t.rational_fibers() as u64;
    let mut per_case = BTreeMap::new();
    let c1_exceptions = match t.t {
        1 => vec![4],
        4 => vec![2],
        _ => vec![],
    };
    per_case.insert(CaseLabel::C1, CaseBound::AllExcept(c1_exceptions));
    if [4, 7].contains(&t.t) {
        let e = if t.t == 4 { vec![2] } else { vec![] };
        per_case.insert(CaseLabel::C2a, CaseBound::AllExcept(e));
    }
    if [3, 5].contains(&t.t) {
        per_case.insert(CaseLabel::C2b, CaseBound::AtLeast(4));
    }
    if ![6, 7].contains(&t.t) {
        per_case.insert(CaseLabel::C2c, CaseBound::AtLeast(4 * m));
    }
    per_case.insert(CaseLabel::C3, CaseBound::AllExcept(vec![]));

    let mut lower = 2;
    for b in per_case.values() {
        if let CaseBound::AtLeast(x) = b {
            lower = lower.max(*x);
        }
    }
    loop {
        let q = (lower..).find(|&q| primes::is_prime_power(q)).expect("prime powers are unbounded");
        match per_case.values().find(|b| !b.holds(q)) {
            Some(_) => lower = q + 1,
            None => {
                let published_k = PUBLISHED_K[t.t as usize - 1];
                return ThresholdReport {
                    t: t.t,
                    rational_fibers: m as usize,
                    per_case,
                    k: q,
                    published_k,
                    discrepancy: q != published_k,
                };
            }
        }
    }
}

/// Whether the closed points needed under the singular fibers fit on the projective line over
/// `F_q`.
pub fn p1_config_feasible(q: u64, degrees: &[usize]) -> Result<bool, ConicError> {
    let t = ConicType::from_degrees(degrees)?;
    let mut counts: BTreeMap<usize, u128> = BTreeMap::new();
    for &d in &t.fiber_degrees {
        *counts.entry(d).or_default() += 1;
    }
    Ok(counts.iter().all(|(&d, &n)| n <= primes::p1_closed_points(q, d as u64)))
}
