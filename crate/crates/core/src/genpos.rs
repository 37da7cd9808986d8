//! Closed points of the projective plane over `F_q` and the search for blow-up centers in
//! general position.
//!
//! All points of one configuration are written over a single field `F_{q^L}` where `L` is the
//! least common multiple of the center degrees. Frobenius over `F_q` is `x ↦ x^q`.

use crate::field::{self, Field, FieldDesc, FieldError};
use crate::primes;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

pub type Point = [u64; 3];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenposError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("degree {d} does not divide the field degree {field_degree}")]
    DegreeNotInField { d: usize, field_degree: usize },
    #[error("profile must be positive integers summing to 8, got {0:?}")]
    BadProfile(Vec<usize>),
    #[error("geometric points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("too many points to enumerate")]
    TooLarge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ambient {
    P1,
    P2,
}

/// `F_{q^L}` together with `q`.
#[derive(Clone, Debug)]
pub struct Compositum {
    pub q: u64,
    pub degree: usize,
    pub field: Field,
}

impl Compositum {
    pub fn new(q: u64, degree: usize) -> Result<Self, GenposError> {
        let (p, k) = primes::prime_power(q).ok_or(GenposError::NotPrimePower(q))?;
        let field = field::make_field(p, k * degree as u32)?;
        Ok(Compositum { q, degree, field })
    }

    /// The field holding closed points of all the given degrees.
    pub fn for_degrees(q: u64, degrees: &[usize]) -> Result<Self, GenposError> {
        let l = degrees.iter().fold(1u64, |acc, &d| primes::lcm(acc, d as u64));
        Self::new(q, l as usize)
    }

    pub fn frobenius(&self, x: u64) -> u64 {
        self.field.pow(x, self.q)
    }

    pub fn frobenius_point(&self, pt: &[u64]) -> Vec<u64> {
        normalize(&self.field, &pt.iter().map(|&x| self.frobenius(x)).collect::<Vec<_>>())
    }

    pub fn is_rational(&self, x: u64) -> bool {
        self.frobenius(x) == x
    }
}

/// Scales so that the first nonzero coordinate is 1.
pub fn normalize(f: &Field, pt: &[u64]) -> Vec<u64> {
    match pt.iter().find(|&&x| x != 0) {
        None => pt.to_vec(),
        Some(&lead) => {
            let inv = f.inv(lead);
            pt.iter().map(|&x| f.mul(x, inv)).collect()
        }
    }
}

/// A Frobenius orbit of geometric points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedPoint {
    pub degree: usize,
    /// The lexicographically least member.
    pub rep: Vec<u64>,
    /// `rep`, `Frob(rep)`, .. in order.
    pub orbit: Vec<Vec<u64>>,
}

impl ClosedPoint {
    pub fn from_rep(c: &Compositum, rep: &[u64]) -> ClosedPoint {
        let rep = normalize(&c.field, rep);
        let mut orbit = vec![rep.clone()];
        let mut cur = c.frobenius_point(&rep);
        while cur != rep {
            orbit.push(cur.clone());
            cur = c.frobenius_point(&cur);
        }
        ClosedPoint { degree: orbit.len(), rep, orbit }
    }
}

/// Limit on the points of `P^n(F_{q^d})` scanned by [`closed_points`].
const ENUMERATION_LIMIT: u64 = 50_000_000;

/// One representative of each closed point of exact degree `d`.
pub fn closed_points(c: &Compositum, d: usize, ambient: Ambient) -> Result<Vec<ClosedPoint>, GenposError> {
    if d == 0 || c.degree % d != 0 {
        return Err(GenposError::DegreeNotInField { d, field_degree: c.degree });
    }
    let m = c.q.checked_pow(d as u32).ok_or(GenposError::TooLarge)?;
    let total = match ambient {
        Ambient::P1 => m + 1,
        Ambient::P2 => m.checked_mul(m).ok_or(GenposError::TooLarge)? + m + 1,
    };
    if total > ENUMERATION_LIMIT {
        return Err(GenposError::TooLarge);
    }
    let sub = c.field.subfield(m);
    let mut affine: Vec<Vec<u64>> = Vec::new();
    match ambient {
        Ambient::P1 => {
            affine.extend(sub.iter().map(|&y| vec![1, y]));
            affine.push(vec![0, 1]);
        }
        Ambient::P2 => {
            for &y in &sub {
                for &z in &sub {
                    affine.push(vec![1, y, z]);
                }
            }
            affine.extend(sub.iter().map(|&z| vec![0, 1, z]));
            affine.push(vec![0, 0, 1]);
        }
    }
    let out: Vec<ClosedPoint> = affine
        .par_iter()
        .filter_map(|pt| {
            let cp = ClosedPoint::from_rep(c, pt);
            (cp.degree == d && &cp.rep == pt && cp.orbit.iter().all(|o| o >= pt)).then_some(cp)
        })
        .collect();
    Ok(out)
}

/// A condition that fails, naming geometric points by position in the flattened list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    Collinear([usize; 3]),
    OnConic([usize; 6]),
    SingularCubic { points: [usize; 8], singular: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionReport {
    pub general: bool,
    pub violation: Option<Violation>,
}

/// Tests the flattened geometric points of the given closed points.
pub fn general_position(c: &Compositum, points: &[ClosedPoint]) -> Result<PositionReport, GenposError> {
    let geo: Vec<Point> = points.iter().flat_map(|p| p.orbit.iter().map(|x| to_point(x))).collect();
    check_points(&c.field, &geo)
}

/// Same test on bare geometric points.
pub fn check_points(f: &Field, geo: &[Point]) -> Result<PositionReport, GenposError> {
    for i in 0..geo.len() {
        for j in i + 1..geo.len() {
            if normalize(f, &geo[i]) == normalize(f, &geo[j]) {
                return Err(GenposError::DuplicatePoints(i, j));
            }
        }
    }
    let violation = Checker::new(f).first_violation(geo, 0);
    Ok(PositionReport { general: violation.is_none(), violation })
}

fn to_point(v: &[u64]) -> Point {
    [v[0], v[1], v[2]]
}

/// Incremental general-position checks.
struct Checker<'a> {
    f: &'a Field,
}

impl<'a> Checker<'a> {
    fn new(f: &'a Field) -> Self {
        Checker { f }
    }

    /// First violated condition among subsets that contain a point at position `≥ start`.
    fn first_violation(&self, pts: &[Point], start: usize) -> Option<Violation> {
        let n = pts.len();
        for k in start.max(2)..n {
            for j in 1..k {
                for i in 0..j {
                    if self.collinear(&pts[i], &pts[j], &pts[k]) {
                        return Some(Violation::Collinear([i, j, k]));
                    }
                }
            }
        }
        if n >= 6 {
            let conic: Vec<[u64; 6]> = pts.iter().map(|p| self.conic_row(p)).collect();
            for last in start.max(5)..n {
                let mut found = None;
                for_each_subset(last, 5, &mut |s| {
                    let rows = [conic[s[0]], conic[s[1]], conic[s[2]], conic[s[3]], conic[s[4]], conic[last]];
                    if !self.full_rank(rows) {
                        found = Some([s[0], s[1], s[2], s[3], s[4], last]);
                        return true;
                    }
                    false
                });
                if let Some(s) = found {
                    return Some(Violation::OnConic(s));
                }
            }
        }
        if n == 8 {
            for s in 0..8 {
                if self.singular_cubic(pts, s) {
                    return Some(Violation::SingularCubic { points: [0, 1, 2, 3, 4, 5, 6, 7], singular: s });
                }
            }
        }
        None
    }

    fn collinear(&self, a: &Point, b: &Point, c: &Point) -> bool {
        let f = self.f;
        let m = |x, y| f.mul(x, y);
        let t1 = f.sub(m(b[1], c[2]), m(b[2], c[1]));
        let t2 = f.sub(m(b[0], c[2]), m(b[2], c[0]));
        let t3 = f.sub(m(b[0], c[1]), m(b[1], c[0]));
        f.add(f.sub(m(a[0], t1), m(a[1], t2)), m(a[2], t3)) == 0
    }

    fn conic_row(&self, p: &Point) -> [u64; 6] {
        let m = |x, y| self.f.mul(x, y);
        [m(p[0], p[0]), m(p[1], p[1]), m(p[2], p[2]), m(p[0], p[1]), m(p[0], p[2]), m(p[1], p[2])]
    }

    /// Whether a cubic through all eight points is singular at point `s`.
    fn singular_cubic(&self, pts: &[Point], s: usize) -> bool {
        let mut rows: [[u64; 10]; 10] = [[0; 10]; 10];
        let mut r = 0;
        for (i, p) in pts.iter().enumerate() {
            if i != s {
                rows[r] = cubic_row(self.f, p);
                r += 1;
            }
        }
        let p = &pts[s];
        rows[7] = cubic_row(self.f, p);
        // Chart where the first nonzero coordinate of s is 1; the other two partials vanish.
        let chart = p.iter().position(|&x| x != 0).expect("nonzero point");
        let mut k = 8;
        for var in 0..3 {
            if var != chart {
                rows[k] = cubic_partial_row(self.f, p, var);
                k += 1;
            }
        }
        !self.full_rank(rows)
    }

    fn full_rank<const N: usize>(&self, mut rows: [[u64; N]; N]) -> bool {
        let f = self.f;
        for col in 0..N {
            let Some(piv) = (col..N).find(|&r| rows[r][col] != 0) else {
                return false;
            };
            rows.swap(col, piv);
            let inv = f.inv(rows[col][col]);
            for r in col + 1..N {
                if rows[r][col] == 0 {
                    continue;
                }
                let factor = f.mul(rows[r][col], inv);
                for c in col..N {
                    let v = f.mul(factor, rows[col][c]);
                    rows[r][c] = f.sub(rows[r][c], v);
                }
            }
        }
        true
    }
}

/// Exponents of the cubic monomials `x^a y^b z^c`.
pub const CUBIC_MONOMIALS: [[u32; 3]; 10] =
    [[3, 0, 0], [0, 3, 0], [0, 0, 3], [2, 1, 0], [2, 0, 1], [1, 2, 0], [0, 2, 1], [1, 0, 2], [0, 1, 2], [1, 1, 1]];

fn cubic_row(f: &Field, p: &Point) -> [u64; 10] {
    CUBIC_MONOMIALS.map(|e| monomial(f, p, e))
}

fn cubic_partial_row(f: &Field, p: &Point, var: usize) -> [u64; 10] {
    CUBIC_MONOMIALS.map(|e| {
        if e[var] == 0 {
            return 0;
        }
        let mut d = e;
        d[var] -= 1;
        f.mul(f.from_int(e[var] as i64), monomial(f, p, d))
    })
}

fn monomial(f: &Field, p: &Point, e: [u32; 3]) -> u64 {
    (0..3).fold(1, |acc, i| f.mul(acc, f.pow(p[i], e[i] as u64)))
}

/// Calls `visit` on every increasing `k`-subset of `0..n` until it returns true.
fn for_each_subset(n: usize, k: usize, visit: &mut impl FnMut(&[usize]) -> bool) {
    fn rec(n: usize, k: usize, from: usize, cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return visit(cur);
        }
        for i in from..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            if rec(n, k, i + 1, cur, visit) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(n, k, 0, &mut Vec::with_capacity(k), visit);
}

/// Degrees of the closed points blown up, summing to 8.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupProfile {
    pub degrees: Vec<usize>,
}

impl BlowupProfile {
    pub fn new(degrees: &[usize]) -> Result<Self, GenposError> {
        let mut d = degrees.to_vec();
        d.sort_unstable();
        if d.is_empty() || d[0] == 0 || d.iter().sum::<usize>() != 8 {
            return Err(GenposError::BadProfile(d));
        }
        Ok(BlowupProfile { degrees: d })
    }

    pub fn rational_count(&self) -> usize {
        self.degrees.iter().filter(|&&d| d == 1).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCenter {
    pub degree: usize,
    /// Homogeneous coordinates of one geometric point, each as coefficients over `F_p`.
    pub coordinates: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub q: u64,
    pub profile: Vec<usize>,
    /// The field `F_{q^L}` the coordinates live in.
    pub field: FieldDesc,
    pub centers: Vec<WitnessCenter>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchOutcome {
    Witness(Witness),
    /// Every configuration up to the frame normalization was rejected.
    Exhausted { nodes: u64 },
}

/// Frame points used to normalize the first rational centers.
const FRAME: [Point; 4] = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]];

/// Depth-first search for closed points of the profile's degrees in general position.
///
/// Up to four rational centers are fixed to the standard frame, which loses nothing since
/// `PGL_3(F_q)` is transitive on ordered frames of up to four points with no three collinear.
/// The remaining centers are placed from the largest degree down, with same-degree centers in
/// increasing candidate order. The seed shuffles each candidate list.
pub fn search_profile(q: u64, profile: &BlowupProfile, seed: u64) -> Result<SearchOutcome, GenposError> {
    let c = Compositum::for_degrees(q, &profile.degrees)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame_len = profile.rational_count().min(4);
    let frame: Vec<Point> = FRAME[..frame_len].to_vec();
    let mut slots: Vec<usize> = profile.degrees.iter().rev().copied().collect();
    for _ in 0..frame_len {
        let pos = slots.iter().rposition(|&d| d == 1).expect("rational slot");
        slots.remove(pos);
    }
    let mut candidates: Vec<(usize, Vec<Vec<Point>>)> = Vec::new();
    for &d in &slots {
        if candidates.last().is_some_and(|(e, _)| *e == d) {
            continue;
        }
        let mut list: Vec<Vec<Point>> = closed_points(&c, d, Ambient::P2)?
            .into_iter()
            .map(|cp| cp.orbit.iter().map(|x| to_point(x)).collect::<Vec<Point>>())
            .filter(|orbit| !(d == 1 && frame.contains(&orbit[0])))
            .collect();
        list.shuffle(&mut rng);
        candidates.push((d, list));
    }
    let lists: Vec<&Vec<Vec<Point>>> =
        slots.iter().map(|d| &candidates.iter().find(|(e, _)| e == d).expect("list").1).collect();
    let search = Search { f: &c.field, slots: &slots, lists, nodes: AtomicU64::new(0) };
    let checker = Checker::new(&c.field);
    let base = frame;
    if checker.first_violation(&base, 0).is_some() {
        unreachable!("the frame is in general position");
    }
    let found = if slots.is_empty() {
        Some(base.clone())
    } else {
        let first = search.lists[0];
        (0..first.len()).into_par_iter().find_map_first(|i| {
            let mut pts = base.clone();
            let mut chosen = vec![i];
            search.place(&mut pts, 0, i).then(|| ()).and_then(|_| search.descend(&mut pts, &mut chosen))
        })
    };
    let nodes = search.nodes.load(Ordering::Relaxed);
    Ok(match found {
        None => SearchOutcome::Exhausted { nodes },
        Some(pts) => SearchOutcome::Witness(witness(&c, profile, &pts)),
    })
}

struct Search<'a> {
    f: &'a Field,
    slots: &'a [usize],
    lists: Vec<&'a Vec<Vec<Point>>>,
    nodes: AtomicU64,
}

impl Search<'_> {
    /// Appends candidate `i` of slot `k`; keeps it if no new violation appears.
    fn place(&self, pts: &mut Vec<Point>, k: usize, i: usize) -> bool {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let start = pts.len();
        pts.extend_from_slice(&self.lists[k][i]);
        if Checker::new(self.f).first_violation(pts, start).is_some() {
            pts.truncate(start);
            return false;
        }
        true
    }

    fn descend(&self, pts: &mut Vec<Point>, chosen: &mut Vec<usize>) -> Option<Vec<Point>> {
        let k = chosen.len();
        if k == self.slots.len() {
            return Some(pts.clone());
        }
        let from = if self.slots[k] == self.slots[k - 1] { chosen[k - 1] + 1 } else { 0 };
        for i in from..self.lists[k].len() {
            let start = pts.len();
            if self.place(pts, k, i) {
                chosen.push(i);
                if let Some(w) = self.descend(pts, chosen) {
                    return Some(w);
                }
                chosen.pop();
                pts.truncate(start);
            }
        }
        None
    }
}

fn witness(c: &Compositum, profile: &BlowupProfile, pts: &[Point]) -> Witness {
    let mut centers = Vec::new();
    let mut i = 0;
    while i < pts.len() {
        let cp = ClosedPoint::from_rep(c, &pts[i]);
        centers.push(WitnessCenter {
            degree: cp.degree,
            coordinates: pts[i].iter().map(|&x| c.field.digits(x)).collect(),
        });
        i += cp.degree;
    }
    Witness { q: c.q, profile: profile.degrees.clone(), field: c.field.desc.clone(), centers }
}

impl Witness {
    /// Rebuilds the field and the closed points from the serialized form.
    pub fn decode(&self) -> Result<(Compositum, Vec<ClosedPoint>), GenposError> {
        let c = Compositum::for_degrees(self.q, &self.profile)?;
        assert_eq!(c.field.desc, self.field, "witness field differs from the canonical compositum");
        let points = self
            .centers
            .iter()
            .map(|w| {
                let rep: Vec<u64> = w.coordinates.iter().map(|d| c.field.from_digits(d)).collect();
                ClosedPoint::from_rep(&c, &rep)
            })
            .collect();
        Ok((c, points))
    }
}

/// Rational point count of the blow-up, from the trace formula and directly from the witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCountCheck {
    pub trace: i64,
    pub formula: u64,
    pub direct: u64,
    pub equal: bool,
}

/// Each rational center replaces one point of the plane by a line with `q + 1` points; other
/// centers change nothing over `F_q`. The trace on the Picard lattice is `1 + n₁`.
pub fn blowup_point_count_check(w: &Witness) -> Result<PointCountCheck, GenposError> {
    let (c, points) = w.decode()?;
    let q = w.q;
    let plane = closed_points(&c, 1, Ambient::P2)?.len() as u64;
    let rational = points.iter().filter(|p| p.rep.iter().all(|&x| c.is_rational(x))).count() as u64;
    let direct = plane - rational + rational * (q + 1);
    let trace = 1 + w.profile.iter().filter(|&&d| d == 1).count() as i64;
    let formula = q * q + trace as u64 * q + 1;
    Ok(PointCountCheck { trace, formula, direct, equal: formula == direct })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_point_counts() {
        let c = Compositum::new(2, 2).unwrap();
        assert_eq!(closed_points(&c, 1, Ambient::P2).unwrap().len(), 7);
        assert_eq!(closed_points(&c, 2, Ambient::P1).unwrap().len(), 1);
        let c3 = Compositum::new(3, 1).unwrap();
        assert_eq!(closed_points(&c3, 1, Ambient::P1).unwrap().len(), 4);
        let c4 = Compositum::new(4, 3).unwrap();
        let pts = closed_points(&c4, 3, Ambient::P2).unwrap();
        assert_eq!(pts.len() as u128, primes::p2_closed_points(4, 3));
        assert!(pts.iter().all(|p| p.orbit.len() == 3));
    }

    #[test]
    fn collinear_points_fail() {
        let c = Compositum::new(4, 1).unwrap();
        let pts: Vec<ClosedPoint> =
            [[1, 0, 0], [0, 1, 0], [1, 1, 0]].iter().map(|p| ClosedPoint::from_rep(&c, p)).collect();
        let r = general_position(&c, &pts).unwrap();
        assert!(!r.general);
        assert_eq!(r.violation, Some(Violation::Collinear([0, 1, 2])));
        let two = general_position(&c, &pts[..2]).unwrap();
        assert!(two.general);
    }

    #[test]
    fn duplicates_rejected() {
        let c = Compositum::new(5, 1).unwrap();
        let a = ClosedPoint::from_rep(&c, &[1, 2, 3]);
        let b = ClosedPoint::from_rep(&c, &[2, 4, 1]);
        assert_eq!(general_position(&c, &[a, b]).unwrap_err(), GenposError::DuplicatePoints(0, 1));
    }

    #[test]
    fn six_points_on_a_conic() {
        // xy = z² over F_7: (t² : 1 : t).
        let c = Compositum::new(7, 1).unwrap();
        let pts: Vec<ClosedPoint> =
            (1..=6u64).map(|t| ClosedPoint::from_rep(&c, &[t * t % 7, 1, t])).collect();
        let r = general_position(&c, &pts).unwrap();
        assert!(matches!(r.violation, Some(Violation::OnConic(_))));
        assert!(general_position(&c, &pts[..5]).unwrap().general);
    }

    #[test]
    fn small_plane_exhausted() {
        let p = BlowupProfile::new(&[1; 8]).unwrap();
        assert!(matches!(search_profile(2, &p, 0).unwrap(), SearchOutcome::Exhausted { .. }));
    }

    #[test]
    fn profile_validation() {
        assert!(BlowupProfile::new(&[1, 2, 3]).is_err());
        assert_eq!(BlowupProfile::new(&[4, 1, 3]).unwrap().degrees, vec![1, 3, 4]);
    }
}
