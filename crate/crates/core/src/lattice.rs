//! Picard lattices of del Pezzo surfaces of degree 1 to 7.
//!
//! Two bases are supported. The standard basis `H, E_1, .., E_{9-d}` is available in every degree.
//! The conic basis `C, F, E_1, .., E_7` exists in degree 1 and is tied to a conic bundle with
//! fiber class `F`.
//!
//! The fixed change of basis used throughout is
//!
//! ```text
//! C   = H - E_2
//! F   = H - E_1
//! E'1 = H - E_1 - E_2
//! E'i = E_{i+1}        (i = 2..7)
//! ```
//!
//! which is the pencil of lines through the first blown-up point, with the strict transform of
//! the line through the first two points as one singular-fiber component.

use crate::matrix::IntMatrix;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("degree {0} is outside 1..=7")]
    BadDegree(u32),
    #[error("the conic basis exists only in degree 1")]
    ConicNeedsDegreeOne,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisKind {
    Standard,
    Conic,
}

/// Integer coordinates of a divisor class in the basis of some [`LatticeContext`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PicClass(pub Vec<i64>);

impl PicClass {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn add(&self, other: &PicClass) -> PicClass {
        PicClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &PicClass) -> PicClass {
        PicClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> PicClass {
        PicClass(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> PicClass {
        self.scale(-1)
    }
}

/// Exceptional classes of a context, in canonical order, with a reverse index.
pub struct LineTable {
    pub classes: Vec<PicClass>,
    index: HashMap<PicClass, usize>,
}

impl LineTable {
    fn new(classes: Vec<PicClass>) -> Self {
        let index = classes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        LineTable { classes, index }
    }

    pub fn position(&self, c: &PicClass) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

pub struct LatticeContext {
    pub degree: u32,
    pub rank: usize,
    pub basis_kind: BasisKind,
    pub gram: IntMatrix,
    pub canonical: PicClass,
    lines: OnceLock<LineTable>,
    roots: OnceLock<Vec<PicClass>>,
}

impl std::fmt::Debug for LatticeContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LatticeContext")
            .field("degree", &self.degree)
            .field("basis_kind", &self.basis_kind)
            .finish()
    }
}

impl PartialEq for LatticeContext {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.basis_kind == other.basis_kind
    }
}

impl Eq for LatticeContext {}

/// Returns the shared context for a degree and basis.
pub fn make_picard(degree: u32, basis_kind: BasisKind) -> Result<Arc<LatticeContext>, LatticeError> {
    static CACHE: OnceLock<Vec<Arc<LatticeContext>>> = OnceLock::new();
    if !(1..=7).contains(&degree) {
        return Err(LatticeError::BadDegree(degree));
    }
    if basis_kind == BasisKind::Conic && degree != 1 {
        return Err(LatticeError::ConicNeedsDegreeOne);
    }
    let all = CACHE.get_or_init(|| {
        let mut v: Vec<_> = (1..=7).map(|d| Arc::new(build(d, BasisKind::Standard))).collect();
        v.push(Arc::new(build(1, BasisKind::Conic)));
        v
    });
    Ok(match basis_kind {
        BasisKind::Standard => all[degree as usize - 1].clone(),
        BasisKind::Conic => all[7].clone(),
    })
}

/// Standard-basis context of the given degree. Panics outside 1..=7.
pub fn standard(degree: u32) -> Arc<LatticeContext> {
    make_picard(degree, BasisKind::Standard).expect("degree in 1..=7")
}

/// The degree-1 conic-basis context.
pub fn conic() -> Arc<LatticeContext> {
    make_picard(1, BasisKind::Conic).expect("degree 1")
}

fn build(degree: u32, basis_kind: BasisKind) -> LatticeContext {
    let rank = 10 - degree as usize;
    let (gram, canonical) = match basis_kind {
        BasisKind::Standard => {
            let mut d = vec![-1; rank];
            d[0] = 1;
            let mut k = vec![1; rank];
            k[0] = -3;
            (IntMatrix::diagonal(&d), PicClass(k))
        }
        BasisKind::Conic => {
            let mut g = IntMatrix::diagonal(&[0, 0, -1, -1, -1, -1, -1, -1, -1]);
            g.set(0, 1, 1);
            g.set(1, 0, 1);
            (g, PicClass(vec![-2, -2, 1, 1, 1, 1, 1, 1, 1]))
        }
    };
    LatticeContext {
        degree,
        rank,
        basis_kind,
        gram,
        canonical,
        lines: OnceLock::new(),
        roots: OnceLock::new(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    ConicToStandard,
    StandardToConic,
}

/// Change of basis between conic and standard coordinates in degree 1. The returned matrix maps
/// coordinate vectors in the source basis to coordinate vectors in the target basis.
pub fn conic_change_of_basis(direction: Direction) -> IntMatrix {
    // Columns are the conic basis vectors written in standard coordinates.
    let e = |i: usize| {
        let mut v = vec![0i64; 9];
        v[i] = 1;
        v
    };
    let h = e(0);
    let sub = |a: &Vec<i64>, b: &Vec<i64>| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>();
    let mut cols = vec![sub(&h, &e(2)), sub(&h, &e(1)), sub(&sub(&h, &e(1)), &e(2))];
    for i in 3..=8 {
        cols.push(e(i));
    }
    let to_std = IntMatrix::from_columns(&cols);
    match direction {
        Direction::ConicToStandard => to_std,
        Direction::StandardToConic => to_std.unimodular_inverse().expect("unimodular change of basis"),
    }
}

impl LatticeContext {
    pub fn inner(&self, u: &PicClass, v: &PicClass) -> i64 {
        self.try_inner(u, v).expect("classes belong to this context")
    }

    pub fn try_inner(&self, u: &PicClass, v: &PicClass) -> Result<i64, LatticeError> {
        for w in [u, v] {
            if w.0.len() != self.rank {
                return Err(LatticeError::DimensionMismatch { expected: self.rank, got: w.0.len() });
            }
        }
        let gv = self.gram.apply(&v.0);
        Ok(u.0.iter().zip(&gv).map(|(a, b)| a * b).sum())
    }

    pub fn square(&self, u: &PicClass) -> i64 {
        self.inner(u, u)
    }

    /// Unit vector for basis element `i`.
    pub fn basis(&self, i: usize) -> PicClass {
        let mut v = vec![0; self.rank];
        v[i] = 1;
        PicClass(v)
    }

    /// Coordinates of `u` in the standard basis of the same degree.
    pub fn to_standard(&self, u: &PicClass) -> PicClass {
        match self.basis_kind {
            BasisKind::Standard => u.clone(),
            BasisKind::Conic => PicClass(conic_matrices().0.apply(&u.0)),
        }
    }

    /// Coordinates in this context's basis of a class given in standard coordinates.
    pub fn from_standard(&self, u: &PicClass) -> PicClass {
        match self.basis_kind {
            BasisKind::Standard => u.clone(),
            BasisKind::Conic => PicClass(conic_matrices().1.apply(&u.0)),
        }
    }

    /// The exceptional classes (`D² = -1`, `D·K = -1`) with their reverse index.
    pub fn line_table(&self) -> &LineTable {
        self.lines.get_or_init(|| {
            let std = standard_solutions(self.degree, -1, -1);
            LineTable::new(std.iter().map(|c| self.from_standard(c)).collect())
        })
    }

    pub fn exceptional_classes(&self) -> &[PicClass] {
        &self.line_table().classes
    }

    /// Roots (`r² = -2`, `r·K = 0`) in canonical order.
    pub fn roots(&self) -> &[PicClass] {
        self.roots.get_or_init(|| {
            standard_solutions(self.degree, -2, 0).iter().map(|c| self.from_standard(c)).collect()
        })
    }

    /// Roots whose standard coordinates have positive first nonzero entry.
    pub fn positive_roots(&self) -> Vec<PicClass> {
        self.roots()
            .iter()
            .filter(|r| self.to_standard(r).0.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0))
            .cloned()
            .collect()
    }
}

fn conic_matrices() -> &'static (IntMatrix, IntMatrix) {
    static M: OnceLock<(IntMatrix, IntMatrix)> = OnceLock::new();
    M.get_or_init(|| {
        (
            conic_change_of_basis(Direction::ConicToStandard),
            conic_change_of_basis(Direction::StandardToConic),
        )
    })
}

/// All standard-basis classes `aH - Σ b_i E_i` of the given degree with `x² = s` and `x·K = k`,
/// sorted lexicographically.
///
/// With `r = 9 - d` exceptional coordinates, `x·K = -3a + Σb = k` and `x² = a² - Σb² = s`.
/// Cauchy–Schwarz gives `(3a + k)² ≤ r (a² - s)`, which bounds `a`; each `b_i` then satisfies
/// `b_i² ≤ a² - s`.
fn standard_solutions(degree: u32, s: i64, k: i64) -> Vec<PicClass> {
    let r = 9 - degree as i64;
    let mut out = Vec::new();
    // (9 - r) a² + 6k a + k² + r s ≤ 0 has finitely many integer solutions because 9 > r.
    let fits = |a: i64| (9 - r) * a * a + 6 * k * a + k * k + r * s <= 0;
    let disc = (36 * k * k - 4 * (9 - r) * (k * k + r * s)).max(0) as f64;
    let bound = ((6 * k.abs()) as f64 + disc.sqrt()) as i64 / (2 * (9 - r)) + 2;
    for a in -bound..=bound {
        if !fits(a) {
            continue;
        }
        let sum = 3 * a + k;
        let sumsq = a * a - s;
        let mut b = Vec::with_capacity(r as usize);
        fill(r as usize, sum, sumsq, &mut b, &mut |bs| {
            let mut v = vec![a];
            v.extend(bs.iter().map(|x| -x));
            out.push(PicClass(v));
        });
    }
    out.sort();
    out
}

/// Enumerates integer vectors of length `n` with the given sum and sum of squares.
fn fill(n: usize, sum: i64, sumsq: i64, prefix: &mut Vec<i64>, emit: &mut impl FnMut(&[i64])) {
    if n == 0 {
        if sum == 0 && sumsq == 0 {
            emit(prefix);
        }
        return;
    }
    if sumsq < 0 || sum * sum > n as i64 * sumsq {
        return;
    }
    let m = (sumsq as f64).sqrt() as i64 + 1;
    for x in -m..=m {
        if x * x > sumsq {
            continue;
        }
        prefix.push(x);
        fill(n - 1, sum - x, sumsq - x * x, prefix, emit);
        prefix.pop();
    }
}
