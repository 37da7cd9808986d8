//! Lattice isometries fixing the canonical class, their invariants, and catalog discovery.

use crate::lattice::{self, BasisKind, LatticeContext, PicClass};
use crate::matrix::{poly, IntMatrix};
use crate::orbits::{self, PatternCount};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

/// Number of conjugacy classes of W(E8).
pub const CLASS_COUNT: usize = 112;

/// Orders of elements are bounded by this in W(E8); larger values indicate invalid input.
pub const ORDER_LIMIT: u64 = 1_000_000;

/// Least common multiple of the element orders of W(E8).
pub const EXPONENT: u32 = 2520;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeylError {
    #[error("matrix does not preserve the intersection form")]
    FormNotPreserved,
    #[error("matrix does not fix the canonical class")]
    CanonicalNotFixed,
    #[error("class is not a root")]
    NotARoot,
    #[error("matrix has size {got}, expected {expected}")]
    WrongSize { expected: usize, got: usize },
    #[error("element order exceeds {0}")]
    OrderTooLarge(u64),
}

/// An isometry of the Picard lattice fixing `K`.
#[derive(Clone, Debug)]
pub struct LatticeAut {
    pub ctx: Arc<LatticeContext>,
    pub mat: IntMatrix,
}

impl PartialEq for LatticeAut {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.mat == other.mat
    }
}

impl Eq for LatticeAut {}

pub fn validate_aut(ctx: &Arc<LatticeContext>, mat: IntMatrix) -> Result<LatticeAut, WeylError> {
    if mat.size() != ctx.rank {
        return Err(WeylError::WrongSize { expected: ctx.rank, got: mat.size() });
    }
    if &(&mat.transpose() * &ctx.gram) * &mat != ctx.gram {
        return Err(WeylError::FormNotPreserved);
    }
    if mat.apply(&ctx.canonical.0) != ctx.canonical.0 {
        return Err(WeylError::CanonicalNotFixed);
    }
    Ok(LatticeAut { ctx: ctx.clone(), mat })
}

/// The reflection `x ↦ x + (x·r) r` in a root `r`.
pub fn reflection(ctx: &Arc<LatticeContext>, root: &PicClass) -> Result<LatticeAut, WeylError> {
    if ctx.try_inner(root, root) != Ok(-2) || ctx.inner(root, &ctx.canonical) != 0 {
        return Err(WeylError::NotARoot);
    }
    let gr = ctx.gram.apply(&root.0);
    let mut m = IntMatrix::identity(ctx.rank);
    for i in 0..ctx.rank {
        for j in 0..ctx.rank {
            m.set(i, j, m.get(i, j) + root.0[i] * gr[j]);
        }
    }
    Ok(LatticeAut { ctx: ctx.clone(), mat: m })
}

impl LatticeAut {
    pub fn identity(ctx: &Arc<LatticeContext>) -> Self {
        LatticeAut { ctx: ctx.clone(), mat: IntMatrix::identity(ctx.rank) }
    }

    pub fn apply(&self, x: &PicClass) -> PicClass {
        PicClass(self.mat.apply(&x.0))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LatticeAut) -> LatticeAut {
        assert!(self.ctx == other.ctx, "automorphisms of different lattices");
        LatticeAut { ctx: self.ctx.clone(), mat: &self.mat * &other.mat }
    }

    /// Inverse of an isometry: `G⁻¹ Mᵀ G`.
    pub fn inverse(&self) -> LatticeAut {
        let g = &self.ctx.gram;
        let ginv = g.unimodular_inverse().expect("unimodular form");
        LatticeAut { ctx: self.ctx.clone(), mat: &(&ginv * &self.mat.transpose()) * g }
    }

    /// `g ∘ self ∘ g⁻¹`.
    pub fn conjugate_by(&self, g: &LatticeAut) -> LatticeAut {
        g.compose(self).compose(&g.inverse())
    }

    pub fn pow(&self, e: u64) -> LatticeAut {
        LatticeAut { ctx: self.ctx.clone(), mat: self.mat.pow(e) }
    }

    pub fn is_identity(&self) -> bool {
        self.mat.is_identity()
    }

    /// The same isometry written in another basis of the degree-1 lattice.
    pub fn in_basis(&self, kind: BasisKind) -> LatticeAut {
        if self.ctx.basis_kind == kind {
            return self.clone();
        }
        let to_std = lattice::conic_change_of_basis(lattice::Direction::ConicToStandard);
        let to_conic = lattice::conic_change_of_basis(lattice::Direction::StandardToConic);
        let (ctx, mat) = match kind {
            BasisKind::Standard => (lattice::standard(1), &(&to_std * &self.mat) * &to_conic),
            BasisKind::Conic => (lattice::conic(), &(&to_conic * &self.mat) * &to_std),
        };
        LatticeAut { ctx, mat }
    }
}

pub fn element_order(a: &LatticeAut) -> Result<u64, WeylError> {
    let mut p = a.mat.clone();
    let mut n = 1u64;
    while !p.is_identity() {
        n += 1;
        if n > ORDER_LIMIT {
            return Err(WeylError::OrderTooLarge(ORDER_LIMIT));
        }
        p = &p * &a.mat;
    }
    Ok(n)
}

/// Conjugacy-invariant fingerprint of an isometry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassSignature {
    pub order: u64,
    pub trace: i64,
    /// Characteristic polynomial on the full lattice, constant term first.
    pub charpoly: Vec<i64>,
    /// Orbit patterns on the exceptional classes with multiplicities, sorted.
    pub orbit_patterns: Vec<PatternCount>,
    pub index: usize,
    pub fixed_rank: usize,
}

pub fn signature(a: &LatticeAut) -> ClassSignature {
    let order = element_order(a).expect("valid automorphisms have finite order");
    let (trace, fixed_rank) = orbits::invariants(a);
    let decomposition = orbits::line_orbits(a);
    ClassSignature {
        order,
        trace,
        charpoly: a.mat.charpoly(),
        orbit_patterns: orbits::pattern_multiset(&decomposition),
        index: orbits::index_of(&decomposition, a),
        fixed_rank,
    }
}

impl ClassSignature {
    /// Whether the characteristic polynomial is a product of cyclotomic polynomials.
    pub fn charpoly_is_cyclotomic(&self) -> bool {
        poly::cyclotomic_factors(&self.charpoly, 30).is_some()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub signature: ClassSignature,
    pub representative: IntMatrix,
    pub type_number: Option<u32>,
}

/// Signatures with representatives, sorted by signature. Entry position is the internal ID.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn is_complete(&self) -> bool {
        self.entries.len() == CLASS_COUNT
    }

    pub fn find(&self, sig: &ClassSignature) -> Option<usize> {
        self.entries.binary_search_by(|e| e.signature.cmp(sig)).ok()
    }

    pub fn by_type_number(&self, n: u32) -> Option<usize> {
        self.entries.iter().position(|e| e.type_number == Some(n))
    }

    pub fn representative(&self, id: usize) -> LatticeAut {
        LatticeAut { ctx: lattice::standard(1), mat: self.entries[id].representative.clone() }
    }
}

#[derive(Debug, Error)]
#[error("budget exhausted after finding {} of {CLASS_COUNT} classes", partial.entries.len())]
pub struct BudgetExhausted {
    pub partial: Catalog,
}

/// Mean length of the random reflection words.
const MEAN_WORD_LENGTH: f64 = 12.0;
/// Candidates evaluated per deterministic batch.
const BATCH: usize = 256;

/// Random walk over products of reflections in the positive roots of E8, deduplicated by
/// signature.
///
/// Every new representative is also followed by its powers and its product with the central
/// element `-1` on `K⊥`, since several small classes are practically unreachable by random
/// words alone. The budget counts signature evaluations. Batches are evaluated in parallel and
/// merged in a fixed order, so the result depends only on the seed.
pub fn discover_catalog(seed: u64, budget: usize) -> Result<Catalog, BudgetExhausted> {
    let ctx = lattice::standard(1);
    let reflections: Vec<LatticeAut> =
        ctx.positive_roots().iter().map(|r| reflection(&ctx, r).expect("root")).collect();
    let central = central_involution(&ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: BTreeMap<ClassSignature, IntMatrix> = BTreeMap::new();
    let mut queue: Vec<LatticeAut> = vec![LatticeAut::identity(&ctx)];
    let mut spent = 0usize;
    while spent < budget && found.len() < CLASS_COUNT {
        let room = (budget - spent).min(BATCH);
        let mut batch: Vec<LatticeAut> = queue.drain(..queue.len().min(room)).collect();
        while batch.len() < room {
            batch.push(random_word(&ctx, &reflections, &mut rng));
        }
        spent += batch.len();
        let sigs: Vec<ClassSignature> = batch.par_iter().map(signature).collect();
        for (a, sig) in batch.into_iter().zip(sigs) {
            if found.contains_key(&sig) {
                continue;
            }
            for k in 2..sig.order {
                queue.push(a.pow(k));
            }
            queue.push(central.compose(&a));
            found.insert(sig, a.mat);
        }
    }
    let catalog = Catalog {
        entries: found
            .into_iter()
            .map(|(signature, representative)| CatalogEntry { signature, representative, type_number: None })
            .collect(),
    };
    if catalog.is_complete() {
        Ok(catalog)
    } else {
        Err(BudgetExhausted { partial: catalog })
    }
}

fn random_word(ctx: &Arc<LatticeContext>, gens: &[LatticeAut], rng: &mut ChaCha8Rng) -> LatticeAut {
    // Geometric length on {0, 1, ...} with the given mean.
    let stop = 1.0 / (MEAN_WORD_LENGTH + 1.0);
    let mut a = LatticeAut::identity(ctx);
    while !rng.gen_bool(stop) {
        a = a.compose(&gens[rng.gen_range(0..gens.len())]);
    }
    a
}

/// A random conjugator: a reflection word of the given length.
pub fn random_reflection_word(ctx: &Arc<LatticeContext>, len: usize, rng: &mut impl Rng) -> LatticeAut {
    let roots = ctx.positive_roots();
    let mut a = LatticeAut::identity(ctx);
    for _ in 0..len {
        let r = &roots[rng.gen_range(0..roots.len())];
        a = a.compose(&reflection(ctx, r).expect("root"));
    }
    a
}

/// `x ↦ 2(x·K)K − x`, valid in degree 1 where `K² = 1`.
pub fn central_involution(ctx: &Arc<LatticeContext>) -> LatticeAut {
    assert_eq!(ctx.degree, 1);
    let k = &ctx.canonical.0;
    let gk = ctx.gram.apply(k);
    let mut m = IntMatrix::identity(ctx.rank).scale(-1);
    for i in 0..ctx.rank {
        for j in 0..ctx.rank {
            m.set(i, j, m.get(i, j) + 2 * k[i] * gk[j]);
        }
    }
    LatticeAut { ctx: ctx.clone(), mat: m }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflections() {
        let ctx = lattice::standard(1);
        let r = ctx.roots()[17].clone();
        let s = reflection(&ctx, &r).unwrap();
        assert_eq!(s.apply(&r), r.neg());
        assert_eq!(s.apply(&ctx.canonical), ctx.canonical);
        assert!(s.compose(&s).is_identity());
        assert!(validate_aut(&ctx, s.mat.clone()).is_ok());
        assert_eq!(reflection(&ctx, &ctx.canonical), Err(WeylError::NotARoot));
    }

    #[test]
    fn validation() {
        let ctx = lattice::standard(1);
        assert!(validate_aut(&ctx, IntMatrix::identity(9)).is_ok());
        assert_eq!(validate_aut(&ctx, IntMatrix::identity(9).scale(-1)), Err(WeylError::CanonicalNotFixed));
        let mut m = IntMatrix::identity(9);
        m.set(0, 1, 1);
        assert_eq!(validate_aut(&ctx, m), Err(WeylError::FormNotPreserved));
        assert!(matches!(validate_aut(&ctx, IntMatrix::identity(8)), Err(WeylError::WrongSize { .. })));
    }

    #[test]
    fn identity_and_central_signatures() {
        let ctx = lattice::standard(1);
        let id = signature(&LatticeAut::identity(&ctx));
        assert_eq!((id.order, id.trace, id.index, id.fixed_rank), (1, 9, 8, 9));
        assert_eq!(id.orbit_patterns.len(), 1);
        assert_eq!(id.orbit_patterns[0].count, 240);
        let b = signature(&central_involution(&ctx));
        assert_eq!((b.order, b.trace, b.fixed_rank, b.index), (2, -7, 1, 0));
        assert!(b.charpoly_is_cyclotomic());
    }

    #[test]
    fn inverse_and_basis_change() {
        let ctx = lattice::standard(1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_reflection_word(&ctx, 9, &mut rng);
        assert!(g.compose(&g.inverse()).is_identity());
        let c = g.in_basis(BasisKind::Conic);
        assert!(validate_aut(&c.ctx, c.mat.clone()).is_ok());
        assert_eq!(c.in_basis(BasisKind::Standard), g);
        assert_eq!(signature(&c), signature(&g));
    }

    #[test]
    fn tiny_budget_contains_identity() {
        let partial = discover_catalog(1, 1).unwrap_err().partial;
        assert_eq!(partial.entries.len(), 1);
        assert_eq!(partial.entries[0].signature.trace, 9);
    }
}
