//! Assigning published type numbers to catalog entries.
//!
//! Independent anchors come from two constructions with known types: the minimal conic bundles
//! of types 1 to 7 and the blow-ups of the plane in closed points of given degrees. Further
//! entries are fixed by matching their degree-2 contractions against the published point counts
//! and line bounds, eliminating candidates that are already taken. Bertini propagation is
//! optional so that the twist table can be checked against anchors that did not use it.

use crate::conic_bundle::ConicType;
use crate::descent::{self, Deg2Class, LinearBound};
use crate::lattice::{self, BasisKind};
use crate::matrix::IntMatrix;
use crate::tables;
use crate::weyl::{self, Catalog, ClassSignature, LatticeAut};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

/// Frobenius of the blow-up of the plane in closed points of the given degrees: a permutation of
/// `E1..E8` with one cycle per point.
pub fn profile_representative(profile: &[usize]) -> LatticeAut {
    let ctx = lattice::standard(1);
    let mut m = IntMatrix::zero(9);
    m.set(0, 0, 1);
    let mut start = 1;
    for &d in profile {
        for k in 0..d {
            let from = start + k;
            let to = start + (k + 1) % d;
            m.set(to, from, 1);
        }
        start += d;
    }
    weyl::validate_aut(&ctx, m).expect("permutations of the E_i are isometries")
}

pub fn conic_representative(t: u8) -> LatticeAut {
    ConicType::new(t).representative().lift().in_basis(BasisKind::Standard)
}

/// Where an anchor came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnchorSource {
    ConicBundle,
    BlowupProfile,
    BertiniOfAnchor,
    DegreeTwoTable,
    BertiniPropagation,
}

/// Signatures of the constructed representatives, with their type numbers. Twists of the
/// constructed anchors are included.
pub fn anchor_table() -> &'static [(ClassSignature, u32, AnchorSource)] {
    static T: OnceLock<Vec<(ClassSignature, u32, AnchorSource)>> = OnceLock::new();
    T.get_or_init(|| {
        let mut reps: Vec<(LatticeAut, u32, AnchorSource)> = Vec::new();
        for t in 1..=7u8 {
            reps.push((conic_representative(t), t as u32, AnchorSource::ConicBundle));
        }
        for row in tables::BLOWUP_ROWS {
            reps.push((profile_representative(row.profile), row.dp1, AnchorSource::BlowupProfile));
        }
        let twisted: Vec<_> = reps
            .iter()
            .map(|(a, t, _)| {
                (descent::bertini(a).expect("degree 1"), tables::twist_of(*t), AnchorSource::BertiniOfAnchor)
            })
            .collect();
        reps.extend(twisted);
        let mut out: Vec<(ClassSignature, u32, AnchorSource)> = Vec::new();
        for (a, t, src) in reps {
            let sig = weyl::signature(&a);
            if let Some(prev) = out.iter().find(|(s, _, _)| *s == sig) {
                assert_eq!(prev.1, t, "constructed anchors disagree");
                continue;
            }
            out.push((sig, t, src));
        }
        out
    })
}

/// The published type number of a signature, when the constructed anchors determine it.
pub fn match_anchor(sig: &ClassSignature) -> Option<u32> {
    anchor_table().iter().find(|(s, _, _)| s == sig).map(|(_, t, _)| *t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnchorConflict {
    pub entry: usize,
    pub existing: u32,
    pub proposed: u32,
    pub source: AnchorSource,
}

/// A degree-2 class matched to rows of the degree-2 table.
#[derive(Clone, Debug, Serialize)]
pub struct Deg2Match {
    pub class: usize,
    pub trace: i64,
    pub bound: LinearBound,
    pub blowup: usize,
    /// Row numbers with the same trace and bound.
    pub candidates: Vec<u32>,
    /// The row, once the blow-up type is known.
    pub row: Option<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnchorReport {
    /// Catalog entry to type number.
    pub assigned: BTreeMap<usize, u32>,
    pub sources: BTreeMap<usize, AnchorSource>,
    pub conflicts: Vec<AnchorConflict>,
    pub deg2: Vec<Deg2Match>,
}

impl AnchorReport {
    fn assign(&mut self, entry: usize, t: u32, source: AnchorSource) -> bool {
        match self.assigned.get(&entry) {
            Some(&e) if e == t => false,
            Some(&e) => {
                let c = AnchorConflict { entry, existing: e, proposed: t, source };
                if !self.conflicts.contains(&c) {
                    self.conflicts.push(c);
                }
                false
            }
            None => {
                if let Some((&other, _)) = self.assigned.iter().find(|(_, &v)| v == t) {
                    let c = AnchorConflict { entry: other, existing: t, proposed: t, source };
                    if !self.conflicts.contains(&c) {
                        self.conflicts.push(c);
                    }
                    return false;
                }
                self.assigned.insert(entry, t);
                self.sources.insert(entry, source);
                true
            }
        }
    }

    pub fn entry_of(&self, t: u32) -> Option<usize> {
        self.assigned.iter().find(|(_, &v)| v == t).map(|(&k, _)| k)
    }
}

/// Anchors a complete catalog. `twists` lists Bertini partners as returned by
/// [`descent::twist_pairs`]; pass `None` to skip propagation along the twist table.
pub fn anchor_catalog(
    catalog: &Catalog,
    deg2: &[Deg2Class],
    twists: Option<&[(usize, usize)]>,
) -> AnchorReport {
    let mut report =
        AnchorReport { assigned: BTreeMap::new(), sources: BTreeMap::new(), conflicts: Vec::new(), deg2: Vec::new() };
    for (sig, t, src) in anchor_table() {
        if *src == AnchorSource::BertiniOfAnchor && twists.is_none() {
            continue;
        }
        if let Some(id) = catalog.find(sig) {
            report.assign(id, *t, *src);
        }
    }
    report.deg2 = deg2
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let bound = descent::line_point_bound(&c.signature);
            let candidates = tables::DP2_ROWS
                .iter()
                .filter(|r| r.trace == c.signature.trace && r.lines_q == bound.q && r.lines_const == bound.constant)
                .map(|r| r.dp2)
                .collect();
            Deg2Match { class: i, trace: c.signature.trace, bound, blowup: c.blowup, candidates, row: None }
        })
        .collect();
    loop {
        let mut changed = false;
        for i in 0..report.deg2.len() {
            let m = report.deg2[i].clone();
            let mut types: BTreeSet<u32> = m.candidates.iter().map(|&r| tables::dp2_row(r).blowup).collect();
            if let Some(&t) = report.assigned.get(&m.blowup) {
                types.retain(|&x| x == t);
            } else {
                types.retain(|&x| report.entry_of(x).is_none());
            }
            if types.len() == 1 {
                let t = *types.iter().next().expect("one");
                let blowup = m.blowup;
                changed |= report.assign(blowup, t, AnchorSource::DegreeTwoTable);
                let rows: Vec<u32> =
                    m.candidates.iter().copied().filter(|&r| tables::dp2_row(r).blowup == t).collect();
                if rows.len() == 1 {
                    report.deg2[i].row = Some(rows[0]);
                }
            }
        }
        if let Some(pairs) = twists {
            for &(a, b) in pairs {
                if let Some(&t) = report.assigned.get(&a) {
                    changed |= report.assign(b, tables::twist_of(t), AnchorSource::BertiniPropagation);
                }
            }
        }
        if !changed {
            break;
        }
    }
    report
}

/// Copies the assigned numbers into the catalog entries.
pub fn apply(catalog: &mut Catalog, report: &AnchorReport) {
    for (id, e) in catalog.entries.iter_mut().enumerate() {
        e.type_number = report.assigned.get(&id).copied();
    }
}
