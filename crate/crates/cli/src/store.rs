//! Catalog persistence.

use crate::CliError;
use delpezzo::anchors::{self, AnchorSource};
use delpezzo::descent;
use delpezzo::lattice::{self, Direction};
use delpezzo::matrix::IntMatrix;
use delpezzo::weyl::{self, Catalog, CatalogEntry, ClassSignature};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const FORMAT: &str = "delpezzo-catalog";
pub const VERSION: u32 = 1;
const SIGNATURE_SCHEME: &str = "order,trace,charpoly,line-orbit-patterns,index,fixed-rank";

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_BUDGET: usize = 200_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogFile {
    pub format: String,
    pub version: u32,
    pub content_hash: String,
    pub seed: u64,
    pub budget: usize,
    pub entries: Vec<EntryRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntryRecord {
    pub id: usize,
    pub type_number: Option<u32>,
    pub anchor: Option<AnchorSource>,
    pub signature: ClassSignature,
    /// Rows of the matrix in the standard basis `H, E1..E8`.
    pub representative: Vec<Vec<i64>>,
}

/// Hash of the lattice constants and the signature scheme. A stored catalog with a different hash
/// was built under other conventions and is rebuilt.
pub fn content_hash() -> String {
    let std1 = lattice::standard(1);
    let mut h = Sha256::new();
    h.update(format!("{FORMAT} v{VERSION}\n{SIGNATURE_SCHEME}\n"));
    h.update(serde_json::to_string(&rows(&std1.gram)).expect("serializable"));
    h.update(serde_json::to_string(std1.canonical.coords()).expect("serializable"));
    h.update(serde_json::to_string(&rows(&lattice::conic_change_of_basis(Direction::StandardToConic))).expect("serializable"));
    hex::encode(h.finalize())
}

fn rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.row_major().chunks(m.size()).map(|r| r.to_vec()).collect()
}

/// Discovers and anchors a catalog.
pub fn build(seed: u64, budget: usize) -> Result<CatalogFile, CliError> {
    let mut catalog = weyl::discover_catalog(seed, budget).map_err(|e| CliError::Module(e.to_string()))?;
    let deg2 = descent::degree_two_classes(&catalog);
    let pairs = descent::twist_pairs(&catalog).map_err(|e| CliError::Module(e.to_string()))?;
    let report = anchors::anchor_catalog(&catalog, &deg2, Some(&pairs));
    anchors::apply(&mut catalog, &report);
    let entries = catalog
        .entries
        .iter()
        .enumerate()
        .map(|(id, e)| EntryRecord {
            id,
            type_number: e.type_number,
            anchor: report.sources.get(&id).copied(),
            signature: e.signature.clone(),
            representative: rows(&e.representative),
        })
        .collect();
    Ok(CatalogFile {
        format: FORMAT.into(),
        version: VERSION,
        content_hash: content_hash(),
        seed,
        budget,
        entries,
    })
}

pub fn write(file: &CatalogFile, path: &Path) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(file).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Reads a catalog file. A stale hash triggers a rebuild with the stored seed and budget, which
/// is written back; the flag in the result reports whether that happened.
pub fn load(path: &Path) -> Result<(CatalogFile, bool), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::MissingCatalog(path.display().to_string()),
        _ => CliError::Io(format!("{}: {e}", path.display())),
    })?;
    let file: CatalogFile =
        serde_json::from_str(&text).map_err(|e| CliError::BadCatalog(format!("{}: {e}", path.display())))?;
    if file.format != FORMAT {
        return Err(CliError::BadCatalog(format!("{}: not a catalog file", path.display())));
    }
    if file.version != VERSION || file.content_hash != content_hash() {
        let fresh = build(file.seed, file.budget)?;
        write(&fresh, path)?;
        return Ok((fresh, true));
    }
    for e in &file.entries {
        let computed = weyl::signature(&representative(e)?);
        if computed != e.signature {
            return Err(CliError::BadCatalog(format!("entry {}: stored signature does not match its matrix", e.id)));
        }
    }
    Ok((file, false))
}

pub fn representative(e: &EntryRecord) -> Result<delpezzo::weyl::LatticeAut, CliError> {
    if e.representative.len() != 9 || e.representative.iter().any(|r| r.len() != 9) {
        return Err(CliError::BadCatalog(format!("entry {}: representative is not 9x9", e.id)));
    }
    weyl::validate_aut(&lattice::standard(1), IntMatrix::from_rows(&e.representative))
        .map_err(|err| CliError::BadCatalog(format!("entry {}: {err}", e.id)))
}

impl CatalogFile {
    pub fn catalog(&self) -> Catalog {
        Catalog {
            entries: self
                .entries
                .iter()
                .map(|e| CatalogEntry {
                    signature: e.signature.clone(),
                    representative: IntMatrix::from_rows(&e.representative),
                    type_number: e.type_number,
                })
                .collect(),
        }
    }
}
