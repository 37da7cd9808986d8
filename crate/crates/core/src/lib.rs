//! Frobenius conjugacy-class data for del Pezzo surfaces of degree 1 over finite fields.

pub mod lattice;
pub mod matrix;
pub mod primes;
pub mod orbits;
pub mod weyl;
pub mod conic_bundle;
pub mod tables;
pub mod descent;
pub mod anchors;
pub mod field;
pub mod genpos;

pub use anchors::AnchorReport;
pub use conic_bundle::{ConicType, D7Element};
pub use descent::{Deg2Class, Deg2Signature, LinearBound};
pub use field::{Field, FieldDesc};
pub use genpos::{BlowupProfile, SearchOutcome, Witness};
pub use lattice::{BasisKind, LatticeContext, PicClass};
pub use matrix::IntMatrix;
pub use weyl::{Catalog, CatalogEntry, ClassSignature, LatticeAut};
