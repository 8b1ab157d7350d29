//! Finite topologies and the families of {0,1}-valued quasimetrics that
//! generate them.
//!
//! Points are `0..n` with `n ≤ 16`, and every subset is a `u16` mask.

pub mod continuity_space;
pub mod document;
pub mod error;
pub mod family;
pub mod index_set;
pub mod points;
pub mod qmetric;
pub mod representation;
pub mod sequence;
pub mod topology;

pub use document::{parse_document, serialize, Document, RawDocument};
pub use error::{Error, Result};
pub use family::QuasiFamily;
pub use index_set::IndexSetDescriptor;
pub use points::{PointMap, PointSet, PointSpace};
pub use sequence::{DirectedNet, Rule, SequenceSpec};
pub use topology::{Preorder, Topology};
