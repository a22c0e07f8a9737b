//! Unitary cocycle families, PI algebra graphs and their elements.

mod element;
mod family;
mod graph;
mod spectrum;

pub use element::{membership, Membership, PIElement};
pub use family::{verify_cocycle, CocycleReport, EdgeMap, UnitaryFamily, UNITARY_TOL};
pub use graph::{AlgebraGraph, ClosureReport};
pub use spectrum::{hungarian, lemma1_verify, lemma1_verify_with_anchor, multiset_distance, SpectrumReport};

