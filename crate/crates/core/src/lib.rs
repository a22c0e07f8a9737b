//! Numerical toolkit for path-independent (PI) control of a composite
//! ancilla–central system.
//!
//! Ancilla levels are indexed from zero throughout the library. Composite
//! operators use the ancilla as the outer (slow) tensor factor, and
//! superoperators act on row-stacked density matrices, so that the map
//! `ρ ↦ X ρ Y` is represented by `X ⊗ Yᵀ`.
//!
//! * [`numerics`]: dense complex kernel (Kronecker products, matrix
//!   exponential, eigensolver, proportionality fits, RK4).
//! * [`algebra`]: unitary cocycle families, PI algebra graphs, membership,
//!   path products and the spectral correspondence of PI operators.
//! * [`propagation`]: PI propagators, projected blocks and frame dressing.
//! * [`superop`]: vectorization, Lindbladians, the PI gate condition and the
//!   exact criterion for open-system PI gates.
//! * [`dyson`]: jump-resolved Dyson terms and the approximate PI order.
//! * [`models`]: error-transparent and SNAP gate constructors.

pub mod algebra;
pub mod dyson;
pub mod error;
pub mod models;
pub mod numerics;
pub mod propagation;
pub mod superop;

pub use algebra::{AlgebraGraph, PIElement, SpectrumReport, UnitaryFamily};
pub use dyson::{DysonStack, GeneratorSplit, PiOrder, PiOrderEntry, PiOrderOptions, PiOrderReport};
pub use error::{Error, Result};
pub use models::{ErrorTransparentSpec, SnapSpec};
pub use numerics::{CMatrix, ProportionalityFit, C64};
pub use propagation::{DiagonalFrame, ProjectedBlock, Schedule};
pub use superop::{Jump, LindbladModel, SuperOp};
