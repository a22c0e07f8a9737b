//! Hilbert–Schmidt space: vectorization, HS-space PI base vectors,
//! Lindbladians, the PI gate condition and the exact open-system criterion.

mod gate;
mod hs;
mod lindblad;

pub use gate::{
    conjugation_superop, evolve, lemma3_verify, lemma3_verify_with_anchor, pi_gate_condition, pi_gate_condition_against,
    projected_hs_block, theorem1_check, GateCondition, ModelOperator, SpotCheck, Theorem1Options, Theorem1Report, Witness,
};
pub use hs::{
    hs_base_vector, hs_basis_mult_check, hs_basis_mult_residual, left_right_superop, superprojector, unvec, vec, SuperOp,
};
pub use lindblad::{liouvillian, Jump, LindbladModel};
