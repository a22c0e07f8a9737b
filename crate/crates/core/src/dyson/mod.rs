//! Jump-resolved Dyson expansion of the Lindblad channel and the
//! approximate PI order of ancilla paths.

mod order;
mod split;
mod terms;

pub use order::{
    classify, generic_times, pi_order, pi_order_report, schrodinger_pi_order, PathOrder, PiOrder, PiOrderEntry,
    PiOrderOptions, PiOrderReport,
};
pub use split::{split, GeneratorSplit};
pub use terms::{
    dyson_stack, dyson_terms_constant, dyson_terms_constant_columns, dyson_terms_timedep, dyson_terms_timedep_checked,
    BlockToeplitz, DysonStack,
};
