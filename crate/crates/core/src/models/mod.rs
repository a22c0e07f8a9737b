//! Built-in gate models: error-transparent ancilla errors and the
//! number-selective phase gate.

mod snap;
mod transparent;

pub use snap::{snap_model, SnapModel, SnapSpec, DEFAULT_CHI, DEFAULT_DEPHASING, DEFAULT_RELAXATION};
pub use transparent::{et_condition_check, et_model, nas_check, ErrorTransparentSpec, EtModel, TransparencyVerdict};

#[cfg(test)]
mod tests;
