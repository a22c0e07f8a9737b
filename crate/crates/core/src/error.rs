use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("singular matrix in linear solve")]
    Singular,
    #[error("eigenvalue iteration exceeded its budget of {0} sweeps")]
    NoConvergence(usize),
    #[error("proportionality target is the zero matrix")]
    ZeroTarget,
    #[error("non-finite state during integration at t = {0}")]
    IntegrationDiverged(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} index {index} out of range (dimension {bound})")]
    IndexOutOfRange { what: &'static str, index: usize, bound: usize },
    #[error("representative {index} is not unitary (defect {defect:.3e})")]
    NotUnitary { index: usize, defect: f64 },
    #[error("anchor representative is not the identity (defect {0:.3e})")]
    AnchorNotIdentity(f64),
    #[error("edge ({0}, {1}) is missing")]
    MissingEdge(usize, usize),
    #[error("edge map violates the cocycle condition (worst residual {residual:.3e} at {triple:?})")]
    CocycleViolation { residual: f64, triple: (usize, usize, usize) },
    #[error("path does not chain at step {0}")]
    BrokenPath(usize),
    #[error("graph is not closed under composition; missing {0:?}")]
    NotClosed(Vec<(usize, usize)>),
    #[error("schedule covers [0, {end}] but t = {t} was requested")]
    ScheduleCoverage { end: f64, t: f64 },
    #[error("projected transition is trivially zero (norm {0:.3e})")]
    TrivialTransition(f64),
    #[error("jump term is time dependent; use the hierarchy integrator")]
    TimeDependentJumps,
    #[error("no-jump generator is time dependent (jump {0}: K†K does not commute with its frame)")]
    TimeDependentNoJump(usize),
    #[error("hierarchy integration not self-converged: {steps} vs {doubled} steps differ by {error:.3e} (tolerance {tol:.1e})")]
    InsufficientSteps { steps: usize, doubled: usize, error: f64, tol: f64 },
    #[error(
        "gray-zone verdict for path {i}->{r} at t = {t:.6}: residual {residual:.3e} at order {k} lies between \
         pass tolerance {pass_tol:.1e} and fail tolerance {fail_tol:.1e}; adjust the evaluation time or tolerances"
    )]
    GrayZone { i: usize, r: usize, t: f64, k: usize, residual: f64, pass_tol: f64, fail_tol: f64 },
    #[error("orders for path {i}->{r} disagree across evaluation times: {orders}")]
    TimeDisagreement { i: usize, r: usize, orders: String },
    #[error("order for path {i}->{r} depends on the picture: interaction {interaction}, lab frame {lab}")]
    FrameDependence { i: usize, r: usize, interaction: String, lab: String },
}
