//! Time evolution of the reduced system: exact linear propagators, the exact
//! nonlinear subflow, Strang splitting, and a Picard/Duhamel local solver.

mod picard;
mod propagator;
mod splitting;

pub use picard::{
    cumulative, picard_local_solve, proxy_norm, IterationRecord, PicardConfig, PicardOutcome, Quadrature, Trajectory,
};
pub use propagator::Propagator;
pub use splitting::{integrate, linear_step, nonlinear_substep, strang_step, Coupling, SUBSTEP_REALITY_TOL};

/// The linear flows share their symbols with the `X^{s,b}` norms.
pub use crate::xsb::DispersionSymbol as PropagatorKind;
