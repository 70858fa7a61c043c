//! Mass, energy, Sobolev norms and the exponential growth envelope for
//! `‖n(t)‖_{H^{1/2}} + ‖n_t(t)‖_{H^{−1/2}}`.

mod growth;
mod quantities;

pub use growth::{growth_bound_check, mark_doublings, GrowthBound, GrowthReport};
pub use quantities::{
    energy, mass, n_pm_half_norm, row_for_state, sobolev_norm, state_energy, DiagnosticsRow, CSV_HEADER,
    ENERGY_REAL_TOL,
};
