//! Discrete Bourgain-space machinery: `X^{s,b}_φ` norms on space-time
//! rectangles, the `ψ_δ` cutoff, and empirical checkers for the linear and
//! nonlinear estimates.
//!
//! Stable estimate ids: `schrodinger_strichartz`, `schrodinger_l2_interpolated`,
//! `klein_gordon_lp_hs`, `nonlinear_schrodinger_source`, `nonlinear_wave_source`.

mod checks;
mod ensemble;
mod field;
mod norm;
mod window;

pub use checks::{
    nonlinear_estimate_check, nonlinear_ratios, strichartz_check, EstimateReport, LinearEstimate, MemberRatio,
    NONLINEAR_SCHRODINGER_ID, NONLINEAR_WAVE_ID,
};
pub use ensemble::{EnsembleSpec, Family, Member};
pub use field::{DispersionSymbol, SpaceTimeField, MIN_TIMES};
pub use norm::{l2_hs_norm, lp_hs_norm, mixed_norm, xsb_norm};
pub use window::{bump, bump_window};
