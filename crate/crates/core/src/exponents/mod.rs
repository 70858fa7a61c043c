//! Exact exponent algebra: scaling-critical indices, Bourgain exponents, the
//! admissible `(θ, ε)` region and the local/global step-size formulas.

mod bourgain;
pub mod rational;
mod region;
mod scaling;
mod schedule;

pub use bourgain::{auto_exponents, bourgain_exponents, epsilon_lattice, theta_upper, ExponentSet};
pub use rational::Q;
pub use region::{admissible_region, constraints, Constraint, ConstraintId, RegionReport, Vertex};
pub use scaling::{critical_indices, CriticalIndices, ScalingCase};
pub use schedule::{
    band_constant, doubling_forecast, local_delta, local_delta_mass_only, Binding, DoublingForecast, LocalDelta,
};
