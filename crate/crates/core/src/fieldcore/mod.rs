//! Grids, spectral fields, Fourier multipliers and the `n ↔ n±` change of variables.

pub mod fft;
mod field;
mod grid;
mod reduction;
mod state;

pub use field::{bracket, derivative, sobolev_multiplier, SpectralField};
pub use grid::{signed_index, Grid};
pub use reduction::{decompose_n, reconstruct_n, REAL_INPUT_TOL};
pub use state::{SimState, REALITY_TOL};
