//! Spectral simulation and verification lab for the one-dimensional
//! Klein–Gordon–Schrödinger system with higher-order Yukawa coupling,
//!
//! ```text
//! i u_t + u_xx = −m n |u|^{2(m−1)} u,
//! n_tt + (1 − ∂²_x) n = |u|^{2m},        1 <= m < 2,
//! ```
//!
//! posed on a periodic box. The crate evolves the reduced first-order system
//! in `(u, n₊, n₋)`, monitors mass/energy and the `H^{1/2}` growth of `n`,
//! carries out the exponent algebra of the local/global theory in exact
//! rationals, and measures discrete Bourgain-space norms and estimate ratios.

pub mod diagnostics;
pub mod error;
pub mod evolve;
pub mod exponents;
pub mod fieldcore;
pub mod harness;
pub mod par;
pub mod xsb;

pub use error::{KlsError, Result};
