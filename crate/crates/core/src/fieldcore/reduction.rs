//! First-order reduction of the Klein–Gordon part.
//!
//! `n± = ½(n ± (iA)⁻¹ n_t)` and back: `n = n₊ + n₋`, `n_t = iA(n₊ − n₋)`.
//! For real `(n, n_t)` the pair satisfies `n₋ = conj(n₊)`.

use num_complex::Complex64;

use super::field::{bracket, SpectralField};
use crate::error::Result;

/// Relative imaginary-part tolerance for inputs that must be real.
pub const REAL_INPUT_TOL: f64 = 1e-12;

pub fn decompose_n(n0: &SpectralField, n1: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    n0.grid().check_same(n1.grid())?;
    n0.check_real("n0", REAL_INPUT_TOL)?;
    n1.check_real("n1", REAL_INPUT_TOL)?;
    // (iA)⁻¹ n1, mode-wise: ĉ / (i<k>) = -i ĉ / <k>.
    let inv_ia_n1 = n1.map_spectrum(|k, c| c * Complex64::new(0.0, -1.0 / bracket(k)));
    let half = Complex64::new(0.5, 0.0);
    let n_plus = n0.combine(&inv_ia_n1, |a, b| half * (a + b))?;
    let n_minus = n0.combine(&inv_ia_n1, |a, b| half * (a - b))?;
    Ok((n_plus, n_minus))
}

pub fn reconstruct_n(n_plus: &SpectralField, n_minus: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    let n = n_plus.add(n_minus)?;
    let n_t = n_plus
        .sub(n_minus)?
        .map_spectrum(|k, c| c * Complex64::new(0.0, bracket(k)));
    Ok((n, n_t))
}
