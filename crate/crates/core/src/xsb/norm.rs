//! Discrete space-time norms.
//!
//! Normalization follows the spatial convention (`∫|f|² dx ≈ L Σ|ĉ|²`) in
//! both directions: `∫∫|f|² dx dt ≈ T·L·Σ|ĉ(k, τ)|²` with the forward
//! transforms carrying `1/N` and `1/N_t`.

use num_complex::Complex64;

use super::field::{DispersionSymbol, SpaceTimeField};
use crate::error::{KlsError, Result};
use crate::fieldcore::{bracket, fft, signed_index};

/// Spatial spectra of every time row, time-major.
fn row_spectra(f: &SpaceTimeField) -> Vec<Complex64> {
    let n = f.grid().num_points();
    let mut out = f.values().to_vec();
    for chunk in out.chunks_mut(n) {
        fft::forward_in_place(chunk);
    }
    out
}

/// `‖<ξ>^s <τ − φ(ξ)>^b f̂(ξ, τ)‖_{L²}`.
///
/// Each spatial mode is demodulated by `e^{−iφ(k)t}` before the time
/// transform, so the temporal frequency seen by the weight is `τ − φ(k)`
/// without aliasing in `φ`.
pub fn xsb_norm(f: &SpaceTimeField, s: f64, b: f64, phi: DispersionSymbol) -> Result<f64> {
    if !(s.is_finite() && b.is_finite()) {
        return Err(KlsError::InvalidParameter(format!("non-finite exponents s={s}, b={b}")));
    }
    let n = f.grid().num_points();
    let nt = f.num_times();
    let spectra = row_spectra(f);
    let times = f.times();
    let period = f.period();
    let tau: Vec<f64> =
        (0..nt).map(|l| 2.0 * std::f64::consts::PI * signed_index(l, nt) as f64 / period).collect();
    let tau_weight: Vec<f64> = tau.iter().map(|&t| (1.0 + t * t).powf(b)).collect();

    let mut column = vec![Complex64::new(0.0, 0.0); nt];
    let mut total = 0.0;
    for (i, &k) in f.grid().wavenumbers().iter().enumerate() {
        let w = phi.phi(k);
        for (j, c) in column.iter_mut().enumerate() {
            *c = spectra[j * n + i] * Complex64::from_polar(1.0, -w * times[j]);
        }
        fft::forward_in_place(&mut column);
        let col: f64 = column.iter().zip(&tau_weight).map(|(c, tw)| tw * c.norm_sqr()).sum();
        total += (1.0 + k * k).powf(s) * col;
    }
    Ok((period * f.grid().domain_length() * total).sqrt())
}

/// `(Σ_j Δt ‖f(t_j)‖²_{H^s})^{1/2}` computed slice by slice.
pub fn l2_hs_norm(f: &SpaceTimeField, s: f64) -> f64 {
    lp_hs_norm(f, 2.0, s)
}

/// `‖f‖_{L^p_t H^s_x}`; `p = ∞` is the max over slices.
pub fn lp_hs_norm(f: &SpaceTimeField, p: f64, s: f64) -> f64 {
    let n = f.grid().num_points();
    let spectra = row_spectra(f);
    let l = f.grid().domain_length();
    let weights: Vec<f64> = f.grid().wavenumbers().iter().map(|&k| bracket(k).powf(2.0 * s)).collect();
    let slice_norms = spectra.chunks(n).map(|row| {
        (l * row.iter().zip(&weights).map(|(c, w)| w * c.norm_sqr()).sum::<f64>()).sqrt()
    });
    time_norm(slice_norms, p, f.dt())
}

/// `‖f‖_{L^q_t L^r_x}` by physical-side power sums; `∞` exponents take maxima.
pub fn mixed_norm(f: &SpaceTimeField, q: f64, r: f64) -> f64 {
    let n = f.grid().num_points();
    let dx = f.grid().dx();
    let slice_norms = f.values().chunks(n).map(|row| {
        if r.is_infinite() {
            row.iter().map(|c| c.norm()).fold(0.0, f64::max)
        } else {
            (dx * row.iter().map(|c| c.norm().powf(r)).sum::<f64>()).powf(1.0 / r)
        }
    });
    time_norm(slice_norms, q, f.dt())
}

fn time_norm(slice_norms: impl Iterator<Item = f64>, p: f64, dt: f64) -> f64 {
    if p.is_infinite() {
        slice_norms.fold(0.0, f64::max)
    } else {
        (dt * slice_norms.map(|v| v.powf(p)).sum::<f64>()).powf(1.0 / p)
    }
}
