//! Cached FFT plans.
//!
//! Normalization: the forward transform carries the factor `1/N`, so a plane
//! wave `a·e^{ikx}` has coefficient of modulus `|a|` at its mode and
//! `∫|f|² dx ≈ L·Σ|ĉ_j|²`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type PlanKey = (usize, bool);

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((len, forward))
        .or_insert_with(|| {
            let dir = if forward { FftDirection::Forward } else { FftDirection::Inverse };
            FftPlanner::new().plan_fft(len, dir)
        })
        .clone()
}

/// In-place forward DFT including the `1/N` factor.
pub fn forward_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    plan(n, true).process(buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
}

/// In-place inverse DFT (no scaling).
pub fn inverse_in_place(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

pub fn forward(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    forward_in_place(&mut buf);
    buf
}

pub fn inverse(spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    inverse_in_place(&mut buf);
    buf
}
