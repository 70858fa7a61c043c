use num_complex::Complex64;

use crate::fieldcore::SpectralField;
use crate::xsb::DispersionSymbol;

/// Exact linear flow `ĉ(k) ← e^{iφ(k)dt} ĉ(k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Propagator {
    pub symbol: DispersionSymbol,
    pub dt: f64,
}

impl Propagator {
    pub fn new(symbol: DispersionSymbol, dt: f64) -> Self {
        Self { symbol, dt }
    }

    pub fn factor(&self, k: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.symbol.phi(k) * self.dt)
    }

    pub fn apply(&self, field: &SpectralField) -> SpectralField {
        if self.dt == 0.0 {
            return field.clone();
        }
        field.map_spectrum(|k, c| c * self.factor(k))
    }
}
