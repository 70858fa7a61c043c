use num_complex::Complex64;

use super::fft;
use super::grid::Grid;
use crate::error::{KlsError, Result};

/// Japanese bracket `<k> = (1 + k²)^{1/2}`.
#[inline]
pub fn bracket(k: f64) -> f64 {
    (1.0 + k * k).sqrt()
}

/// A complex field on a periodic grid with both physical and Fourier views.
///
/// The two views are kept consistent: every constructor and transformation
/// recomputes the other side.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    values: Vec<Complex64>,
    spectrum: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.num_points();
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); n],
            spectrum: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        check_len(grid, values.len())?;
        let spectrum = fft::forward(&values);
        Ok(Self { grid: grid.clone(), values, spectrum })
    }

    pub fn from_spectrum(grid: &Grid, spectrum: Vec<Complex64>) -> Result<Self> {
        check_len(grid, spectrum.len())?;
        let values = fft::inverse(&spectrum);
        Ok(Self { grid: grid.clone(), values, spectrum })
    }

    pub fn from_real(grid: &Grid, values: &[f64]) -> Result<Self> {
        Self::from_values(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values: Vec<_> = grid.points().into_iter().map(f).collect();
        let spectrum = fft::forward(&values);
        Self { grid: grid.clone(), values, spectrum }
    }

    /// Unit-amplitude-scaled plane wave `amplitude · e^{i k_j x}` for signed mode `j`.
    pub fn plane_wave(grid: &Grid, mode: i64, amplitude: Complex64) -> Self {
        let k = 2.0 * std::f64::consts::PI * mode as f64 / grid.domain_length();
        Self::from_fn(grid, |x| amplitude * Complex64::from_polar(1.0, k * x))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fails on the first non-finite sample (physical side, then spectrum).
    pub fn check_finite(&self, what: &'static str) -> Result<()> {
        for data in [&self.values, &self.spectrum] {
            if let Some(index) = data.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err(KlsError::NonFinite { what, index });
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Errors when the imaginary part exceeds `rel_tol` of the amplitude.
    pub fn check_real(&self, what: &'static str, rel_tol: f64) -> Result<()> {
        let residual = self.max_imag();
        if residual > rel_tol * self.max_abs().max(f64::MIN_POSITIVE) {
            Err(KlsError::NotReal { what, residual })
        } else {
            Ok(())
        }
    }

    /// Applies `f(k, ĉ)` mode-wise and returns the resulting field.
    pub fn map_spectrum(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let spectrum: Vec<_> = self
            .grid
            .wavenumbers()
            .iter()
            .zip(&self.spectrum)
            .map(|(&k, &c)| f(k, c))
            .collect();
        let values = fft::inverse(&spectrum);
        Self { grid: self.grid.clone(), values, spectrum }
    }

    /// Applies `f(x_j, v_j)` pointwise and returns the resulting field.
    pub fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let values: Vec<_> = self.values.iter().map(|&v| f(v)).collect();
        let spectrum = fft::forward(&values);
        Self { grid: self.grid.clone(), values, spectrum }
    }

    /// Like [`map_spectrum`](Self::map_spectrum) but with the Nyquist mode zeroed.
    pub fn map_spectrum_no_nyquist(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let nyq = self.grid.nyquist_index();
        let mut spectrum: Vec<_> = self
            .grid
            .wavenumbers()
            .iter()
            .zip(&self.spectrum)
            .map(|(&k, &c)| f(k, c))
            .collect();
        spectrum[nyq] = Complex64::new(0.0, 0.0);
        let values = fft::inverse(&spectrum);
        Self { grid: self.grid.clone(), values, spectrum }
    }

    pub fn conj(&self) -> Self {
        self.map_values(|c| c.conj())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| v * factor).collect(),
            spectrum: self.spectrum.iter().map(|&v| v * factor).collect(),
        }
    }

    /// Pointwise `f(a_j, b_j)` on physical samples.
    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values: Vec<_> = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        let spectrum = fft::forward(&values);
        Ok(Self { grid: self.grid.clone(), values, spectrum })
    }

    /// Linear combination `f(a, b)` applied to both views, so no transform is needed.
    /// `f` must be linear in its arguments jointly.
    pub fn combine(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            spectrum: self.spectrum.iter().zip(&other.spectrum).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// `‖f‖_{L²}` from the spectrum: `(L Σ|ĉ|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.weighted_norm(|_| 1.0)
    }

    /// `‖f‖_{L²}` from physical samples: `((L/N) Σ|f|²)^{1/2}`.
    pub fn l2_norm_physical(&self) -> f64 {
        (self.grid.dx() * self.values.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `(L Σ w(k)|ĉ(k)|²)^{1/2}`.
    pub fn weighted_norm(&self, weight: impl Fn(f64) -> f64) -> f64 {
        let sum: f64 = self
            .grid
            .wavenumbers()
            .iter()
            .zip(&self.spectrum)
            .map(|(&k, c)| weight(k) * c.norm_sqr())
            .sum();
        (self.grid.domain_length() * sum).sqrt()
    }

    /// Physical-side quadrature `(L/N) Σ g(f_j)`.
    pub fn integrate(&self, g: impl Fn(Complex64) -> f64) -> f64 {
        self.grid.dx() * self.values.iter().map(|&c| g(c)).sum::<f64>()
    }

    /// 2/3-rule projection: zeroes every mode with `|j| > N/3` and the Nyquist mode.
    pub fn dealiased(&self) -> Self {
        let n = self.grid.num_points();
        let cutoff = self.grid.dealias_cutoff() as i64;
        let mut spectrum = self.spectrum.clone();
        for (j, c) in spectrum.iter_mut().enumerate() {
            if super::grid::signed_index(j, n).abs() > cutoff || j == n / 2 {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        let values = fft::inverse(&spectrum);
        Self { grid: self.grid.clone(), values, spectrum }
    }
}

fn check_len(grid: &Grid, len: usize) -> Result<()> {
    if len == grid.num_points() {
        Ok(())
    } else {
        Err(KlsError::GridMismatch(format!(
            "array of length {len} on grid with {} points",
            grid.num_points()
        )))
    }
}

/// `A^s = (1 - ∂²_x)^{s/2}`: each mode is multiplied by `(1 + k²)^{s/2}`.
///
/// The symbol is even and real, so real fields stay real and the Nyquist
/// coefficient needs no special treatment.
pub fn sobolev_multiplier(field: &SpectralField, s: f64) -> Result<SpectralField> {
    field.check_finite("sobolev_multiplier input")?;
    if s == 0.0 {
        return Ok(field.clone());
    }
    Ok(field.map_spectrum(|k, c| c * (1.0 + k * k).powf(0.5 * s)))
}

/// `∂_x` as a Fourier multiplier. The Nyquist mode is zeroed since `ik` is odd.
pub fn derivative(field: &SpectralField) -> SpectralField {
    field.map_spectrum_no_nyquist(|k, c| c * Complex64::new(0.0, k))
}
